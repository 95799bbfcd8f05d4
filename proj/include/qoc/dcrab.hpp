// Copyright 2026 The qoctk Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "qoc/clock.hpp"
#include "qoc/controls.hpp"
#include "qoc/direct_search.hpp"
#include "qoc/problems.hpp"
#include "qoc/result.hpp"

namespace qoc {

struct ReEvaluationPolicy {
  bool enabled = false;
  std::vector<double> thresholds;  // each in (0, 1)
};

/// Thresholds used when re-evaluation is requested without a list.
inline const std::vector<double> kDefaultReEvaluationThresholds{0.33, 0.5, 0.6};

enum class DriftMode { off, periodic, after_si };

struct DriftCompensation {
  DriftMode mode = DriftMode::off;
  double period_minutes = 0.0;
};

struct DcrabSettings {
  int super_iteration_number = 1;
  std::optional<long> max_eval_total;
  std::optional<double> total_time_lim_minutes;
  std::optional<double> fom_goal;
  Direction direction = Direction::maximization;
  DsmSettings dsm;
  SearchCriteria criteria;
  ReEvaluationPolicy re_evaluation;
  DriftCompensation drift;
  std::uint64_t seed = 0;
  /// Retries after a failed evaluation before giving up.
  int max_retries = 3;
};

/// What is being optimized: the pulses (each with its own duration) and
/// the constant-but-variable parameters.
struct DcrabProblem {
  std::vector<PulseSpec> pulses;
  std::vector<double> durations;  // one per pulse
  std::vector<ParameterSpec> parameters;
};

struct DcrabState {
  int super_iteration = 0;
  std::vector<std::vector<double>> base_pulses;
  std::vector<std::vector<double>> timegrids;
  std::vector<double> best_parameters;
  std::optional<double> record_fom;  // in the configured direction
  std::optional<double> record_std;
  double drift_offset = 0.0;
  long search_evaluations = 0;
  long re_evaluations = 0;
  long drift_probes = 0;
  long failed_attempts = 0;
  ControlsSet best_controls;
};

/// Initial state: base pulses are the constrained initial guesses, parameters
/// their initial values, no record.
DcrabState initial_state(const DcrabProblem& problem);

struct SuperIterationStart {
  std::vector<BasisExpansion> expansions;  // one per pulse
  std::vector<double> x0;                  // all zeros
  std::vector<double> offsets;             // amplitude_variation per coordinate
};

/// Samples fresh superparameters for every pulse from the child stream
/// (seed, superparameters, SI, pulse) and lays out the search vector as
/// [pulse 0 coefficients, pulse 1 coefficients, ..., parameter offsets].
SuperIterationStart start_superiteration(const DcrabState& state, const DcrabProblem& problem,
                                         std::uint64_t seed);

/// Controls for search point `x` of the current SI.
ControlsSet build_controls(const DcrabProblem& problem, const DcrabState& state,
                           const SuperIterationStart& si, std::span<const double> x);

/// Probability that a candidate with measured mean `candidate` (standard
/// error `candidate_se`) truly beats `record` (standard error `record_se`)
/// under independent normal models.
double improvement_probability(double candidate, double candidate_se, double record,
                               double record_se, Direction direction);

struct CandidateDecision {
  bool accepted = false;
  double mean = 0.0;          // pooled mean of all measurements taken
  std::optional<double> std;  // pooled standard error
  int measurements = 1;
  int failed_stage = 0;       // 1-based stage that rejected, 0 if none
};

/// Decides whether `first` (already measured) replaces the record. With the
/// policy enabled, stage k compares the mean of k measurements against the
/// record and rejects if the improvement probability is below
/// thresholds[k-1]; `remeasure` supplies further measurements. On acceptance
/// the state's record becomes the pooled mean and standard error.
CandidateDecision consider_candidate(DcrabState& state, const FoMResult& first,
                                     const ReEvaluationPolicy& policy, Direction direction,
                                     const std::function<FoMResult()>& remeasure);

/// Re-measures the best controls, sets the record to the fresh value and
/// shifts drift_offset by the change. Returns the event, or nothing when the
/// measurement failed.
std::optional<DriftEvent> compensate_drift(DcrabState& state, FoMEvaluator& evaluator,
                                           const Clock& clock);

class DcrabSetupError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct RunContext {
  const Clock* clock = nullptr;               // null: wall clock
  const std::atomic<bool>* interrupt = nullptr;
};

OptimizationResult run_dcrab(const DcrabProblem& problem, const DcrabSettings& settings,
                             FoMEvaluator& evaluator, RunContext context = {});

}  // namespace qoc
