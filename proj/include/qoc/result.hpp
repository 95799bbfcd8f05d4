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

#include <optional>
#include <string>
#include <vector>

#include "qoc/controls.hpp"
#include "qoc/direct_search.hpp"

namespace qoc {

enum class TerminationReason {
  completed,          // all super-iterations ran
  goal_reached,
  max_eval_total,
  time_limit,
  interrupted,
  aborted,            // evaluator replied with status abort
  evaluator_failure,
  ftol,
  gtol,
  line_search,
};

const char* to_string(TerminationReason r);

/// 0 for normal ends, 2 interrupted/aborted, 4 evaluator failure.
int exit_code(TerminationReason r);

enum class EvaluationKind { search, re_evaluation, drift_probe };

const char* to_string(EvaluationKind k);

struct HistoryEntry {
  long index = 0;
  double fom = 0.0;
  std::optional<double> std;
  bool accepted = false;
  int super_iteration = 0;
  EvaluationKind kind = EvaluationKind::search;
  double record_fom = 0.0;  // record after this evaluation
};

struct DriftEvent {
  double minutes = 0.0;
  double old_record = 0.0;
  double new_record = 0.0;
};

struct OptimizationResult {
  std::string algorithm;
  ControlsSet best_controls;
  double best_fom = 0.0;
  std::optional<double> best_std;
  Direction direction = Direction::maximization;
  long total_evaluations = 0;
  long search_evaluations = 0;
  long re_evaluations = 0;
  long drift_probes = 0;
  long failed_attempts = 0;
  int super_iterations_completed = 0;
  long iterations = 0;  // outer quasi-Newton iterations (GRAPE)
  TerminationReason termination = TerminationReason::completed;
  std::vector<HistoryEntry> history;
  std::vector<DriftEvent> drift_events;
  std::vector<SearchTermination> si_terminations;
  double drift_offset = 0.0;
  std::uint64_t seed = 0;
};

}  // namespace qoc
