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
#include <filesystem>
#include <optional>
#include <string>

#include "qoc/closed_loop.hpp"
#include "qoc/config.hpp"
#include "qoc/dcrab.hpp"
#include "qoc/grape.hpp"
#include "qoc/result.hpp"

namespace qoc {

// Top-level driver: configuration in, results folder out.

/// GRAPE problem for the configured pulses against a white-box model. All
/// pulses must share one time and one bin count, one pulse per control.
GrapeProblem grape_problem(const OptimizationConfig& config, const QuantumModel& model);

/// Runs the configured algorithm. GRAPE requires `evaluator.model()`.
/// Throws ConfigError for algorithm/evaluator mismatches.
OptimizationResult optimize(const OptimizationConfig& config, FoMEvaluator& evaluator,
                            std::uint64_t seed, RunContext context = {},
                            Exec exec = Exec::parallel);

/// Where the FoM comes from: "builtin:<name>" or "file-exchange:<dir>".
struct FomSource {
  enum class Kind { builtin, file_exchange } kind = Kind::builtin;
  std::string target;
};

/// Throws ConfigError on anything else.
FomSource parse_fom_source(const std::string& text);

inline constexpr const char* kResultsDirEnv = "QOC_RESULTS_DIR";

struct RunRequest {
  std::filesystem::path config_path;
  /// Empty: the config's problem section names a built-in.
  std::string fom;
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> results_dir;
  const std::atomic<bool>* interrupt = nullptr;
  PollOptions poll;
  Exec exec = Exec::parallel;
};

struct RunOutcome {
  int exit_code = 0;
  std::filesystem::path folder;  // empty if never created
  std::optional<OptimizationResult> result;
  std::string error;
};

inline constexpr int kExitConfigError = 3;

/// Everything `qoc run` does: parse, pick the results folder (flag, then
/// QOC_RESULTS_DIR, then the config's results_folder, then the working
/// directory), log, optimize, dump. Never throws.
RunOutcome run_optimization(const RunRequest& request);

}  // namespace qoc
