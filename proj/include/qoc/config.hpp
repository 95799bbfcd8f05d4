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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qoc/controls.hpp"
#include "qoc/dcrab.hpp"
#include "qoc/problems.hpp"

namespace qoc {

/// Validation failure; `path()` names the offending JSON location, e.g.
/// "pulses[0].lower_limit".
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string path, const std::string& message)
      : std::runtime_error(path.empty() ? message : path + ": " + message), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

enum class Algorithm { dcrab, grape };

struct GrapeStopping {
  long max_eval_total = 100;
  double ftol = 1e-6;
  double gtol = 1e-6;
};

struct OptimizationConfig {
  std::string optimization_client_name;
  Algorithm algorithm = Algorithm::dcrab;
  /// Global settings shared by both algorithms live here too
  /// (direction, time limit, goal, seed).
  DcrabSettings dcrab;
  GrapeStopping grape;
  std::optional<std::uint64_t> seed;
  std::vector<PulseSpec> pulses;
  std::vector<ParameterSpec> parameters;
  std::vector<TimeSpec> times;
  std::optional<std::string> results_folder;
  std::optional<ProblemSpec> problem;

  /// Defaults that were applied, one line each.
  std::vector<std::string> notes;
  /// Unknown keys and non-portable settings.
  std::vector<std::string> warnings;
  /// The document exactly as read.
  std::string source_text;

  /// Duration of pulse `i` via its time_name.
  double duration_of(std::size_t pulse_index) const;
};

/// Parses and validates a configuration document. Throws ConfigError.
OptimizationConfig parse_config(const std::string& text);

/// Reads `path` and parses it. Throws ConfigError (path "" for I/O failures).
OptimizationConfig load_config(const std::filesystem::path& path);

/// The dCRAB view of a configuration.
DcrabProblem dcrab_problem(const OptimizationConfig& config);

}  // namespace qoc
