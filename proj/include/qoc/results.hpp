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

#include <chrono>
#include <filesystem>
#include <optional>
#include <string>

#include "qoc/config.hpp"
#include "qoc/result.hpp"

namespace qoc {

inline constexpr const char* kVersion = "1.0.0";

inline constexpr const char* kBestControlsFile = "best_controls.json";
inline constexpr const char* kHistoryFile = "history.csv";
inline constexpr const char* kConfigCopyFile = "config.json";
inline constexpr const char* kVersionFile = "version.txt";
inline constexpr const char* kLogFile = "optimization.log";

class ResultsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Creates base/QuOCS_Results/<YYYYMMDD_HHMMSS>[_<client_name>], adding _1,
/// _2, ... when the folder already exists. Local time.
std::filesystem::path create_results_folder(const std::filesystem::path& base,
                                            const std::string& client_name,
                                            std::chrono::system_clock::time_point when);

std::string format_timestamp(std::chrono::system_clock::time_point when);

/// best_controls.json contents.
std::string best_controls_json(const OptimizationResult& result);
/// history.csv contents; one row per evaluation.
std::string history_csv(const OptimizationResult& result);

/// What load_best_controls recovers.
struct StoredResult {
  ControlsSet controls;
  double best_fom = 0.0;
  std::optional<double> best_std;
  std::string termination_reason;
  int super_iterations_completed = 0;
  long iterations = 0;
  long total_evaluations = 0;
};

StoredResult parse_best_controls(const std::string& text);
StoredResult load_best_controls(const std::filesystem::path& file);

/// Writes config.json first, then the result files and version.txt. Every
/// write is retried once before a ResultsError escapes.
void dump_results(const std::filesystem::path& folder, const OptimizationResult& result,
                  const std::string& config_text, const std::string& version = kVersion);

/// Only the verbatim config copy; used at startup so an interrupted run
/// still leaves it behind.
void dump_config_copy(const std::filesystem::path& folder, const std::string& config_text);

}  // namespace qoc
