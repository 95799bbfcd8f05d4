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

#include "qoc/results.hpp"

#include <ctime>
#include <fstream>
#include <sstream>
#include <thread>

#include <fmt/format.h>

#include "json.hpp"

#include "qoc/closed_loop.hpp"
#include "qoc/logging.hpp"

namespace qoc {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

const char* to_string(TerminationReason r) {
  switch (r) {
    case TerminationReason::completed: return "completed";
    case TerminationReason::goal_reached: return "goal_reached";
    case TerminationReason::max_eval_total: return "max_eval_total";
    case TerminationReason::time_limit: return "time_limit";
    case TerminationReason::interrupted: return "interrupted";
    case TerminationReason::aborted: return "aborted";
    case TerminationReason::evaluator_failure: return "evaluator_failure";
    case TerminationReason::ftol: return "ftol";
    case TerminationReason::gtol: return "gtol";
    case TerminationReason::line_search: return "line_search";
  }
  return "unknown";
}

int exit_code(TerminationReason r) {
  switch (r) {
    case TerminationReason::interrupted:
    case TerminationReason::aborted: return 2;
    case TerminationReason::evaluator_failure: return 4;
    default: return 0;
  }
}

const char* to_string(EvaluationKind k) {
  switch (k) {
    case EvaluationKind::search: return "search";
    case EvaluationKind::re_evaluation: return "re_evaluation";
    case EvaluationKind::drift_probe: return "drift_probe";
  }
  return "unknown";
}

std::string format_timestamp(std::chrono::system_clock::time_point when) {
  const std::time_t t = std::chrono::system_clock::to_time_t(when);
  std::tm tm{};
  localtime_r(&t, &tm);
  return fmt::format("{:04}{:02}{:02}_{:02}{:02}{:02}", tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday,
                     tm.tm_hour, tm.tm_min, tm.tm_sec);
}

fs::path create_results_folder(const fs::path& base, const std::string& client_name,
                               std::chrono::system_clock::time_point when) {
  const fs::path root = base / "QuOCS_Results";
  std::error_code ec;
  fs::create_directories(root, ec);
  if (ec) throw ResultsError(fmt::format("cannot create {}: {}", root.string(), ec.message()));
  std::string stem = format_timestamp(when);
  if (!client_name.empty()) stem += "_" + client_name;
  for (int suffix = 0; suffix < 100000; ++suffix) {
    const fs::path candidate = root / (suffix == 0 ? stem : fmt::format("{}_{}", stem, suffix));
    // create_directory reports false for an existing folder, so two racing
    // runs never share one.
    if (fs::create_directory(candidate, ec)) return candidate;
    if (ec) throw ResultsError(fmt::format("cannot create {}: {}", candidate.string(), ec.message()));
  }
  throw ResultsError("no free results folder name under " + root.string());
}

std::string best_controls_json(const OptimizationResult& result) {
  ojson j;
  j["algorithm"] = result.algorithm;
  j["best_FoM"] = result.best_fom;
  j["best_std"] = result.best_std ? ojson(*result.best_std) : ojson(nullptr);
  j["optimization_direction"] =
      result.direction == Direction::maximization ? "maximization" : "minimization";
  j["termination_reason"] = to_string(result.termination);
  j["super_iterations_completed"] = result.super_iterations_completed;
  j["iterations"] = result.iterations;
  j["total_evaluations"] = result.total_evaluations;
  j["search_evaluations"] = result.search_evaluations;
  j["re_evaluations"] = result.re_evaluations;
  j["drift_probes"] = result.drift_probes;
  j["failed_attempts"] = result.failed_attempts;
  j["seed"] = result.seed;
  const ControlsSet& c = result.best_controls;
  ojson pulses = ojson::object(), grids = ojson::object(), params = ojson::object();
  for (std::size_t i = 0; i < c.pulses.size(); ++i) {
    pulses[c.pulse_names.at(i)] = c.pulses[i];
    grids[c.pulse_names.at(i)] = c.timegrids.at(i);
  }
  for (std::size_t i = 0; i < c.parameters.size(); ++i) params[c.parameter_names.at(i)] = c.parameters[i];
  j["pulses"] = std::move(pulses);
  j["timegrids"] = std::move(grids);
  j["parameters"] = std::move(params);
  return j.dump(2) + "\n";
}

std::string history_csv(const OptimizationResult& result) {
  std::string out = "index,FoM,std,accepted,super_iteration,kind,record_FoM\n";
  for (const auto& h : result.history) {
    out += fmt::format("{},{:.17g},{},{},{},{},{:.17g}\n", h.index, h.fom,
                       h.std ? fmt::format("{:.17g}", *h.std) : std::string(), h.accepted ? 1 : 0,
                       h.super_iteration, to_string(h.kind), h.record_fom);
  }
  return out;
}

StoredResult parse_best_controls(const std::string& text) {
  StoredResult out;
  try {
    const ojson j = ojson::parse(text);
    out.best_fom = j.at("best_FoM").get<double>();
    if (!j.at("best_std").is_null()) out.best_std = j.at("best_std").get<double>();
    out.termination_reason = j.at("termination_reason").get<std::string>();
    out.super_iterations_completed = j.at("super_iterations_completed").get<int>();
    out.iterations = j.at("iterations").get<long>();
    out.total_evaluations = j.at("total_evaluations").get<long>();
    const ojson& grids = j.at("timegrids");
    for (const auto& [name, values] : j.at("pulses").items()) {
      out.controls.pulse_names.push_back(name);
      out.controls.pulses.push_back(values.get<std::vector<double>>());
      out.controls.timegrids.push_back(grids.at(name).get<std::vector<double>>());
    }
    for (const auto& [name, value] : j.at("parameters").items()) {
      out.controls.parameter_names.push_back(name);
      out.controls.parameters.push_back(value.get<double>());
    }
  } catch (const nlohmann::json::exception& e) {
    throw ResultsError(std::string("malformed best_controls document: ") + e.what());
  }
  return out;
}

StoredResult load_best_controls(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw ResultsError("cannot read " + file.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_best_controls(ss.str());
}

namespace {

void write_with_retry(const fs::path& file, const std::string& text) {
  for (int attempt = 0;; ++attempt) {
    try {
      write_atomically(file, text);
      return;
    } catch (const std::exception& e) {
      if (attempt >= 1) throw ResultsError(fmt::format("writing {} failed: {}", file.string(), e.what()));
      logger().warn("writing {} failed ({}), retrying once", file.string(), e.what());
      std::this_thread::sleep_for(std::chrono::milliseconds(50));
    }
  }
}

}  // namespace

void dump_config_copy(const fs::path& folder, const std::string& config_text) {
  write_with_retry(folder / kConfigCopyFile, config_text);
}

void dump_results(const fs::path& folder, const OptimizationResult& result,
                  const std::string& config_text, const std::string& version) {
  dump_config_copy(folder, config_text);
  write_with_retry(folder / kBestControlsFile, best_controls_json(result));
  write_with_retry(folder / kHistoryFile, history_csv(result));
  write_with_retry(folder / kVersionFile, version + "\n");
}

}  // namespace qoc
