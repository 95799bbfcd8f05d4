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

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "qoc/optimizer.hpp"
#include "qoc/results.hpp"
#include "temp_dir.hpp"

using namespace qoc;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

OptimizationResult sample_result() {
  OptimizationResult r;
  r.algorithm = "dCRAB";
  r.best_controls.pulse_names = {"Pulse1"};
  r.best_controls.pulses = {{0.1, 1.0 / 3.0, -7.25e-9}};
  r.best_controls.timegrids = {{0.5 / 3, 1.5 / 3, 2.5 / 3}};
  r.best_controls.parameter_names = {"delay"};
  r.best_controls.parameters = {0.2};
  r.best_fom = 0.987654321012345;
  r.best_std = 0.0012;
  r.termination = TerminationReason::max_eval_total;
  r.super_iterations_completed = 2;
  r.total_evaluations = 3;
  r.seed = 99;
  for (long i = 0; i < 3; ++i) {
    HistoryEntry h;
    h.index = i;
    h.fom = 0.1 * static_cast<double>(i);
    h.record_fom = h.fom;
    h.accepted = i != 1;
    h.super_iteration = 1;
    h.kind = i == 2 ? EvaluationKind::re_evaluation : EvaluationKind::search;
    if (i == 0) h.std = 0.5;
    r.history.push_back(h);
  }
  return r;
}

const char* kSmallDcrab = R"({
  "optimization_client_name": "unit",
  "algorithm_settings": {"algorithm_name": "dCRAB", "super_iteration_number": 2,
    "random_number_generator": {"seed_number": 4},
    "dsm_settings": {"general_settings": {"dsm_algorithm_name": "NelderMead"},
                     "stopping_criteria": {"max_eval": 15}}},
  "pulses": [{"pulse_name": "u", "time_name": "T", "upper_limit": 8, "lower_limit": -8,
              "bins_number": 10, "amplitude_variation": 1.0,
              "basis": {"basis_name": "Fourier", "basis_vector_number": 2,
                        "random_super_parameter_distribution":
                          {"distribution_name": "Uniform", "lower_limit": 0.1, "upper_limit": 2}},
              "initial_guess": "lambda t: 2.0"}],
  "times": [{"time_name": "T", "initial_value": 1.0}],
  "problem": {"name": "qubit"}
})";

}  // namespace

TEST_SUITE("results") {

TEST_CASE("folder naming and collisions") {
  TempDir base("folders");
  const auto when = std::chrono::system_clock::now();
  const fs::path a = create_results_folder(base.path(), "run", when);
  const fs::path b = create_results_folder(base.path(), "run", when);
  const fs::path c = create_results_folder(base.path(), "run", when);
  const std::string stamp = format_timestamp(when);
  CHECK(stamp.size() == 15);
  CHECK(stamp[8] == '_');
  CHECK(a == base.path() / "QuOCS_Results" / (stamp + "_run"));
  CHECK(b.filename() == stamp + "_run_1");
  CHECK(c.filename() == stamp + "_run_2");
  CHECK(create_results_folder(base.path(), "", when).filename() == stamp);
}

TEST_CASE("best controls round trip exactly") {
  const OptimizationResult r = sample_result();
  const StoredResult s = parse_best_controls(best_controls_json(r));
  CHECK(s.controls.pulse_names == r.best_controls.pulse_names);
  CHECK(s.controls.pulses == r.best_controls.pulses);
  CHECK(s.controls.timegrids == r.best_controls.timegrids);
  CHECK(s.controls.parameters == r.best_controls.parameters);
  CHECK(s.best_fom == r.best_fom);
  CHECK(s.best_std == r.best_std);
  CHECK(s.termination_reason == "max_eval_total");
  CHECK(s.super_iterations_completed == 2);
  CHECK(s.total_evaluations == 3);
}

TEST_CASE("history has a header and one row per evaluation") {
  const std::string csv = history_csv(sample_result());
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK(line == "index,FoM,std,accepted,super_iteration,kind,record_FoM");
  int rows = 0;
  std::vector<std::string> lines;
  while (std::getline(in, line)) {
    ++rows;
    lines.push_back(line);
  }
  CHECK(rows == 3);
  CHECK(lines[0].rfind("0,0,0.5,1,1,search,", 0) == 0);
  CHECK(lines[1].find(",,0,1,search,") != std::string::npos);
  CHECK(lines[2].find("re_evaluation") != std::string::npos);
}

TEST_CASE("dump writes every file and copies the config byte for byte") {
  TempDir dir("dump");
  const std::string config = "{\n  \"a\": 1.50,\t\"b\": [ ]\n}\n";
  dump_results(dir.path(), sample_result(), config);
  CHECK(slurp(dir.path() / kConfigCopyFile) == config);
  CHECK(slurp(dir.path() / kVersionFile).find(kVersion) != std::string::npos);
  CHECK(load_best_controls(dir.path() / kBestControlsFile).best_fom == sample_result().best_fom);
  CHECK(fs::exists(dir.path() / kHistoryFile));
}

TEST_CASE("dump into a missing folder raises ResultsError") {
  CHECK_THROWS_AS(dump_results("/nonexistent/qoc/results", sample_result(), "{}"), ResultsError);
}

TEST_CASE("exit codes") {
  CHECK(exit_code(TerminationReason::completed) == 0);
  CHECK(exit_code(TerminationReason::goal_reached) == 0);
  CHECK(exit_code(TerminationReason::interrupted) == 2);
  CHECK(exit_code(TerminationReason::aborted) == 2);
  CHECK(exit_code(TerminationReason::evaluator_failure) == 4);
}

}  // TEST_SUITE

TEST_SUITE("runtime") {

TEST_CASE("fom source strings") {
  CHECK(parse_fom_source("builtin:ising").kind == FomSource::Kind::builtin);
  const auto f = parse_fom_source("file-exchange:/tmp/x");
  CHECK(f.kind == FomSource::Kind::file_exchange);
  CHECK(f.target == "/tmp/x");
  CHECK_THROWS_AS(parse_fom_source("http://lab"), ConfigError);
}

TEST_CASE("run_optimization end to end with a built-in evaluator") {
  TempDir dir("run");
  const fs::path cfg = dir.path() / "cfg.json";
  std::ofstream(cfg) << kSmallDcrab;
  RunRequest req;
  req.config_path = cfg;
  req.results_dir = dir.path() / "out";
  const RunOutcome out = run_optimization(req);
  REQUIRE(out.exit_code == 0);
  REQUIRE(out.result.has_value());
  CHECK(out.folder.parent_path() == dir.path() / "out" / "QuOCS_Results");
  CHECK(slurp(out.folder / kConfigCopyFile) == kSmallDcrab);
  const StoredResult s = load_best_controls(out.folder / kBestControlsFile);
  CHECK(s.best_fom == out.result->best_fom);
  CHECK(s.total_evaluations == 30);
  CHECK(slurp(out.folder / kLogFile).find("default applied") != std::string::npos);
  // same seed, same answer
  const RunOutcome again = run_optimization(req);
  CHECK(again.result->best_controls.pulses == out.result->best_controls.pulses);
  CHECK(again.folder != out.folder);
}

TEST_CASE("run_optimization: results directory precedence") {
  TempDir dir("precedence");
  const fs::path cfg = dir.path() / "cfg.json";
  std::ofstream(cfg) << kSmallDcrab;
  RunRequest req;
  req.config_path = cfg;
  ::setenv(kResultsDirEnv, (dir.path() / "env").c_str(), 1);
  const RunOutcome from_env = run_optimization(req);
  CHECK(from_env.folder.parent_path().parent_path() == dir.path() / "env");
  req.results_dir = dir.path() / "flag";
  const RunOutcome from_flag = run_optimization(req);
  CHECK(from_flag.folder.parent_path().parent_path() == dir.path() / "flag");
  ::unsetenv(kResultsDirEnv);
}

TEST_CASE("run_optimization: configuration errors exit with 3") {
  TempDir dir("bad");
  const fs::path cfg = dir.path() / "cfg.json";
  std::ofstream(cfg) << "{\"algorithm_settings\": {\"algorithm_name\": \"SIMPLEX\"}}";
  RunRequest req;
  req.config_path = cfg;
  req.results_dir = dir.path();
  const RunOutcome out = run_optimization(req);
  CHECK(out.exit_code == kExitConfigError);
  CHECK(out.error.find("algorithm_name") != std::string::npos);
  CHECK(out.folder.empty());
  req.config_path = dir.path() / "missing.json";
  CHECK(run_optimization(req).exit_code == kExitConfigError);
}

TEST_CASE("GRAPE needs a white-box evaluator") {
  TempDir dir("grape_mock");
  const fs::path cfg = dir.path() / "cfg.json";
  std::ofstream(cfg) << R"({"algorithm_settings": {"algorithm_name": "GRAPE"},
    "pulses": [{"pulse_name": "u", "time_name": "T", "upper_limit": 1, "lower_limit": -1,
                "bins_number": 4, "basis": {"basis_name": "PiecewiseBasis"}}],
    "times": [{"time_name": "T"}]})";
  RunRequest req;
  req.config_path = cfg;
  req.results_dir = dir.path();
  req.fom = "builtin:mock_nv";
  CHECK(run_optimization(req).exit_code == kExitConfigError);
}

}  // TEST_SUITE
