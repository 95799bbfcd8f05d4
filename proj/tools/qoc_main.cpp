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

// qoc: command-line entry point.
//
//   qoc run --config F [--fom builtin:<name> | --fom file-exchange:<dir>]
//           [--seed N] [--results-dir P]
//
// Exit codes: 0 finished, 2 interrupted or aborted, 3 configuration error,
// 4 evaluator failure.

#include <atomic>
#include <csignal>
#include <cstdio>

#include <fmt/format.h>

#include "CLI11.hpp"

#include "qoc/optimizer.hpp"
#include "qoc/results.hpp"

namespace {

std::atomic<bool> g_interrupt{false};

extern "C" void on_signal(int) { g_interrupt.store(true); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum optimal control toolkit"};
  app.set_version_flag("--version", qoc::kVersion);
  app.require_subcommand(1);

  qoc::RunRequest request;
  std::string config_path;
  std::string results_dir;
  std::uint64_t seed = 0;
  bool serial = false;

  CLI::App* run = app.add_subcommand("run", "Run an optimization");
  run->add_option("--config", config_path, "Configuration document (JSON)")->required();
  run->add_option("--fom", request.fom,
                  "builtin:<ising|ising_noisy|qubit|mock_nv> or file-exchange:<dir>");
  CLI::Option* seed_opt = run->add_option("--seed", seed, "Seed (overrides the configuration)");
  run->add_option("--results-dir", results_dir,
                  "Base folder for QuOCS_Results (overrides QOC_RESULTS_DIR and the config)");
  run->add_option("--poll-ms", request.poll.poll_interval_ms, "File-exchange poll interval")
      ->check(CLI::PositiveNumber);
  run->add_option("--timeout", request.poll.timeout_s, "File-exchange reply timeout in seconds")
      ->check(CLI::PositiveNumber);
  run->add_flag("--serial", serial, "Use the serial reference kernels");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : qoc::kExitConfigError;
  }

  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);

  request.config_path = config_path;
  if (*seed_opt) request.seed = seed;
  if (!results_dir.empty()) request.results_dir = results_dir;
  request.interrupt = &g_interrupt;
  request.exec = serial ? qoc::Exec::serial : qoc::Exec::parallel;

  const qoc::RunOutcome out = qoc::run_optimization(request);
  if (!out.error.empty()) fmt::print(stderr, "qoc: {}\n", out.error);
  if (out.result) {
    fmt::print("results: {}\n", out.folder.string());
    fmt::print("termination: {}\n", qoc::to_string(out.result->termination));
    fmt::print("best FoM: {:.10g}\n", out.result->best_fom);
    fmt::print("evaluations: {}\n", out.result->total_evaluations);
  }
  return out.exit_code;
}
