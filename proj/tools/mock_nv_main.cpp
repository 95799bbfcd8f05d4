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

// mock-nv: simulated NV ensemble answering the file-exchange protocol.
//
//   mock-nv --dir <session> [--inhomogeneity S] [--drift R] [--noise N]
//           [--seed K]

#include <atomic>
#include <csignal>

#include <fmt/format.h>

#include "CLI11.hpp"

#include "qoc/closed_loop.hpp"
#include "qoc/rng.hpp"

namespace {

std::atomic<bool> g_interrupt{false};

extern "C" void on_signal(int) { g_interrupt.store(true); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mock NV-ensemble experiment for closed-loop runs"};
  qoc::MockNVModel model;
  qoc::ServeOptions serve;
  std::string dir;
  std::uint64_t seed = 0;

  app.add_option("--dir", dir, "Session directory")->required();
  app.add_option("--inhomogeneity", model.rabi_inhomogeneity_std, "Rabi amplitude spread (std)")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--drift", model.drift_rate, "Contrast drift per simulated minute")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--noise", model.shot_noise_std, "Shot noise std per reading")
      ->check(CLI::NonNegativeNumber);
  CLI::Option* seed_opt = app.add_option("--seed", seed, "Seed");
  app.add_option("--ensemble", model.ensemble_size, "Ensemble members")->check(CLI::PositiveNumber);
  app.add_option("--eval-seconds", model.eval_seconds, "Simulated seconds per measurement")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--pulse-duration", model.pulse_duration, "Pulse duration in model units")
      ->check(CLI::PositiveNumber);
  app.add_option("--poll-ms", serve.poll_interval_ms, "Poll interval")->check(CLI::PositiveNumber);
  app.add_option("--latency-min-ms", serve.latency_min_ms, "Minimum reply latency")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--latency-max-ms", serve.latency_max_ms, "Maximum reply latency")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--idle-timeout", serve.idle_timeout_s, "Exit after this many idle seconds (0: never)")
      ->check(CLI::NonNegativeNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 3;
  }
  if (serve.latency_max_ms < serve.latency_min_ms) {
    fmt::print(stderr, "mock-nv: --latency-max-ms must not be below --latency-min-ms\n");
    return 3;
  }
  try {
    qoc::validate(model);
  } catch (const std::exception& e) {
    fmt::print(stderr, "mock-nv: {}\n", e.what());
    return 3;
  }
  if (!*seed_opt) {
    seed = qoc::entropy_seed();
    fmt::print(stderr, "mock-nv: seed {}\n", seed);
  }

  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  serve.interrupt = &g_interrupt;

  try {
    const qoc::ServeStats stats = qoc::mock_experiment_serve(
        dir, model, qoc::child_rng(seed, qoc::Stream::mock_experiment, 0), serve);
    fmt::print("processed {} request(s), {} gap(s), {} parse failure(s), {} error reply(ies)\n",
               stats.processed, stats.gaps, stats.parse_failures, stats.error_replies);
    return stats.terminated ? 0 : 2;
  } catch (const std::exception& e) {
    fmt::print(stderr, "mock-nv: {}\n", e.what());
    return 4;
  }
}
