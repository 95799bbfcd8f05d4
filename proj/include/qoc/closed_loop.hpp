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
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qoc/clock.hpp"
#include "qoc/controls.hpp"
#include "qoc/problems.hpp"
#include "qoc/propagation.hpp"
#include "qoc/rng.hpp"

namespace qoc {

// ---------------------------------------------------------------------------
// File-exchange protocol. The optimizer owns <dir>/controls.json, the
// evaluator owns <dir>/fom.json. Both are replaced by write-then-rename, so a
// reader sees either the previous or the next document, never a mix. A reply
// belongs to a request iff it echoes the request's session and iteration.
//
// controls.json: {"session": str, "iteration": int, "control_flag":
//   "evaluate"|"terminate", "pulses": {name: [..]}, "timegrids": {name: [..]},
//   "parameters": {name: x}}
// fom.json: {"session": str, "iteration": int, "FoM": x, "std": x|null,
//   "status": "ok"|"error"|"abort", "message": str}

inline constexpr const char* kControlsFile = "controls.json";
inline constexpr const char* kReplyFile = "fom.json";

enum class ControlFlag { evaluate, terminate };

struct ExchangeMessage {
  std::string session;
  long iteration = 0;
  ControlFlag control_flag = ControlFlag::evaluate;
  ControlsSet controls;
};

struct ExchangeReply {
  std::string session;
  long iteration = 0;
  double fom = 0.0;
  std::optional<double> std;
  FoMStatus status = FoMStatus::ok;
  std::string message;
};

class ProtocolError : public EvaluatorError {
 public:
  using EvaluatorError::EvaluatorError;
};

class ProtocolTimeout : public ProtocolError {
 public:
  using ProtocolError::ProtocolError;
};

std::string serialize_message(const ExchangeMessage& msg);
/// Throws ProtocolError on malformed documents.
ExchangeMessage parse_message(const std::string& text);
std::string serialize_reply(const ExchangeReply& reply);
ExchangeReply parse_reply(const std::string& text);

/// Writes `text` to a temporary sibling and renames it onto `path`.
void write_atomically(const std::filesystem::path& path, const std::string& text);

void send_controls(const std::filesystem::path& dir, const ExchangeMessage& msg);
void write_reply(const std::filesystem::path& dir, const ExchangeReply& reply);

struct PollOptions {
  double timeout_s = 600.0;
  int poll_interval_ms = 100;
  const std::atomic<bool>* interrupt = nullptr;
};

struct ExchangeStats {
  long sent = 0;
  long consumed = 0;
  long stale_ignored = 0;     // earlier iteration or foreign session
  long parse_failures = 0;    // unreadable documents (torn reads)
  long mismatched_echo = 0;   // same session, iteration ahead of the request
};

/// Polls fom.json until a reply for (session, iteration) appears. Throws
/// ProtocolTimeout after timeout_s, SearchInterrupted when the interrupt flag
/// is raised.
ExchangeReply await_reply(const std::filesystem::path& dir, const std::string& session,
                          long iteration, const PollOptions& options,
                          ExchangeStats* stats = nullptr);

/// Optimizer-side evaluator speaking the protocol.
class FileExchangeEvaluator final : public FoMEvaluator {
 public:
  /// Removes leftover exchange files in `dir` and opens a fresh session.
  FileExchangeEvaluator(std::filesystem::path dir, PollOptions options = {},
                        bool provides_std = true);
  FoMResult get_fom(const ControlsSet& controls) override;
  bool provides_std() const override { return provides_std_; }
  /// Sends the terminate message.
  void finish() override;

  const ExchangeStats& stats() const { return stats_; }
  const std::string& session() const { return session_; }

 private:
  std::filesystem::path dir_;
  PollOptions options_;
  bool provides_std_;
  std::string session_;
  long iteration_ = 0;
  bool finished_ = false;
  ExchangeStats stats_;
};

// ---------------------------------------------------------------------------
// Mock NV experiment: an ensemble of two-level systems driven by
// H = s (Omega_x sigma_x + Omega_y sigma_y) / 2 with Omega_x = A cos(phi),
// Omega_y = A sin(phi), A and phi the two received pulses. The figure of
// merit is the excited-state population averaged over the ensemble.

struct MockNVModel {
  double rabi_inhomogeneity_std = 0.15;
  double drift_rate = 0.002;       // contrast per simulated minute
  double shot_noise_std = 0.01;
  double pulse_duration = 1.0;     // a rectangular pi pulse has amplitude pi
  int ensemble_size = 32;
  double eval_seconds = 8.5;       // simulated duration of one measurement
};

void validate(const MockNVModel& model);

/// Amplitude scales of the ensemble: s_i = 1 + std * Phi^-1((i + 1/2) / M).
std::vector<double> ensemble_scales(const MockNVModel& model);

/// Excited-state population of one member with amplitude scale s.
double member_contrast(std::span<const double> amplitude, std::span<const double> phase,
                       double s, double duration);

/// Noise- and drift-free ensemble-averaged contrast with every amplitude
/// multiplied by `global_scale`. Members are summed in index order, so the
/// parallel and serial paths agree bitwise.
double mock_contrast(const MockNVModel& model, std::span<const double> amplitude,
                     std::span<const double> phase, double global_scale = 1.0,
                     Exec exec = Exec::parallel);

/// Contrast at each global amplitude scale.
std::vector<double> robustness_sweep(std::span<const double> amplitude,
                                     std::span<const double> phase, const MockNVModel& model,
                                     std::span<const double> scales);

/// Pulse pair from a ControlsSet: pulses[0] is the amplitude, pulses[1] (if
/// present) the phase. Throws std::invalid_argument otherwise.
void split_nv_controls(const ControlsSet& controls, std::vector<double>& amplitude,
                       std::vector<double>& phase);

/// Stateful experiment: simulated time advances by eval_seconds per
/// measurement, the signal drifts by -drift_rate per simulated minute and each
/// reading carries Normal(0, shot_noise_std).
class MockExperiment {
 public:
  MockExperiment(MockNVModel model, Rng rng, Exec exec = Exec::parallel);
  FoMResult measure(const ControlsSet& controls);
  double elapsed_minutes() const { return elapsed_minutes_; }
  long measurements() const { return measurements_; }
  const MockNVModel& model() const { return model_; }

 private:
  MockNVModel model_;
  Rng rng_;
  Exec exec_;
  double elapsed_minutes_ = 0.0;
  long measurements_ = 0;
};

/// In-process evaluator backed by MockExperiment.
class MockNVEvaluator final : public FoMEvaluator {
 public:
  MockNVEvaluator(MockNVModel model, Rng rng) : experiment_(model, rng) {}
  FoMResult get_fom(const ControlsSet& controls) override { return experiment_.measure(controls); }
  bool provides_std() const override { return true; }
  const MockExperiment& experiment() const { return experiment_; }

 private:
  MockExperiment experiment_;
};

/// Advances a ManualClock by a fixed number of seconds per evaluation, so
/// time-based logic runs on the experiment's simulated time.
class SimulatedTimeEvaluator final : public FoMEvaluator {
 public:
  SimulatedTimeEvaluator(FoMEvaluator& inner, ManualClock& clock, double seconds_per_evaluation)
      : inner_(inner), clock_(clock), seconds_(seconds_per_evaluation) {}
  FoMResult get_fom(const ControlsSet& controls) override {
    clock_.advance_seconds(seconds_);
    return inner_.get_fom(controls);
  }
  bool provides_std() const override { return inner_.provides_std(); }
  const QuantumModel* model() const override { return inner_.model(); }
  void finish() override { inner_.finish(); }

 private:
  FoMEvaluator& inner_;
  ManualClock& clock_;
  double seconds_;
};

struct ServeOptions {
  int poll_interval_ms = 100;
  int latency_min_ms = 0;
  int latency_max_ms = 0;
  double idle_timeout_s = 0.0;  // 0: wait forever
  const std::atomic<bool>* interrupt = nullptr;
};

struct ServeStats {
  long processed = 0;
  long gaps = 0;            // a request arrived whose predecessor was never seen
  long parse_failures = 0;
  long error_replies = 0;
  bool terminated = false;  // false: stopped by idle timeout or interrupt
};

/// Evaluator-side loop: answers every new request in `dir` with a
/// measurement until a terminate message arrives. Writes mock_stats.json on
/// exit.
ServeStats mock_experiment_serve(const std::filesystem::path& dir, const MockNVModel& model,
                                 Rng rng, const ServeOptions& options = {});

}  // namespace qoc
