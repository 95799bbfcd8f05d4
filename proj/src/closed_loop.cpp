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

#include "qoc/closed_loop.hpp"

#include <unistd.h>

#include <chrono>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <thread>

#include <boost/math/special_functions/erf.hpp>
#include <fmt/format.h>

#include "json.hpp"

#include "qoc/direct_search.hpp"

namespace qoc {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

constexpr double kStdFloor = 1e-9;

const char* status_name(FoMStatus s) {
  switch (s) {
    case FoMStatus::ok: return "ok";
    case FoMStatus::error: return "error";
    case FoMStatus::abort: return "abort";
  }
  return "error";
}

FoMStatus status_from(const std::string& s) {
  if (s == "ok") return FoMStatus::ok;
  if (s == "error") return FoMStatus::error;
  if (s == "abort") return FoMStatus::abort;
  throw ProtocolError("unknown reply status '" + s + "'");
}

std::optional<std::string> read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string make_session_id() {
  std::random_device rd;
  return fmt::format("{:08x}{:08x}-{}", rd(), rd(), static_cast<long>(::getpid()));
}

double number_or_throw(const ojson& j, const char* what) {
  if (!j.is_number()) throw ProtocolError(fmt::format("'{}' must be a number", what));
  return j.get<double>();
}

void sleep_ms(int ms) {
  if (ms > 0) std::this_thread::sleep_for(std::chrono::milliseconds(ms));
}

}  // namespace

std::string serialize_message(const ExchangeMessage& msg) {
  ojson j;
  j["session"] = msg.session;
  j["iteration"] = msg.iteration;
  j["control_flag"] = msg.control_flag == ControlFlag::evaluate ? "evaluate" : "terminate";
  ojson pulses = ojson::object();
  ojson grids = ojson::object();
  const ControlsSet& c = msg.controls;
  for (std::size_t i = 0; i < c.pulses.size(); ++i) {
    const std::string name = i < c.pulse_names.size() ? c.pulse_names[i] : fmt::format("pulse{}", i);
    pulses[name] = c.pulses[i];
    if (i < c.timegrids.size()) grids[name] = c.timegrids[i];
  }
  ojson params = ojson::object();
  for (std::size_t i = 0; i < c.parameters.size(); ++i) {
    const std::string name =
        i < c.parameter_names.size() ? c.parameter_names[i] : fmt::format("parameter{}", i);
    params[name] = c.parameters[i];
  }
  j["pulses"] = std::move(pulses);
  j["timegrids"] = std::move(grids);
  j["parameters"] = std::move(params);
  return j.dump();
}

ExchangeMessage parse_message(const std::string& text) {
  ojson j;
  try {
    j = ojson::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ProtocolError(std::string("unparsable controls document: ") + e.what());
  }
  try {
    ExchangeMessage m;
    m.session = j.at("session").get<std::string>();
    m.iteration = j.at("iteration").get<long>();
    const auto flag = j.at("control_flag").get<std::string>();
    if (flag == "evaluate") {
      m.control_flag = ControlFlag::evaluate;
    } else if (flag == "terminate") {
      m.control_flag = ControlFlag::terminate;
      return m;
    } else {
      throw ProtocolError("unknown control_flag '" + flag + "'");
    }
    for (const auto& [name, arr] : j.at("pulses").items()) {
      m.controls.pulse_names.push_back(name);
      std::vector<double> p;
      for (const auto& x : arr) p.push_back(number_or_throw(x, "pulse sample"));
      m.controls.pulses.push_back(std::move(p));
      std::vector<double> grid;
      if (j.contains("timegrids") && j["timegrids"].contains(name))
        for (const auto& x : j["timegrids"][name]) grid.push_back(number_or_throw(x, "time"));
      m.controls.timegrids.push_back(std::move(grid));
    }
    if (j.contains("parameters"))
      for (const auto& [name, x] : j["parameters"].items()) {
        m.controls.parameter_names.push_back(name);
        m.controls.parameters.push_back(number_or_throw(x, "parameter"));
      }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ProtocolError(std::string("malformed controls document: ") + e.what());
  }
}

std::string serialize_reply(const ExchangeReply& r) {
  ojson j;
  j["session"] = r.session;
  j["iteration"] = r.iteration;
  if (std::isfinite(r.fom))
    j["FoM"] = r.fom;
  else
    j["FoM"] = nullptr;
  if (r.std)
    j["std"] = *r.std;
  else
    j["std"] = nullptr;
  j["status"] = status_name(r.status);
  j["message"] = r.message;
  return j.dump();
}

ExchangeReply parse_reply(const std::string& text) {
  ojson j;
  try {
    j = ojson::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ProtocolError(std::string("unparsable reply document: ") + e.what());
  }
  try {
    ExchangeReply r;
    r.session = j.value("session", std::string());
    r.iteration = j.at("iteration").get<long>();
    r.status = status_from(j.value("status", std::string("ok")));
    const auto& fom = j.at("FoM");
    r.fom = fom.is_number() ? fom.get<double>() : std::nan("");
    if (j.contains("std") && j["std"].is_number()) r.std = j["std"].get<double>();
    r.message = j.value("message", std::string());
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ProtocolError(std::string("malformed reply document: ") + e.what());
  }
}

void write_atomically(const fs::path& path, const std::string& text) {
  const fs::path tmp = path.parent_path() /
                       fmt::format(".{}.{}.tmp", path.filename().string(), static_cast<long>(::getpid()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ProtocolError("cannot write " + tmp.string());
    out << text;
    out.flush();
    if (!out) throw ProtocolError("write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw ProtocolError("cannot rename onto " + path.string() + ": " + ec.message());
}

void send_controls(const fs::path& dir, const ExchangeMessage& msg) {
  write_atomically(dir / kControlsFile, serialize_message(msg));
}

void write_reply(const fs::path& dir, const ExchangeReply& reply) {
  write_atomically(dir / kReplyFile, serialize_reply(reply));
}

ExchangeReply await_reply(const fs::path& dir, const std::string& session, long iteration,
                          const PollOptions& options, ExchangeStats* stats) {
  ExchangeStats local;
  ExchangeStats& st = stats ? *stats : local;
  const auto start = std::chrono::steady_clock::now();
  const fs::path path = dir / kReplyFile;
  std::string last_text;
  while (true) {
    if (options.interrupt && options.interrupt->load()) throw SearchInterrupted();
    if (auto text = read_file(path); text && *text != last_text) {
      last_text = *text;
      try {
        ExchangeReply r = parse_reply(*text);
        if (r.session == session && r.iteration == iteration) {
          ++st.consumed;
          return r;
        }
        if (r.session == session && r.iteration > iteration)
          ++st.mismatched_echo;
        else
          ++st.stale_ignored;
      } catch (const ProtocolError&) {
        ++st.parse_failures;
      }
    }
    const double waited =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (waited > options.timeout_s)
      throw ProtocolTimeout(fmt::format("no reply for iteration {} within {} s", iteration,
                                        options.timeout_s));
    sleep_ms(options.poll_interval_ms);
  }
}

FileExchangeEvaluator::FileExchangeEvaluator(fs::path dir, PollOptions options, bool provides_std)
    : dir_(std::move(dir)), options_(options), provides_std_(provides_std),
      session_(make_session_id()) {
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (!fs::is_directory(dir_)) throw ProtocolError("session directory unavailable: " + dir_.string());
  fs::remove(dir_ / kControlsFile, ec);
  fs::remove(dir_ / kReplyFile, ec);
}

FoMResult FileExchangeEvaluator::get_fom(const ControlsSet& controls) {
  ExchangeMessage msg;
  msg.session = session_;
  msg.iteration = ++iteration_;
  msg.controls = controls;
  send_controls(dir_, msg);
  ++stats_.sent;
  const ExchangeReply r = await_reply(dir_, session_, msg.iteration, options_, &stats_);
  FoMResult out;
  out.fom = r.fom;
  out.std = r.std;
  out.status = r.status;
  out.message = r.message;
  return out;
}

void FileExchangeEvaluator::finish() {
  if (finished_) return;
  finished_ = true;
  ExchangeMessage msg;
  msg.session = session_;
  msg.iteration = ++iteration_;
  msg.control_flag = ControlFlag::terminate;
  send_controls(dir_, msg);
}

// ---------------------------------------------------------------------------

void validate(const MockNVModel& m) {
  if (m.ensemble_size < 1) throw std::invalid_argument("ensemble_size must be >= 1");
  if (m.rabi_inhomogeneity_std < 0.0 || m.shot_noise_std < 0.0)
    throw std::invalid_argument("mock standard deviations must be >= 0");
  if (!(m.pulse_duration > 0.0)) throw std::invalid_argument("pulse_duration must be positive");
  if (m.eval_seconds < 0.0) throw std::invalid_argument("eval_seconds must be >= 0");
}

std::vector<double> ensemble_scales(const MockNVModel& m) {
  validate(m);
  const int n = m.ensemble_size;
  std::vector<double> s(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double p = (i + 0.5) / n;
    s[i] = 1.0 + m.rabi_inhomogeneity_std * std::sqrt(2.0) * boost::math::erf_inv(2.0 * p - 1.0);
  }
  if (n == 1) s[0] = 1.0;
  return s;
}

double member_contrast(std::span<const double> amplitude, std::span<const double> phase,
                       double s, double duration) {
  if (amplitude.empty()) return 0.0;
  if (!phase.empty() && phase.size() != amplitude.size())
    throw std::invalid_argument("amplitude and phase must have equal length");
  const double dt = duration / static_cast<double>(amplitude.size());
  cplx c0{1.0, 0.0};
  cplx c1{0.0, 0.0};
  for (std::size_t k = 0; k < amplitude.size(); ++k) {
    const double phi = phase.empty() ? 0.0 : phase[k];
    // exp(-i theta/2 (cos phi X + sin phi Y)), theta = s A dt
    const double half = 0.5 * s * amplitude[k] * dt;
    const double c = std::cos(half);
    const cplx off = -kI * std::sin(half);
    const cplx e_minus = std::polar(1.0, -phi);
    const cplx e_plus = std::polar(1.0, phi);
    const cplx n0 = c * c0 + off * e_minus * c1;
    const cplx n1 = off * e_plus * c0 + c * c1;
    c0 = n0;
    c1 = n1;
  }
  return std::norm(c1);
}

double mock_contrast(const MockNVModel& model, std::span<const double> amplitude,
                     std::span<const double> phase, double global_scale, Exec exec) {
  const std::vector<double> scales = ensemble_scales(model);
  const auto m = static_cast<long>(scales.size());
  std::vector<double> values(scales.size());
  if (exec == Exec::serial) {
    for (long i = 0; i < m; ++i)
      values[i] = member_contrast(amplitude, phase, global_scale * scales[i], model.pulse_duration);
  } else {
#pragma omp parallel for schedule(static)
    for (long i = 0; i < m; ++i)
      values[i] = member_contrast(amplitude, phase, global_scale * scales[i], model.pulse_duration);
  }
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(m);
}

std::vector<double> robustness_sweep(std::span<const double> amplitude,
                                     std::span<const double> phase, const MockNVModel& model,
                                     std::span<const double> scales) {
  std::vector<double> out;
  out.reserve(scales.size());
  for (double s : scales) out.push_back(mock_contrast(model, amplitude, phase, s));
  return out;
}

void split_nv_controls(const ControlsSet& controls, std::vector<double>& amplitude,
                       std::vector<double>& phase) {
  if (controls.pulses.empty() || controls.pulses.size() > 2)
    throw std::invalid_argument("the NV mock expects an amplitude pulse and an optional phase pulse");
  amplitude = controls.pulses[0];
  phase = controls.pulses.size() == 2 ? controls.pulses[1] : std::vector<double>{};
  if (!phase.empty() && phase.size() != amplitude.size())
    throw std::invalid_argument("amplitude and phase pulses must have equal length");
  for (double x : amplitude)
    if (!std::isfinite(x)) throw std::invalid_argument("non-finite amplitude sample");
  for (double x : phase)
    if (!std::isfinite(x)) throw std::invalid_argument("non-finite phase sample");
}

MockExperiment::MockExperiment(MockNVModel model, Rng rng, Exec exec)
    : model_(model), rng_(rng), exec_(exec) {
  validate(model_);
}

FoMResult MockExperiment::measure(const ControlsSet& controls) {
  FoMResult r;
  std::vector<double> amplitude, phase;
  try {
    split_nv_controls(controls, amplitude, phase);
  } catch (const std::invalid_argument& e) {
    r.status = FoMStatus::error;
    r.message = e.what();
    return r;
  }
  ++measurements_;
  elapsed_minutes_ += model_.eval_seconds / 60.0;
  double value = mock_contrast(model_, amplitude, phase, 1.0, exec_);
  value -= model_.drift_rate * elapsed_minutes_;
  if (model_.shot_noise_std > 0.0)
    value += std::normal_distribution<double>(0.0, model_.shot_noise_std)(rng_);
  r.fom = value;
  r.std = std::max(kStdFloor, model_.shot_noise_std);
  return r;
}

ServeStats mock_experiment_serve(const fs::path& dir, const MockNVModel& model, Rng rng,
                                 const ServeOptions& options) {
  Rng latency_rng(splitmix64(rng() ^ 0x6c6174656e6379ULL));
  MockExperiment experiment(model, rng);
  std::uniform_int_distribution<int> latency(options.latency_min_ms,
                                             std::max(options.latency_min_ms, options.latency_max_ms));
  ServeStats stats;
  std::string session;
  long last_iteration = 0;
  std::string last_text;
  auto idle_since = std::chrono::steady_clock::now();
  const fs::path path = dir / kControlsFile;

  while (true) {
    if (options.interrupt && options.interrupt->load()) break;
    auto text = read_file(path);
    if (text && *text != last_text) {
      last_text = *text;
      ExchangeMessage msg;
      bool parsed = true;
      try {
        msg = parse_message(*text);
      } catch (const ProtocolError&) {
        ++stats.parse_failures;
        parsed = false;
      }
      const bool fresh = parsed && (msg.session != session || msg.iteration > last_iteration);
      if (fresh) {
        idle_since = std::chrono::steady_clock::now();
        if (msg.session == session && msg.iteration != last_iteration + 1) ++stats.gaps;
        session = msg.session;
        last_iteration = msg.iteration;
        if (msg.control_flag == ControlFlag::terminate) {
          stats.terminated = true;
          break;
        }
        sleep_ms(latency(latency_rng));
        ExchangeReply reply;
        reply.session = msg.session;
        reply.iteration = msg.iteration;
        const FoMResult r = experiment.measure(msg.controls);
        reply.fom = r.fom;
        reply.std = r.std;
        reply.status = r.status;
        reply.message = r.message;
        if (r.status != FoMStatus::ok) ++stats.error_replies;
        write_reply(dir, reply);
        ++stats.processed;
      }
    }
    if (options.idle_timeout_s > 0.0 &&
        std::chrono::duration<double>(std::chrono::steady_clock::now() - idle_since).count() >
            options.idle_timeout_s)
      break;
    sleep_ms(options.poll_interval_ms);
  }

  ojson j;
  j["processed"] = stats.processed;
  j["gaps"] = stats.gaps;
  j["parse_failures"] = stats.parse_failures;
  j["error_replies"] = stats.error_replies;
  j["terminated"] = stats.terminated;
  try {
    write_atomically(dir / "mock_stats.json", j.dump(2));
  } catch (const ProtocolError&) {
  }
  return stats;
}

}  // namespace qoc
