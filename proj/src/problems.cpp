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

#include "qoc/problems.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

#include "qoc/closed_loop.hpp"
#include "qoc/fidelity.hpp"

namespace qoc {

namespace {

constexpr double kStdFloor = 1e-9;

CMatrix zz_sum(int n, int distance) {
  const Eigen::Index dim = Eigen::Index{1} << n;
  CMatrix out = CMatrix::Zero(dim, dim);
  for (int j = 0; j + distance < n; ++j)
    out += embed_site(pauli_z(), j, n) * embed_site(pauli_z(), j + distance, n);
  return out;
}

void validate(const IsingChainModel& m) {
  if (m.n_qubits < 3)
    throw std::invalid_argument("Ising chain needs at least 3 qubits (next-nearest coupling)");
  if (m.n_qubits > kMaxIsingQubits)
    throw std::invalid_argument(fmt::format(
        "Ising chain with {} qubits exceeds the dense-matrix limit of {}; reduce n_qubits",
        m.n_qubits, kMaxIsingQubits));
  if (!(m.T > 0.0)) throw std::invalid_argument("Ising duration T must be positive");
  if (m.noise_std < 0.0) throw std::invalid_argument("Ising noise_std must be non-negative");
  if (m.bins < 1) throw std::invalid_argument("Ising bins must be positive");
}

// Pure-state propagation; returns |<target|psi(T)>|^2.
double propagate_overlap(const CMatrix& drift, const CMatrix& control, const std::vector<double>& u,
                         double duration, Eigen::Index target) {
  const double dt = duration / static_cast<double>(u.size());
  CVector psi = CVector::Zero(drift.rows());
  psi(0) = 1.0;
  for (double uk : u) psi = expm_action((-kI * dt) * (drift + uk * control), psi);
  return std::norm(psi(target));
}

const std::vector<double>& single_pulse(const ControlsSet& controls, std::size_t bins) {
  if (controls.pulses.size() != 1)
    throw std::invalid_argument("this problem takes exactly one pulse");
  const auto& u = controls.pulses.front();
  if (u.size() != bins)
    throw std::invalid_argument(
        fmt::format("pulse has {} samples, the problem expects {}", u.size(), bins));
  for (double x : u)
    if (!std::isfinite(x)) throw std::invalid_argument("non-finite pulse amplitude");
  return u;
}

}  // namespace

IsingHamiltonians build_ising_hamiltonians(const IsingChainModel& model) {
  validate(model);
  IsingHamiltonians h;
  const int n = model.n_qubits;
  h.nearest = zz_sum(n, 1);
  h.next_nearest = zz_sum(n, 2);
  h.drift = -model.J * h.nearest - model.g * h.next_nearest;
  const Eigen::Index dim = Eigen::Index{1} << n;
  h.control = CMatrix::Zero(dim, dim);
  for (int j = 0; j < n; ++j) h.control += embed_site(pauli_x(), j, n);
  return h;
}

CMatrix uniform_basis_state(int n_qubits, bool excited) {
  const Eigen::Index dim = Eigen::Index{1} << n_qubits;
  CMatrix rho = CMatrix::Zero(dim, dim);
  const Eigen::Index i = excited ? dim - 1 : 0;
  rho(i, i) = 1.0;
  return rho;
}

IsingEvaluator::IsingEvaluator(IsingChainModel model, Rng rng, Exec exec)
    : model_(model), ops_(build_ising_hamiltonians(model)), rng_(rng), exec_(exec) {
  quantum_.hamiltonian.drift = ops_.drift;
  quantum_.hamiltonian.controls = {ops_.control};
  quantum_.rho0 = uniform_basis_state(model.n_qubits, false);
  quantum_.rho_aim = uniform_basis_state(model.n_qubits, true);
}

double IsingEvaluator::fidelity_at(std::span<const std::vector<double>> pulses, double g) const {
  const CMatrix drift = -model_.J * ops_.nearest - g * ops_.next_nearest;
  return propagate_overlap(drift, ops_.control, pulses.front(), model_.T, drift.rows() - 1);
}

FoMResult IsingEvaluator::get_fom(const ControlsSet& controls) {
  const auto& u = single_pulse(controls, static_cast<std::size_t>(model_.bins));
  std::span<const std::vector<double>> pulses(&u, 1);
  FoMResult r;
  if (model_.noise_std <= 0.0) {
    r.fom = fidelity_at(pulses, model_.g);
    return r;
  }
  std::normal_distribution<double> noise(0.0, model_.noise_std);
  const double dg = noise(rng_);
  // The noisy reading plus sigma points at g and g +- noise_std, which give
  // the first- and second-order spread of F.
  const double h = model_.noise_std;
  const std::array<double, 4> couplings{model_.g + dg, model_.g, model_.g + h, model_.g - h};
  std::array<double, 4> f{};
  if (exec_ == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (int i = 0; i < 4; ++i) f[static_cast<std::size_t>(i)] = fidelity_at(pulses, couplings[static_cast<std::size_t>(i)]);
  } else {
    for (std::size_t i = 0; i < 4; ++i) f[i] = fidelity_at(pulses, couplings[i]);
  }
  r.fom = f[0];
  const double slope = 0.5 * (f[2] - f[3]);
  const double curvature = f[2] - 2.0 * f[1] + f[3];
  r.std = std::max(kStdFloor, std::sqrt(slope * slope + 0.5 * curvature * curvature));
  return r;
}

FoMResult ising_fom(const IsingChainModel& model, const ControlsSet& controls, Rng& rng) {
  IsingEvaluator eval(model, rng, Exec::serial);
  FoMResult r = eval.get_fom(controls);
  // Advance the caller's stream by the single draw the evaluator consumed.
  if (model.noise_std > 0.0) std::normal_distribution<double>(0.0, model.noise_std)(rng);
  return r;
}

QubitEvaluator::QubitEvaluator(double duration, double detuning) : duration_(duration) {
  if (!(duration > 0.0)) throw std::invalid_argument("qubit duration must be positive");
  quantum_.hamiltonian.drift = 0.5 * detuning * pauli_z();
  quantum_.hamiltonian.controls = {0.5 * pauli_x()};
  quantum_.rho0 = uniform_basis_state(1, false);
  quantum_.rho_aim = uniform_basis_state(1, true);
}

FoMResult QubitEvaluator::get_fom(const ControlsSet& controls) {
  if (controls.pulses.size() != 1)
    throw std::invalid_argument("the qubit problem takes exactly one pulse");
  const auto props =
      slice_propagators(quantum_.hamiltonian, controls.pulses, duration_, Exec::serial);
  FoMResult r;
  r.fom = fom_hilbert_schmidt(evolve_state(quantum_.rho0, props), quantum_.rho_aim);
  return r;
}

PowerPenaltyEvaluator::PowerPenaltyEvaluator(std::unique_ptr<FoMEvaluator> inner, double k,
                                             double duration)
    : inner_(std::move(inner)), k_(k), duration_(duration) {
  if (!inner_) throw std::invalid_argument("power penalty needs an inner evaluator");
  if (k < 0.0 || k > 1.0) throw std::invalid_argument("power penalty weight k must be in [0, 1]");
}

FoMResult PowerPenaltyEvaluator::get_fom(const ControlsSet& controls) {
  FoMResult r = inner_->get_fom(controls);
  if (r.status != FoMStatus::ok) return r;
  r.fom = power_penalty_fom(r.fom, pulse_energy(controls.pulses, duration_), k_);
  if (r.std) r.std = k_ * *r.std;
  return r;
}

namespace {

double value_or(const ProblemSpec& p, const char* key, double fallback) {
  auto it = p.values.find(key);
  return it == p.values.end() ? fallback : it->second;
}

}  // namespace

std::unique_ptr<FoMEvaluator> make_builtin_evaluator(const std::string& name,
                                                     const ProblemSpec& problem, double duration,
                                                     int bins, std::uint64_t seed) {
  if (name == "ising" || name == "ising_noisy") {
    IsingChainModel m;
    m.n_qubits = static_cast<int>(value_or(problem, "n_qubits", 5));
    m.J = value_or(problem, "J", 1.0);
    m.g = value_or(problem, "g", 2.0);
    m.noise_std = value_or(problem, "noise_std", name == "ising_noisy" ? 0.1 : 0.0);
    m.T = duration;
    m.bins = bins;
    return std::make_unique<IsingEvaluator>(m, child_rng(seed, Stream::evaluator, 0));
  }
  if (name == "qubit")
    return std::make_unique<QubitEvaluator>(duration, value_or(problem, "detuning", 0.0));
  if (name == "mock_nv") {
    MockNVModel m;
    m.rabi_inhomogeneity_std = value_or(problem, "inhomogeneity", m.rabi_inhomogeneity_std);
    m.drift_rate = value_or(problem, "drift", m.drift_rate);
    m.shot_noise_std = value_or(problem, "noise", m.shot_noise_std);
    m.ensemble_size = static_cast<int>(value_or(problem, "ensemble_size", m.ensemble_size));
    m.eval_seconds = value_or(problem, "eval_seconds", m.eval_seconds);
    return std::make_unique<MockNVEvaluator>(m, child_rng(seed, Stream::mock_experiment, 0));
  }
  throw std::invalid_argument(
      fmt::format("unknown built-in problem '{}' (known: ising, ising_noisy, qubit, mock_nv)", name));
}

}  // namespace qoc
