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

#include "qoc/propagation.hpp"

#include <cmath>
#include <stdexcept>

namespace qoc {

CMatrix PiecewiseHamiltonian::at_slice(std::size_t k,
                                       std::span<const std::vector<double>> pulses) const {
  CMatrix h = drift_slices.empty() ? drift : drift_slices[k];
  for (std::size_t j = 0; j < controls.size(); ++j) h += pulses[j][k] * controls[j];
  return h;
}

void check_pulses(const PiecewiseHamiltonian& h, std::span<const std::vector<double>> pulses) {
  if (pulses.size() != h.controls.size())
    throw std::invalid_argument("one pulse per control Hamiltonian is required");
  if (pulses.empty()) throw std::invalid_argument("at least one control is required");
  const std::size_t n = pulses.front().size();
  if (n == 0) throw std::invalid_argument("pulses must have at least one slice");
  for (const auto& p : pulses) {
    if (p.size() != n) throw std::invalid_argument("all pulses must have the same slice count");
    for (double u : p)
      if (!std::isfinite(u)) throw std::invalid_argument("non-finite pulse amplitude");
  }
  if (!h.drift_slices.empty() && h.drift_slices.size() != n)
    throw std::invalid_argument("drift_slices must have one matrix per slice");
}

std::vector<CMatrix> slice_propagators(const PiecewiseHamiltonian& h,
                                       std::span<const std::vector<double>> pulses,
                                       double duration, Exec exec) {
  check_pulses(h, pulses);
  const auto n = static_cast<long>(pulses.front().size());
  const double dt = duration / static_cast<double>(n);
  std::vector<CMatrix> out(static_cast<std::size_t>(n));
  if (exec == Exec::serial) {
    for (long k = 0; k < n; ++k) out[k] = expm((-kI * dt) * h.at_slice(k, pulses));
  } else {
#pragma omp parallel for schedule(static)
    for (long k = 0; k < n; ++k) out[k] = expm((-kI * dt) * h.at_slice(k, pulses));
  }
  return out;
}

CMatrix total_propagator(std::span<const CMatrix> propagators) {
  if (propagators.empty()) throw std::invalid_argument("no propagators");
  CMatrix u = propagators.front();
  for (std::size_t k = 1; k < propagators.size(); ++k) u = propagators[k] * u;
  return u;
}

CMatrix evolve_state(const CMatrix& rho0, std::span<const CMatrix> propagators) {
  CMatrix rho = rho0;
  for (const auto& u : propagators) rho = u * rho * u.adjoint();
  return rho;
}

CMatrix evolve_state_vectorized(const CMatrix& rho0, std::span<const CMatrix> propagators) {
  CVector v = vec(rho0);
  for (const auto& u : propagators) v = kron(u.conjugate(), u) * v;
  return unvec(v, rho0.rows());
}

}  // namespace qoc
