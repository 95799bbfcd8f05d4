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

#include <span>
#include <vector>

#include "qoc/linalg.hpp"

namespace qoc {

/// Execution policy for the per-slice kernels. `serial` is the reference
/// implementation; `parallel` distributes slices over OpenMP threads and
/// assembles results in slice order, so both produce identical output.
enum class Exec { serial, parallel };

/// Piecewise-constant Hamiltonian H_k = H0_k + sum_j u_j[k] Hc_j (hbar = 1).
/// `drift_slices`, when non-empty, supplies one drift matrix per slice and
/// replaces `drift`.
struct PiecewiseHamiltonian {
  CMatrix drift;
  std::vector<CMatrix> controls;
  std::vector<CMatrix> drift_slices;

  CMatrix at_slice(std::size_t k, std::span<const std::vector<double>> pulses) const;
};

/// U_k = exp(-i dt H_k), dt = duration / N, for every slice k.
std::vector<CMatrix> slice_propagators(const PiecewiseHamiltonian& h,
                                       std::span<const std::vector<double>> pulses,
                                       double duration, Exec exec = Exec::parallel);

/// Time-ordered product U_{N-1} ... U_0.
CMatrix total_propagator(std::span<const CMatrix> propagators);

/// rho(T) = U rho0 U^dagger applied slice by slice.
CMatrix evolve_state(const CMatrix& rho0, std::span<const CMatrix> propagators);

/// Same evolution in Liouville space: vec(rho) <- (conj(U_k) ⊗ U_k) vec(rho)
/// with column-stacking vec.
CMatrix evolve_state_vectorized(const CMatrix& rho0, std::span<const CMatrix> propagators);

/// Validates pulse shapes against the Hamiltonian; throws std::invalid_argument.
void check_pulses(const PiecewiseHamiltonian& h, std::span<const std::vector<double>> pulses);

}  // namespace qoc
