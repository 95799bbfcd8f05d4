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

/// Re tr(rho_T^dagger rho_aim). Equals the overlap fidelity for pure states.
double fom_hilbert_schmidt(const CMatrix& rho_t, const CMatrix& rho_aim);

/// Uhlmann fidelity (tr sqrt(sqrt(rho_T) rho_aim sqrt(rho_T)))^2. Throws
/// std::invalid_argument if either input has an eigenvalue below -1e-10.
double state_fidelity(const CMatrix& rho_t, const CMatrix& rho_aim);

/// Raw overlap tr(U_aim^dagger U_T).
cplx gate_overlap(const CMatrix& u_t, const CMatrix& u_aim);

/// |tr(U_aim^dagger U_T)|^2 / N^2, insensitive to global phase.
double gate_fidelity(const CMatrix& u_t, const CMatrix& u_aim);

/// Midpoint-rule control energy sum_j sum_k |u_j[k]|^2 dt.
double pulse_energy(std::span<const std::vector<double>> pulses, double duration);

/// k (1 - F) + (1 - k) * energy. A cost: lower is better.
double power_penalty_fom(double fidelity, double energy, double k);

}  // namespace qoc
