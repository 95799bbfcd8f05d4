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

#include <complex>

#include <Eigen/Dense>

namespace qoc {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

inline constexpr cplx kI{0.0, 1.0};

/// Dense matrix exponential by scaling and squaring with diagonal Padé
/// approximants of order 3, 5, 7, 9 or 13. The order and the number of
/// squarings are picked from the 1-norm so the backward error stays at unit
/// roundoff (Higham 2005 thresholds).
CMatrix expm(const CMatrix& a);

/// exp(a) v without forming exp(a): a is split into s = ceil(|a|_1) equal
/// parts and each factor's truncated Taylor series is summed until a term
/// drops below unit roundoff relative to the partial sum.
CVector expm_action(const CMatrix& a, const CVector& v);

/// Kronecker product a ⊗ b.
CMatrix kron(const CMatrix& a, const CMatrix& b);

/// Induced 1-norm (max absolute column sum).
double one_norm(const CMatrix& a);

bool is_hermitian(const CMatrix& a, double tol = 1e-12);

/// Column-stacking vectorization, vec(A B C) = (Cᵀ ⊗ A) vec(B).
CVector vec(const CMatrix& a);
CMatrix unvec(const CVector& v, Eigen::Index rows);

/// Pauli matrices and single-site embedding into an n-qubit register
/// (site 0 is the most significant bit).
CMatrix pauli_x();
CMatrix pauli_y();
CMatrix pauli_z();
CMatrix embed_site(const CMatrix& op, int site, int n_qubits);

}  // namespace qoc
