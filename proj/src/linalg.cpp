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

#include "qoc/linalg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace qoc {

namespace {

// Padé numerator coefficients b_k for p_m(x) = sum b_k x^k; q_m(x) = p_m(-x).
constexpr std::array<double, 4> kPade3 = {120.0, 60.0, 12.0, 1.0};
constexpr std::array<double, 6> kPade5 = {30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0};
constexpr std::array<double, 8> kPade7 = {17297280.0, 8648640.0, 1995840.0, 277200.0,
                                          25200.0,    1512.0,    56.0,      1.0};
constexpr std::array<double, 10> kPade9 = {17643225600.0, 8821612800.0, 2075673600.0,
                                           302702400.0,   30270240.0,   2162160.0,
                                           110880.0,      3960.0,       90.0,
                                           1.0};
constexpr std::array<double, 14> kPade13 = {
    64764752532480000.0, 32382376266240000.0, 7771770303897600.0, 1187353796428800.0,
    129060195264000.0,   10559470521600.0,    670442572800.0,     33522128640.0,
    1323241920.0,        40840800.0,          960960.0,           16380.0,
    182.0,               1.0};

// theta_m: largest 1-norm for which the order-m approximant needs no scaling.
constexpr double kTheta3 = 1.495585217958292e-2;
constexpr double kTheta5 = 2.539398330063230e-1;
constexpr double kTheta7 = 9.504178996162932e-1;
constexpr double kTheta9 = 2.097847961257068e0;
constexpr double kTheta13 = 5.371920351148152e0;

template <std::size_t N>
CMatrix pade_low_order(const CMatrix& a, const std::array<double, N>& b) {
  const auto n = a.rows();
  const CMatrix ident = CMatrix::Identity(n, n);
  const CMatrix a2 = a * a;
  // Even powers accumulate into V, odd into U (before the final multiply by A).
  CMatrix u = b[1] * ident;
  CMatrix v = b[0] * ident;
  CMatrix power = ident;
  for (std::size_t k = 2; k < N; k += 2) {
    power = power * a2;
    v += b[k] * power;
    if (k + 1 < N) u += b[k + 1] * power;
  }
  u = a * u;
  return (v - u).partialPivLu().solve(v + u);
}

CMatrix pade13_scaled(const CMatrix& a) {
  const auto& b = kPade13;
  const auto n = a.rows();
  const CMatrix ident = CMatrix::Identity(n, n);
  const CMatrix a2 = a * a;
  const CMatrix a4 = a2 * a2;
  const CMatrix a6 = a4 * a2;
  CMatrix u_inner = b[13] * a6 + b[11] * a4 + b[9] * a2;
  CMatrix u = a6 * u_inner;
  u += b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * ident;
  u = a * u;
  CMatrix v_inner = b[12] * a6 + b[10] * a4 + b[8] * a2;
  CMatrix v = a6 * v_inner;
  v += b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * ident;
  return (v - u).partialPivLu().solve(v + u);
}

}  // namespace

double one_norm(const CMatrix& a) {
  if (a.size() == 0) return 0.0;
  return a.cwiseAbs().colwise().sum().maxCoeff();
}

CMatrix expm(const CMatrix& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("expm: matrix must be square");
  if (!a.allFinite()) throw std::invalid_argument("expm: non-finite entries");
  const double norm = one_norm(a);
  if (norm <= kTheta3) return pade_low_order(a, kPade3);
  if (norm <= kTheta5) return pade_low_order(a, kPade5);
  if (norm <= kTheta7) return pade_low_order(a, kPade7);
  if (norm <= kTheta9) return pade_low_order(a, kPade9);

  int squarings = 0;
  if (norm > kTheta13) squarings = static_cast<int>(std::ceil(std::log2(norm / kTheta13)));
  const CMatrix scaled = a / std::ldexp(1.0, squarings);
  CMatrix r = pade13_scaled(scaled);
  for (int s = 0; s < squarings; ++s) r = r * r;
  return r;
}

CVector expm_action(const CMatrix& a, const CVector& v) {
  if (a.rows() != a.cols() || a.cols() != v.size())
    throw std::invalid_argument("expm_action: dimension mismatch");
  const double norm = one_norm(a);
  if (!std::isfinite(norm)) throw std::invalid_argument("expm_action: non-finite matrix");
  const int steps = std::max(1, static_cast<int>(std::ceil(norm)));
  const CMatrix b = a / static_cast<double>(steps);
  constexpr double kTol = std::numeric_limits<double>::epsilon() / 2.0;
  constexpr int kMaxTerms = 60;
  CVector out = v;
  CVector term(v.size());
  for (int s = 0; s < steps; ++s) {
    term = out;
    CVector sum = out;
    for (int k = 1; k <= kMaxTerms; ++k) {
      term = (b * term) / static_cast<double>(k);
      sum += term;
      if (term.lpNorm<1>() <= kTol * sum.lpNorm<1>()) break;
    }
    out = std::move(sum);
  }
  return out;
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

bool is_hermitian(const CMatrix& a, double tol) {
  if (a.rows() != a.cols()) return false;
  return (a - a.adjoint()).cwiseAbs().maxCoeff() <= tol * std::max(1.0, a.cwiseAbs().maxCoeff());
}

CVector vec(const CMatrix& a) {
  return Eigen::Map<const CVector>(a.data(), a.size());
}

CMatrix unvec(const CVector& v, Eigen::Index rows) {
  return Eigen::Map<const CMatrix>(v.data(), rows, v.size() / rows);
}

CMatrix pauli_x() {
  CMatrix m(2, 2);
  m << 0.0, 1.0, 1.0, 0.0;
  return m;
}

CMatrix pauli_y() {
  CMatrix m(2, 2);
  m << 0.0, -kI, kI, 0.0;
  return m;
}

CMatrix pauli_z() {
  CMatrix m(2, 2);
  m << 1.0, 0.0, 0.0, -1.0;
  return m;
}

CMatrix embed_site(const CMatrix& op, int site, int n_qubits) {
  CMatrix out = CMatrix::Identity(1, 1);
  for (int q = 0; q < n_qubits; ++q)
    out = kron(out, q == site ? op : CMatrix::Identity(2, 2));
  return out;
}

}  // namespace qoc
