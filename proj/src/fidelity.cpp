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

#include "qoc/fidelity.hpp"

#include <cmath>
#include <stdexcept>

namespace qoc {

namespace {

constexpr double kPsdTolerance = 1e-10;

CMatrix psd_sqrt(const CMatrix& m, const char* which) {
  const CMatrix herm = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(herm);
  Eigen::VectorXd values = eig.eigenvalues();
  if (values.minCoeff() < -kPsdTolerance)
    throw std::invalid_argument(std::string("state_fidelity: ") + which +
                                " is not positive semidefinite");
  values = values.cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * values.cast<cplx>().asDiagonal() * eig.eigenvectors().adjoint();
}

void require_square_pair(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows())
    throw std::invalid_argument("fidelity: operands must be square and of equal dimension");
}

}  // namespace

double fom_hilbert_schmidt(const CMatrix& rho_t, const CMatrix& rho_aim) {
  require_square_pair(rho_t, rho_aim);
  // tr(A^dagger B) = sum conj(A_ij) B_ij
  return (rho_t.conjugate().cwiseProduct(rho_aim)).sum().real();
}

double state_fidelity(const CMatrix& rho_t, const CMatrix& rho_aim) {
  require_square_pair(rho_t, rho_aim);
  const CMatrix root = psd_sqrt(rho_t, "rho_T");
  // Validates rho_aim as well.
  psd_sqrt(rho_aim, "rho_aim");
  const CMatrix inner = root * rho_aim * root;
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(0.5 * (inner + inner.adjoint()));
  const double trace_sqrt = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
  return trace_sqrt * trace_sqrt;
}

cplx gate_overlap(const CMatrix& u_t, const CMatrix& u_aim) {
  require_square_pair(u_t, u_aim);
  return (u_aim.conjugate().cwiseProduct(u_t)).sum();
}

double gate_fidelity(const CMatrix& u_t, const CMatrix& u_aim) {
  const double n = static_cast<double>(u_t.rows());
  return std::norm(gate_overlap(u_t, u_aim)) / (n * n);
}

double pulse_energy(std::span<const std::vector<double>> pulses, double duration) {
  double energy = 0.0;
  for (const auto& p : pulses) {
    if (p.empty()) continue;
    const double dt = duration / static_cast<double>(p.size());
    for (double u : p) energy += u * u * dt;
  }
  return energy;
}

double power_penalty_fom(double fidelity, double energy, double k) {
  return k * (1.0 - fidelity) + (1.0 - k) * energy;
}

}  // namespace qoc
