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

// Independent reference implementations used as test oracles. None of these
// call into the library's numerical kernels.

#include <functional>
#include <random>
#include <span>
#include <vector>

#include "qoc/linalg.hpp"

namespace oracle {

using qoc::CMatrix;
using qoc::CVector;
using qoc::cplx;

/// exp(-i t H) for Hermitian H by eigendecomposition.
CMatrix expm_hermitian(const CMatrix& h, double t);

/// exp(A) by scaling and squaring on a long Taylor series.
CMatrix expm_taylor(const CMatrix& a);

CMatrix kron_loops(const CMatrix& a, const CMatrix& b);

CMatrix random_hermitian(int d, std::mt19937_64& rng, double scale = 1.0);
CMatrix random_unitary(int d, std::mt19937_64& rng);
/// Random full-rank density matrix (Ginibre construction).
CMatrix random_density(int d, std::mt19937_64& rng);
CMatrix random_pure_state(int d, std::mt19937_64& rng);

/// Central finite-difference gradient.
std::vector<double> fd_gradient(const std::function<double(const std::vector<double>&)>& f,
                                const std::vector<double>& x, double h);

/// Ising drift and control for n spins built from bit arithmetic on basis
/// labels (bit n-1-j of the label is spin j).
CMatrix ising_drift_bits(int n, double J, double g);
CMatrix ising_control_bits(int n);

/// Textbook Nelder-Mead (Lagarias et al. acceptance rules, stable ordering by
/// value then creation). Returns every evaluated value in call order.
std::vector<double> reference_nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                                          std::vector<double> x0, const std::vector<double>& offsets,
                                          bool adaptive, int max_evals);

struct GridMin {
  double x = 0.0;
  double y = 0.0;
  double f = 0.0;
};
GridMin brute_force_2d(const std::function<double(double, double)>& f, double lo, double hi, int steps);

double rosenbrock(std::span<const double> x);
double sphere(std::span<const double> x);

/// P(N(a, sa) > N(b, sb)) for independent normals.
double prob_greater(double a, double sa, double b, double sb);

/// Two-level Rabi transfer for a resonant rectangular drive of area theta.
inline double rabi_population(double theta) {
  const double s = std::sin(theta / 2.0);
  return s * s;
}

}  // namespace oracle
