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
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qoc/box_lbfgs.hpp"
#include "qoc/clock.hpp"
#include "qoc/linalg.hpp"
#include "qoc/propagation.hpp"

namespace qoc {

/// State transfer (rho0 -> rho_aim, Hilbert-Schmidt overlap) or, when u_aim
/// is set, gate synthesis (|tr(U_aim^dagger U)|^2 / d^2).
struct GrapeProblem {
  PiecewiseHamiltonian hamiltonian;
  CMatrix rho0;
  CMatrix rho_aim;
  std::optional<CMatrix> u_aim;
  double duration = 1.0;
  int slices = 1;
};

/// Throws std::invalid_argument on non-Hermitian Hamiltonians, mismatched
/// dimensions, non-unit-trace or non-PSD states, N < 1 or T <= 0.
void validate_problem(const GrapeProblem& problem);

/// Figure of merit of `pulses` (one array of length N per control).
double grape_fom(const GrapeProblem& problem, std::span<const std::vector<double>> pulses,
                 Exec exec = Exec::parallel);

struct GrapeGradient {
  double fom = 0.0;
  /// gradient[j][k] = dF / du_j[k]
  std::vector<std::vector<double>> gradient;
};

/// Exact gradient by the auxiliary-matrix method: the upper-right block of
/// exp(-i dt [[H_k, Hc_j], [0, H_k]]) is dU_k/du_j[k]. Forward states and
/// backward co-states are built once per call.
GrapeGradient grape_gradient(const GrapeProblem& problem,
                             std::span<const std::vector<double>> pulses,
                             Exec exec = Exec::parallel);

struct GrapeSettings {
  long max_iterations = 100;
  double ftol = 1e-6;
  double gtol = 1e-6;
  int memory = 10;
  /// Per-control amplitude bounds.
  std::vector<double> lower;
  std::vector<double> upper;
  /// Per-control scale of the random kick applied to a stationary guess.
  std::vector<double> amplitude_variation;
  std::uint64_t seed = 0;
  Exec exec = Exec::parallel;
  bool perturb_stationary_guess = true;
  /// Checked once per quasi-Newton iteration, never inside a line search.
  const std::atomic<bool>* interrupt = nullptr;
  std::optional<double> fom_goal;
  std::optional<double> time_limit_minutes;
  const Clock* clock = nullptr;  // null: wall clock
};

enum class GrapeTermination { ftol, gtol, max_eval, line_search, interrupted, goal_reached, time_limit };

const char* to_string(GrapeTermination t);

struct GrapeResult {
  std::vector<std::vector<double>> optimal_pulses;
  double final_fom = 0.0;
  long iterations = 0;
  long evaluations = 0;
  std::vector<double> fom_history;
  std::vector<double> gradient_norm_history;
  GrapeTermination termination = GrapeTermination::max_eval;
  bool guess_perturbed = false;
};

/// Maximizes the figure of merit with the projected L-BFGS loop. A guess at
/// which the projected gradient already vanishes while F < 1 - 1e-6 (e.g.
/// u = 0 between orthogonal states) is kicked by Uniform(-amplitude_variation, amplitude_variation)
/// per sample, seeded, before the loop starts.
GrapeResult run_grape(const GrapeProblem& problem, std::span<const std::vector<double>> guess,
                      const GrapeSettings& settings);

}  // namespace qoc
