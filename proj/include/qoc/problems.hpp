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

#include <map>
#include <memory>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>

#include "qoc/controls.hpp"
#include "qoc/direct_search.hpp"
#include "qoc/linalg.hpp"
#include "qoc/propagation.hpp"
#include "qoc/rng.hpp"

namespace qoc {

enum class FoMStatus { ok, error, abort };

struct FoMResult {
  double fom = 0.0;
  std::optional<double> std;
  FoMStatus status = FoMStatus::ok;
  std::string message;
};

/// White-box description of a problem, for gradient-based optimization.
struct QuantumModel {
  PiecewiseHamiltonian hamiltonian;
  CMatrix rho0;
  CMatrix rho_aim;
  std::optional<CMatrix> u_aim;
};

/// Anything that turns a set of controls into a figure of merit: a built-in
/// model, an external process, a wrapper around either.
class FoMEvaluator {
 public:
  virtual ~FoMEvaluator() = default;
  virtual FoMResult get_fom(const ControlsSet& controls) = 0;
  /// Whether every result carries a standard deviation.
  virtual bool provides_std() const { return false; }
  /// Model access for gradient-based algorithms; null for black boxes.
  virtual const QuantumModel* model() const { return nullptr; }
  /// Called once after the optimization ends (e.g. to stop an external loop).
  virtual void finish() {}
};

class EvaluatorError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Ising chain: H = -J sum Z_j Z_{j+1} - g sum Z_j Z_{j+2} + u(t) sum X_j,
// open boundaries, |0...0> -> |1...1>.

struct IsingChainModel {
  int n_qubits = 5;
  double J = 1.0;
  double g = 2.0;
  double noise_std = 0.0;
  double T = 1.0;
  int bins = 100;
};

struct IsingHamiltonians {
  CMatrix nearest;       // sum Z_j Z_{j+1}
  CMatrix next_nearest;  // sum Z_j Z_{j+2}
  CMatrix drift;         // -J nearest - g next_nearest
  CMatrix control;       // sum X_j
};

inline constexpr int kMaxIsingQubits = 12;

IsingHamiltonians build_ising_hamiltonians(const IsingChainModel& model);

/// Basis state |b...b> of n qubits as a density matrix.
CMatrix uniform_basis_state(int n_qubits, bool excited);

class IsingEvaluator final : public FoMEvaluator {
 public:
  IsingEvaluator(IsingChainModel model, Rng rng, Exec exec = Exec::parallel);

  /// One evaluation; with noise_std > 0 the next-nearest coupling is
  /// perturbed by a fresh Normal(0, noise_std) draw and a standard deviation
  /// estimate is attached (sigma-point spread of F over g +- noise_std). The
  /// parallel path runs the four propagations concurrently.
  FoMResult get_fom(const ControlsSet& controls) override;
  bool provides_std() const override { return model_.noise_std > 0.0; }
  const QuantumModel* model() const override { return &quantum_; }

  /// Noiseless overlap fidelity for coupling g.
  double fidelity_at(std::span<const std::vector<double>> pulses, double g) const;
  const IsingChainModel& params() const { return model_; }

 private:
  IsingChainModel model_;
  IsingHamiltonians ops_;
  QuantumModel quantum_;
  Rng rng_;
  Exec exec_;
};

/// Free function form of the noisy evaluation.
FoMResult ising_fom(const IsingChainModel& model, const ControlsSet& controls, Rng& rng);

/// Single qubit: H = (detuning/2) Z + u(t) X/2, |0> -> |1>.
class QubitEvaluator final : public FoMEvaluator {
 public:
  QubitEvaluator(double duration, double detuning = 0.0);
  FoMResult get_fom(const ControlsSet& controls) override;
  const QuantumModel* model() const override { return &quantum_; }

 private:
  double duration_;
  QuantumModel quantum_;
};

/// k (1 - F) + (1 - k) * integral |u|^2 dt around another evaluator; to be
/// minimized.
class PowerPenaltyEvaluator final : public FoMEvaluator {
 public:
  PowerPenaltyEvaluator(std::unique_ptr<FoMEvaluator> inner, double k, double duration);
  FoMResult get_fom(const ControlsSet& controls) override;
  bool provides_std() const override { return inner_->provides_std(); }
  const QuantumModel* model() const override { return inner_->model(); }
  void finish() override { inner_->finish(); }

 private:
  std::unique_ptr<FoMEvaluator> inner_;
  double k_;
  double duration_;
};

/// Problem section of the configuration (built-in evaluators only).
struct ProblemSpec {
  std::string name = "ising";
  std::map<std::string, double> values;
};

/// Creates a built-in evaluator: "ising", "ising_noisy" (noise_std default
/// 0.1), "qubit", "mock_nv" (see closed_loop.hpp).
std::unique_ptr<FoMEvaluator> make_builtin_evaluator(const std::string& name,
                                                     const ProblemSpec& problem, double duration,
                                                     int bins, std::uint64_t seed);

}  // namespace qoc
