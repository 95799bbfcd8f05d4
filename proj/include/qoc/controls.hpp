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

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qoc/expression.hpp"
#include "qoc/rng.hpp"

namespace qoc {

// Pulses, parameters and times, and the randomized truncated bases the pulses
// are expanded in.

enum class BasisKind { fourier, chebyshev, piecewise, walsh, sigmoid };
enum class ConstraintMode { cut, shrink };

struct SuperparameterDistribution {
  std::string distribution_name = "Uniform";
  double lower_limit = 0.0;
  double upper_limit = 1.0;
};

struct BasisConfig {
  BasisKind kind = BasisKind::fourier;
  int basis_vector_number = 1;
  std::optional<SuperparameterDistribution> distribution;
  int bins_number = 0;  // PiecewiseBasis only
};

/// Initial guess: either a function of time or one sample per bin.
struct InitialGuess {
  TimeFunction function;
  std::vector<double> samples;
};

struct PulseSpec {
  std::string pulse_name;
  std::string time_name;
  double upper_limit = 1.0;
  double lower_limit = -1.0;
  int bins_number = 100;
  double amplitude_variation = 1.0;
  BasisConfig basis;
  TimeFunction scaling_function = [](double) { return 1.0; };
  InitialGuess initial_guess;
  ConstraintMode constraint_mode = ConstraintMode::cut;
};

struct ParameterSpec {
  std::string parameter_name;
  double initial_value = 0.0;
  double lower_limit = 0.0;
  double upper_limit = 0.0;
  double amplitude_variation = 1.0;
};

struct TimeSpec {
  std::string time_name;
  double initial_value = 1.0;
};

/// One pulse's randomized basis for a super-iteration and the coefficients
/// being searched, dressed on top of `base_pulse`.
struct BasisExpansion {
  std::vector<double> superparameters;
  std::vector<double> coefficients;
  std::vector<double> base_pulse;
};

/// What every figure-of-merit evaluation receives.
struct ControlsSet {
  std::vector<std::string> pulse_names;
  std::vector<std::vector<double>> pulses;
  std::vector<std::vector<double>> timegrids;
  std::vector<std::string> parameter_names;
  std::vector<double> parameters;
};

/// Midpoint samples t_k = (k + 1/2) T / bins.
std::vector<double> build_timegrid(double duration, int bins_number);

/// Number of optimization coefficients the basis contributes.
int coefficient_count(const BasisConfig& cfg);

/// Draws basis_vector_number i.i.d. uniform superparameters. PiecewiseBasis
/// has none and returns an empty list.
std::vector<double> sample_superparameters(const BasisConfig& cfg, Rng& rng);

/// Value of basis function `index` at time t for a pulse of length `duration`.
/// Fourier functions come in (sin, cos) pairs, so index 2i and 2i+1 share
/// superparameter i.
double basis_function(const BasisConfig& cfg, std::span<const double> superparameters,
                      int index, double t, double duration);

/// Unconstrained pulse base + scaling(t) * sum_i c_i phi_i(t).
std::vector<double> expand_pulse(const PulseSpec& spec, const BasisExpansion& expansion,
                                 std::span<const double> timegrid, double duration);

/// expand_pulse followed by the amplitude constraint.
std::vector<double> evaluate_pulse(const PulseSpec& spec, const BasisExpansion& expansion,
                                   std::span<const double> timegrid, double duration);

/// cut clamps every sample; shrink rescales the whole pulse about the
/// mid-point of the limits by one factor s in (0, 1].
std::vector<double> apply_amplitude_constraint(std::span<const double> pulse,
                                               const PulseSpec& spec);

/// Initial guess sampled on the grid and put inside the limits.
std::vector<double> initial_base_pulse(const PulseSpec& spec, std::span<const double> timegrid);

}  // namespace qoc
