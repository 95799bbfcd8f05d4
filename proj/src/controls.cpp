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

#include "qoc/controls.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qoc {

namespace {

// Walsh function of the given sequency on [0, 1): Paley function of the Gray
// code of the sequency, i.e. a product of Rademacher functions.
double walsh(int sequency, double x) {
  x = std::clamp(x, 0.0, std::nextafter(1.0, 0.0));
  const unsigned paley = static_cast<unsigned>(sequency) ^ (static_cast<unsigned>(sequency) >> 1);
  int sign = 1;
  double frac = x;
  for (unsigned bit = 0; (paley >> bit) != 0; ++bit) {
    frac *= 2.0;
    const int digit = frac >= 1.0 ? 1 : 0;
    frac -= digit;
    if (((paley >> bit) & 1U) && digit) sign = -sign;
  }
  return sign;
}

int rounded_order(double superparameter) {
  return std::max(0, static_cast<int>(std::lround(superparameter)));
}

}  // namespace

std::vector<double> build_timegrid(double duration, int bins_number) {
  if (bins_number < 2) throw std::invalid_argument("build_timegrid: bins_number must be >= 2");
  if (!(duration > 0.0)) throw std::invalid_argument("build_timegrid: duration must be > 0");
  std::vector<double> grid(static_cast<std::size_t>(bins_number));
  for (int k = 0; k < bins_number; ++k) grid[k] = (k + 0.5) * duration / bins_number;
  return grid;
}

int coefficient_count(const BasisConfig& cfg) {
  switch (cfg.kind) {
    case BasisKind::fourier: return 2 * cfg.basis_vector_number;
    case BasisKind::piecewise: return cfg.bins_number;
    default: return cfg.basis_vector_number;
  }
}

std::vector<double> sample_superparameters(const BasisConfig& cfg, Rng& rng) {
  if (cfg.kind == BasisKind::piecewise) return {};
  if (!cfg.distribution) throw std::invalid_argument("basis requires a superparameter distribution");
  const auto& dist = *cfg.distribution;
  if (dist.distribution_name != "Uniform")
    throw std::invalid_argument("unsupported superparameter distribution '" +
                                dist.distribution_name + "'");
  std::vector<double> out(static_cast<std::size_t>(cfg.basis_vector_number));
  if (dist.lower_limit == dist.upper_limit) {
    std::fill(out.begin(), out.end(), dist.lower_limit);
    return out;
  }
  std::uniform_real_distribution<double> uniform(dist.lower_limit, dist.upper_limit);
  for (double& v : out) v = uniform(rng);
  return out;
}

double basis_function(const BasisConfig& cfg, std::span<const double> superparameters, int index,
                      double t, double duration) {
  using std::numbers::pi;
  switch (cfg.kind) {
    case BasisKind::fourier: {
      const double phase = 2.0 * pi * superparameters[index / 2] * t / duration;
      return index % 2 == 0 ? std::sin(phase) : std::cos(phase);
    }
    case BasisKind::chebyshev: {
      const double x = std::clamp(2.0 * t / duration - 1.0, -1.0, 1.0);
      return std::cos(rounded_order(superparameters[index]) * std::acos(x));
    }
    case BasisKind::walsh:
      return walsh(rounded_order(superparameters[index]), t / duration);
    case BasisKind::sigmoid: {
      const auto& dist = *cfg.distribution;
      const double range = dist.upper_limit - dist.lower_limit;
      const double unit = range > 0.0 ? (superparameters[index] - dist.lower_limit) / range : 0.5;
      const double center = unit * duration;
      const double width = duration / (4.0 * cfg.basis_vector_number);
      return 1.0 / (1.0 + std::exp(-(t - center) / width));
    }
    case BasisKind::piecewise: {
      // Coefficient j spans an equal share of the time axis.
      const int segment = std::min(cfg.bins_number - 1,
                                   static_cast<int>(std::floor(t / duration * cfg.bins_number)));
      return segment == index ? 1.0 : 0.0;
    }
  }
  return 0.0;
}

std::vector<double> expand_pulse(const PulseSpec& spec, const BasisExpansion& expansion,
                                 std::span<const double> timegrid, double duration) {
  const auto bins = static_cast<std::size_t>(spec.bins_number);
  if (timegrid.size() != bins) throw std::invalid_argument("evaluate_pulse: timegrid length mismatch");
  if (expansion.base_pulse.size() != bins)
    throw std::invalid_argument("evaluate_pulse: base_pulse length mismatch");
  const int n_coeff = coefficient_count(spec.basis);
  if (static_cast<int>(expansion.coefficients.size()) != n_coeff)
    throw std::invalid_argument("evaluate_pulse: coefficient count does not match the basis");

  std::vector<double> pulse = expansion.base_pulse;
  if (spec.basis.kind == BasisKind::piecewise && spec.basis.bins_number == spec.bins_number) {
    for (std::size_t k = 0; k < bins; ++k)
      pulse[k] += spec.scaling_function(timegrid[k]) * expansion.coefficients[k];
    return pulse;
  }
  for (std::size_t k = 0; k < bins; ++k) {
    double sum = 0.0;
    for (int i = 0; i < n_coeff; ++i)
      sum += expansion.coefficients[i] *
             basis_function(spec.basis, expansion.superparameters, i, timegrid[k], duration);
    pulse[k] += spec.scaling_function(timegrid[k]) * sum;
  }
  return pulse;
}

std::vector<double> evaluate_pulse(const PulseSpec& spec, const BasisExpansion& expansion,
                                   std::span<const double> timegrid, double duration) {
  return apply_amplitude_constraint(expand_pulse(spec, expansion, timegrid, duration), spec);
}

std::vector<double> apply_amplitude_constraint(std::span<const double> pulse,
                                               const PulseSpec& spec) {
  const double lo = spec.lower_limit;
  const double hi = spec.upper_limit;
  std::vector<double> out(pulse.begin(), pulse.end());
  if (spec.constraint_mode == ConstraintMode::shrink) {
    const double mid = 0.5 * (hi + lo);
    const double allowed = 0.5 * (hi - lo);
    double factor = 1.0;
    for (double u : pulse) {
      const double dev = std::fabs(u - mid);
      if (dev > allowed) factor = std::min(factor, allowed / dev);
    }
    if (factor < 1.0)
      for (double& u : out) u = mid + factor * (u - mid);
  }
  // Also absorbs the last-ulp overshoot of the shrink rescaling.
  for (double& u : out) u = std::clamp(u, lo, hi);
  return out;
}

std::vector<double> initial_base_pulse(const PulseSpec& spec, std::span<const double> timegrid) {
  std::vector<double> guess(timegrid.size(), 0.0);
  if (!spec.initial_guess.samples.empty()) {
    if (spec.initial_guess.samples.size() != timegrid.size())
      throw std::invalid_argument("initial guess sample count does not match bins_number");
    guess = spec.initial_guess.samples;
  } else if (spec.initial_guess.function) {
    for (std::size_t k = 0; k < timegrid.size(); ++k)
      guess[k] = spec.initial_guess.function(timegrid[k]);
  }
  return apply_amplitude_constraint(guess, spec);
}

}  // namespace qoc
