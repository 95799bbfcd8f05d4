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

#include <functional>
#include <span>
#include <vector>

namespace qoc {

/// Writes the gradient into `grad` and returns the function value.
using ValueAndGradient = std::function<double(std::span<const double> x, std::span<double> grad)>;

struct BoxLbfgsOptions {
  int memory = 10;
  double ftol = 2.2e-9;
  double gtol = 1e-5;
  long max_iterations = 15000;
  long max_evaluations = 150000;
  int max_line_search = 40;
  /// Polled with the current f at the start and after each accepted step;
  /// returning true stops with `interrupted`.
  std::function<bool(double f)> stop_requested;
};

enum class BoxLbfgsTermination { ftol, gtol, max_iterations, max_evaluations, line_search, interrupted };

const char* to_string(BoxLbfgsTermination t);

struct BoxLbfgsResult {
  std::vector<double> x;
  double f = 0.0;
  long iterations = 0;
  long evaluations = 0;
  BoxLbfgsTermination termination = BoxLbfgsTermination::max_iterations;
  /// f and projected-gradient max-norm after each accepted iteration.
  std::vector<double> f_history;
  std::vector<double> pg_history;
};

/// max_i |clamp(x_i - g_i) - x_i|.
double projected_gradient_norm(std::span<const double> x, std::span<const double> g,
                               std::span<const double> lower, std::span<const double> upper);

/// Projected limited-memory BFGS for min f(x) s.t. lower <= x <= upper.
/// Search directions use the two-loop recursion restricted to the variables
/// not pinned at an active bound; the step length comes from a strong-Wolfe
/// search (sufficient decrease 1e-4, curvature 0.9) along the projected path
/// P(x + a d), extrapolating by doubling and zooming by safeguarded cubic
/// interpolation.
/// Stops when (f_k - f_{k+1}) <= ftol * max(|f_k|, |f_{k+1}|, 1), when the
/// projected-gradient max-norm is <= gtol, or on an iteration/evaluation cap.
BoxLbfgsResult minimize_box(const ValueAndGradient& fg, std::span<const double> x0,
                            std::span<const double> lower, std::span<const double> upper,
                            const BoxLbfgsOptions& options = {});

}  // namespace qoc
