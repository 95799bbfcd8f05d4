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

#include "qoc/box_lbfgs.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>

#include <Eigen/Dense>

namespace qoc {

namespace {

using Vec = Eigen::VectorXd;

constexpr double kArmijo = 1e-4;
constexpr double kWolfe = 0.9;

struct Pair {
  Vec s;
  Vec y;
  double rho;
};

Vec to_vec(std::span<const double> v) {
  return Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::span<const double> view(const Vec& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

/// Minimizer of the cubic matching values and slopes at a and b; NaN when
/// it does not exist.
double cubic_minimizer(double a, double fa, double da, double b, double fb, double db) {
  if (a == b) return std::nan("");
  const double d1 = da + db - 3.0 * (fa - fb) / (a - b);
  const double disc = d1 * d1 - da * db;
  if (disc < 0.0) return std::nan("");
  const double d2 = std::copysign(std::sqrt(disc), b - a);
  const double denom = db - da + 2.0 * d2;
  if (denom == 0.0) return std::nan("");
  return b - (b - a) * (db + d2 - d1) / denom;
}

}  // namespace

const char* to_string(BoxLbfgsTermination t) {
  switch (t) {
    case BoxLbfgsTermination::ftol: return "ftol";
    case BoxLbfgsTermination::gtol: return "gtol";
    case BoxLbfgsTermination::max_iterations: return "max_eval";
    case BoxLbfgsTermination::max_evaluations: return "max_fun";
    case BoxLbfgsTermination::line_search: return "line_search";
    case BoxLbfgsTermination::interrupted: return "interrupted";
  }
  return "unknown";
}

double projected_gradient_norm(std::span<const double> x, std::span<const double> g,
                               std::span<const double> lower, std::span<const double> upper) {
  double m = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double p = std::clamp(x[i] - g[i], lower[i], upper[i]);
    m = std::max(m, std::abs(p - x[i]));
  }
  return m;
}

BoxLbfgsResult minimize_box(const ValueAndGradient& fg, std::span<const double> x0,
                            std::span<const double> lower, std::span<const double> upper,
                            const BoxLbfgsOptions& options) {
  const auto n = static_cast<Eigen::Index>(x0.size());
  if (n == 0) throw std::invalid_argument("minimize_box: empty start point");
  if (lower.size() != x0.size() || upper.size() != x0.size())
    throw std::invalid_argument("minimize_box: bound sizes must match x0");
  if (options.memory < 1) throw std::invalid_argument("minimize_box: memory must be >= 1");
  const Vec lo = to_vec(lower);
  const Vec hi = to_vec(upper);
  if ((lo.array() > hi.array()).any())
    throw std::invalid_argument("minimize_box: lower bound above upper bound");

  BoxLbfgsResult res;
  Vec x = to_vec(x0).cwiseMax(lo).cwiseMin(hi);
  Vec g(n);
  auto evaluate = [&](const Vec& at, Vec& grad) {
    ++res.evaluations;
    const double f = fg(view(at), {grad.data(), static_cast<std::size_t>(n)});
    if (!std::isfinite(f) || !grad.allFinite())
      throw std::runtime_error("minimize_box: non-finite objective or gradient");
    return f;
  };
  double f = evaluate(x, g);
  double pg = projected_gradient_norm(view(x), view(g), lower, upper);

  auto finish = [&](BoxLbfgsTermination t) {
    res.x.assign(x.data(), x.data() + n);
    res.f = f;
    res.termination = t;
    return res;
  };
  const auto stop = [&] { return options.stop_requested && options.stop_requested(f); };
  if (stop()) return finish(BoxLbfgsTermination::interrupted);
  if (pg <= options.gtol) return finish(BoxLbfgsTermination::gtol);

  std::deque<Pair> memory;
  Vec x_new(n), g_new(n), d(n), q(n);
  Eigen::Array<bool, Eigen::Dynamic, 1> free(n);

  struct Trial {
    double a = 0.0;
    double f = 0.0;
    double dphi = 0.0;
    Vec x;
    Vec g;
  };
  struct LineSearchOutcome {
    bool accepted = false;
    bool exhausted_budget = false;
    double f = 0.0;
    Vec x;
    Vec g;
  };
  // Evaluates phi(a) and its derivative along the projected path.
  auto trial_at = [&](double a) {
    Trial t;
    t.a = a;
    t.x = (x + a * d).cwiseMax(lo).cwiseMin(hi);
    t.g.resize(n);
    t.f = evaluate(t.x, t.g);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double xi = x(i) + a * d(i);
      if (xi > lo(i) && xi < hi(i)) t.dphi += t.g(i) * d(i);
    }
    return t;
  };
  auto sufficient = [&](const Trial& t) {
    const double decrease = g.dot(t.x - x);
    return decrease < 0.0 && t.f <= f + kArmijo * decrease;
  };
  auto line_search = [&](double a0, double slope) {
    LineSearchOutcome out;
    auto take = [&](Trial& t) {
      out.accepted = true;
      out.f = t.f;
      out.x = std::move(t.x);
      out.g = std::move(t.g);
      return out;
    };
    auto budget_left = [&] { return res.evaluations < options.max_evaluations; };
    const double curvature = kWolfe * std::abs(slope);

    auto zoom = [&](Trial low, Trial high, int trials_left) {
      // `low` always satisfies sufficient decrease (or is the start point).
      for (; trials_left > 0; --trials_left) {
        if (!budget_left()) {
          out.exhausted_budget = true;
          return out;
        }
        const double width = high.a - low.a;
        double a = cubic_minimizer(low.a, low.f, low.dphi, high.a, high.f, high.dphi);
        const double lo_a = std::min(low.a, high.a) + 0.1 * std::abs(width);
        const double hi_a = std::max(low.a, high.a) - 0.1 * std::abs(width);
        if (!std::isfinite(a) || a < lo_a || a > hi_a) a = 0.5 * (low.a + high.a);
        Trial t = trial_at(a);
        if (!sufficient(t) || t.f >= low.f) {
          high = std::move(t);
        } else {
          if (std::abs(t.dphi) <= curvature) return take(t);
          if (t.dphi * (high.a - low.a) >= 0.0) high = std::move(low);
          low = std::move(t);
        }
        if (std::abs(high.a - low.a) <= 1e-12 * std::max(1.0, std::abs(low.a))) break;
      }
      if (low.a > 0.0) return take(low);
      return out;
    };

    Trial prev;
    prev.f = f;
    prev.dphi = slope;
    prev.x = x;
    prev.g = g;
    double a = a0;
    for (int i = 0; i < options.max_line_search; ++i) {
      if (!budget_left()) {
        out.exhausted_budget = true;
        return out;
      }
      Trial t = trial_at(a);
      if (!sufficient(t) || (i > 0 && t.f >= prev.f))
        return zoom(std::move(prev), std::move(t), options.max_line_search - i - 1);
      if (std::abs(t.dphi) <= curvature) return take(t);
      if (t.dphi >= 0.0) return zoom(std::move(t), std::move(prev), options.max_line_search - i - 1);
      // Still descending: extrapolate, unless the whole step is already pinned
      // at the bounds.
      if ((t.x - prev.x).squaredNorm() == 0.0) return take(t);
      prev = std::move(t);
      a *= 2.0;
    }
    if (prev.a > 0.0) return take(prev);
    return out;
  };

  while (true) {
    if (res.iterations >= options.max_iterations)
      return finish(BoxLbfgsTermination::max_iterations);

    for (Eigen::Index i = 0; i < n; ++i)
      free(i) = !((x(i) <= lo(i) && g(i) > 0.0) || (x(i) >= hi(i) && g(i) < 0.0));
    const Vec mask = free.cast<double>();

    // Two-loop recursion on the free subspace.
    q = g.cwiseProduct(mask);
    std::vector<double> alpha(memory.size());
    for (std::size_t m = memory.size(); m-- > 0;) {
      const Pair& p = memory[m];
      alpha[m] = p.rho * p.s.cwiseProduct(mask).dot(q);
      q -= alpha[m] * p.y.cwiseProduct(mask);
    }
    if (!memory.empty()) {
      const Pair& last = memory.back();
      const Vec ym = last.y.cwiseProduct(mask);
      const double yy = ym.squaredNorm();
      const double sy = last.s.cwiseProduct(mask).dot(ym);
      if (yy > 0.0 && sy > 0.0) q *= sy / yy;
    }
    for (std::size_t m = 0; m < memory.size(); ++m) {
      const Pair& p = memory[m];
      const double beta = p.rho * p.y.cwiseProduct(mask).dot(q);
      q += (alpha[m] - beta) * p.s.cwiseProduct(mask);
    }
    d = -q.cwiseProduct(mask);
    double slope = g.dot(d);
    if (!(slope < 0.0)) {
      memory.clear();
      d = -g.cwiseProduct(mask);
      slope = g.dot(d);
    }

    // Strong-Wolfe search along the projected path x(a) = P(x + a d). The
    // first trial is a unit step, or a unit-length move after a reset.
    double step = 1.0;
    if (memory.empty()) {
      const double dn = d.norm();
      if (dn > 0.0) step = 1.0 / dn;
    }
    const LineSearchOutcome ls = line_search(step, slope);
    if (ls.exhausted_budget) return finish(BoxLbfgsTermination::max_evaluations);
    if (!ls.accepted) return finish(BoxLbfgsTermination::line_search);
    x_new = ls.x;
    g_new = ls.g;
    const double f_new = ls.f;

    const Vec s = x_new - x;
    const Vec y = g_new - g;
    const double sy = s.dot(y);
    if (sy > std::numeric_limits<double>::epsilon() * y.squaredNorm()) {
      memory.push_back({s, y, 1.0 / sy});
      if (static_cast<int>(memory.size()) > options.memory) memory.pop_front();
    }

    const double f_old = f;
    x = x_new;
    g = g_new;
    f = f_new;
    ++res.iterations;
    pg = projected_gradient_norm(view(x), view(g), lower, upper);
    res.f_history.push_back(f);
    res.pg_history.push_back(pg);

    // Ahead of the convergence tests, so a reached goal is reported as such.
    if (stop()) return finish(BoxLbfgsTermination::interrupted);
    if (f_old - f <= options.ftol * std::max({std::abs(f_old), std::abs(f), 1.0}))
      return finish(BoxLbfgsTermination::ftol);
    if (pg <= options.gtol) return finish(BoxLbfgsTermination::gtol);
  }
}

}  // namespace qoc
