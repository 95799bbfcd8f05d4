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

#include "qoc/direct_search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <Eigen/Dense>

namespace qoc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kRelativeFloor = 1e-14;

struct Stop {
  SearchTermination reason;
};

// Least-squares slope of y over x = 0..n-1.
double fitted_slope(std::span<const double> y) {
  const auto n = static_cast<double>(y.size());
  const double x_mean = (n - 1.0) / 2.0;
  const double y_mean = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double dx = static_cast<double>(i) - x_mean;
    sxy += dx * (y[i] - y_mean);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

bool flat_tail(std::span<const double> best_curve, int window, double threshold) {
  if (window < 2 || static_cast<long>(best_curve.size()) < window) return false;
  const auto tail = best_curve.last(static_cast<std::size_t>(window));
  // An infinite tail (all candidates rejected so far) carries no trend.
  if (!std::isfinite(tail.front())) return false;
  const double change = std::fabs(fitted_slope(tail)) * (window - 1);
  // Relative slack absorbs round-off of the fit for a change exactly at the threshold.
  return change <= threshold * (1.0 + 1e-9);
}

// Wraps the user objective with evaluation counting, history, and the
// per-search stopping criteria that are checked per call.
class Tracker {
 public:
  Tracker(const Objective& objective, const SearchCriteria& criteria, const Clock* clock)
      : objective_(objective), criteria_(criteria), clock_(clock) {
    if (!clock_) clock_ = &own_clock_;
    start_minutes_ = clock_->elapsed_minutes();
  }

  double operator()(std::span<const double> x) {
    if (criteria_.max_eval && record.evaluations >= *criteria_.max_eval)
      throw Stop{SearchTermination::max_eval};
    if (criteria_.time_lim_minutes &&
        clock_->elapsed_minutes() - start_minutes_ >= *criteria_.time_lim_minutes)
      throw Stop{SearchTermination::time};
    double v = 0.0;
    try {
      v = objective_(x);
    } catch (const SearchInterrupted&) {
      throw Stop{SearchTermination::global};
    }
    if (!std::isfinite(v)) v = kInf;
    record.history.emplace_back(record.evaluations, v);
    ++record.evaluations;
    if (record.best_x.empty() || v < record.best_f) {
      record.best_f = v;
      record.best_x.assign(x.begin(), x.end());
    }
    best_curve_.push_back(record.best_f);
    if (criteria_.change_based &&
        flat_tail(best_curve_, criteria_.change_based->cbs_funct_evals,
                  criteria_.change_based->cbs_change))
      throw Stop{SearchTermination::change_based};
    return v;
  }

  SearchRecord record;

 private:
  const Objective& objective_;
  const SearchCriteria& criteria_;
  const Clock* clock_;
  SteadyClock own_clock_;
  double start_minutes_ = 0.0;
  std::vector<double> best_curve_;
};

double relative_spread(double f_min, double f_max) {
  return std::fabs(f_max - f_min) / std::max(std::fabs(f_min), kRelativeFloor);
}

// Combined convergence test: every configured tolerance must hold.
std::optional<SearchTermination> converged(const SearchCriteria& c, double x_spread,
                                           double f_min, double f_max) {
  if (!c.xatol && !c.frtol) return std::nullopt;
  if (!std::isfinite(f_max)) return std::nullopt;
  if (c.xatol && !(x_spread < *c.xatol)) return std::nullopt;
  if (c.frtol && !(relative_spread(f_min, f_max) < *c.frtol)) return std::nullopt;
  return c.xatol ? SearchTermination::xatol : SearchTermination::frtol;
}

void validate_start(std::span<const double> x0) {
  if (x0.empty()) throw std::invalid_argument("direct search: dimension must be >= 1");
  for (double v : x0)
    if (!std::isfinite(v)) throw std::invalid_argument("direct search: non-finite start point");
}

}  // namespace

const char* to_string(SearchTermination t) {
  switch (t) {
    case SearchTermination::xatol: return "xatol";
    case SearchTermination::frtol: return "frtol";
    case SearchTermination::max_eval: return "max_eval";
    case SearchTermination::time: return "time";
    case SearchTermination::change_based: return "change_based";
    case SearchTermination::global: return "global";
  }
  return "unknown";
}

bool change_based_stop(std::span<const double> history, int window, double threshold) {
  std::vector<double> best(history.size());
  double running = kInf;
  for (std::size_t i = 0; i < history.size(); ++i) {
    if (history[i] < running) running = history[i];
    best[i] = running;
  }
  return flat_tail(best, window, threshold);
}

SearchRecord nelder_mead(const Objective& objective, std::span<const double> x0,
                         std::span<const double> offsets, const SearchCriteria& criteria,
                         bool adaptive, SearchContext ctx) {
  validate_start(x0);
  const std::size_t n = x0.size();
  if (offsets.size() != n) throw std::invalid_argument("nelder_mead: offsets dimension mismatch");
  for (double o : offsets)
    if (o == 0.0 || !std::isfinite(o)) throw std::invalid_argument("nelder_mead: zero offset");

  const double dim = static_cast<double>(n);
  const double rho = 1.0;
  const double chi = adaptive ? 1.0 + 2.0 / dim : 2.0;
  const double psi = adaptive ? 0.75 - 1.0 / (2.0 * dim) : 0.5;
  const double sigma = adaptive ? 1.0 - 1.0 / dim : 0.5;

  struct Vertex {
    std::vector<double> x;
    double f;
    long id;
  };
  Tracker track(objective, criteria, ctx.clock);
  std::vector<Vertex> simplex;
  simplex.reserve(n + 1);
  long next_id = 0;
  auto make_vertex = [&](std::vector<double> x) {
    const double f = track(x);
    return Vertex{std::move(x), f, next_id++};
  };
  auto order = [](const Vertex& a, const Vertex& b) {
    return a.f < b.f || (a.f == b.f && a.id < b.id);
  };
  auto affine = [n](const std::vector<double>& c, const std::vector<double>& x, double t) {
    // c + t (c - x)
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = c[i] + t * (c[i] - x[i]);
    return out;
  };

  SearchTermination reason = SearchTermination::max_eval;
  try {
    simplex.push_back(make_vertex(std::vector<double>(x0.begin(), x0.end())));
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> x(x0.begin(), x0.end());
      x[i] += offsets[i];
      simplex.push_back(make_vertex(std::move(x)));
    }
    for (;;) {
      std::sort(simplex.begin(), simplex.end(), order);

      double x_spread = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        double lo = simplex[0].x[i];
        double hi = lo;
        for (const auto& v : simplex) {
          lo = std::min(lo, v.x[i]);
          hi = std::max(hi, v.x[i]);
        }
        x_spread = std::max(x_spread, hi - lo);
      }
      if (auto done = converged(criteria, x_spread, simplex.front().f, simplex.back().f)) {
        reason = *done;
        break;
      }

      std::vector<double> centroid(n, 0.0);
      for (std::size_t v = 0; v < n; ++v)
        for (std::size_t i = 0; i < n; ++i) centroid[i] += simplex[v].x[i];
      for (double& c : centroid) c /= dim;

      Vertex& worst = simplex[n];
      const double f_best = simplex[0].f;
      const double f_second_worst = simplex[n - 1].f;

      Vertex reflected = make_vertex(affine(centroid, worst.x, rho));
      if (reflected.f < f_best) {
        Vertex expanded = make_vertex(affine(centroid, worst.x, rho * chi));
        worst = expanded.f < reflected.f ? std::move(expanded) : std::move(reflected);
        continue;
      }
      if (reflected.f < f_second_worst) {
        worst = std::move(reflected);
        continue;
      }
      bool shrink = false;
      if (reflected.f < worst.f) {
        Vertex outside = make_vertex(affine(centroid, worst.x, psi * rho));
        if (outside.f <= reflected.f) worst = std::move(outside);
        else shrink = true;
      } else {
        Vertex inside = make_vertex(affine(centroid, worst.x, -psi));
        if (inside.f < worst.f) worst = std::move(inside);
        else shrink = true;
      }
      if (shrink) {
        const std::vector<double> anchor = simplex[0].x;
        for (std::size_t v = 1; v <= n; ++v) {
          std::vector<double> x(n);
          for (std::size_t i = 0; i < n; ++i) x[i] = anchor[i] + sigma * (simplex[v].x[i] - anchor[i]);
          simplex[v] = make_vertex(std::move(x));
        }
      }
    }
  } catch (const Stop& stop) {
    reason = stop.reason;
  }
  SearchRecord record = std::move(track.record);
  record.terminated_by = reason;
  return record;
}

int cmaes_default_population(int n) {
  return 4 + static_cast<int>(std::floor(3.0 * std::log(static_cast<double>(n))));
}

SearchRecord cmaes(const Objective& objective, std::span<const double> x0, double sigma0,
                   const SearchCriteria& criteria, Rng& rng, std::span<const double> scales,
                   CmaesOptions options, const Clock* clock) {
  validate_start(x0);
  if (!(sigma0 > 0.0)) throw std::invalid_argument("cmaes: sigma0 must be > 0");
  const int n = static_cast<int>(x0.size());
  if (!scales.empty() && static_cast<int>(scales.size()) != n)
    throw std::invalid_argument("cmaes: scales dimension mismatch");
  Eigen::VectorXd scale = Eigen::VectorXd::Ones(n);
  for (int i = 0; i < static_cast<int>(scales.size()); ++i) scale[i] = std::fabs(scales[i]);

  const int lambda = options.population.value_or(cmaes_default_population(n));
  if (lambda < 2) throw std::invalid_argument("cmaes: population must be >= 2");
  const int mu = lambda / 2;
  Eigen::VectorXd weights(mu);
  for (int i = 0; i < mu; ++i) weights[i] = std::log((lambda + 1.0) / 2.0) - std::log(i + 1.0);
  weights /= weights.sum();
  const double mueff = 1.0 / weights.squaredNorm();
  const double dn = n;
  const double cc = (4.0 + mueff / dn) / (dn + 4.0 + 2.0 * mueff / dn);
  const double cs = (mueff + 2.0) / (dn + mueff + 5.0);
  const double c1 = 2.0 / ((dn + 1.3) * (dn + 1.3) + mueff);
  const double cmu =
      std::min(1.0 - c1, 2.0 * (mueff - 2.0 + 1.0 / mueff) / ((dn + 2.0) * (dn + 2.0) + mueff));
  const double damps = 1.0 + 2.0 * std::max(0.0, std::sqrt((mueff - 1.0) / (dn + 1.0)) - 1.0) + cs;
  const double chi_n = std::sqrt(dn) * (1.0 - 1.0 / (4.0 * dn) + 1.0 / (21.0 * dn * dn));

  Eigen::VectorXd mean = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd pc = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd ps = Eigen::VectorXd::Zero(n);
  Eigen::MatrixXd cov = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd basis = Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd axis = Eigen::VectorXd::Ones(n);
  double sigma = sigma0;
  std::normal_distribution<double> normal(0.0, 1.0);

  Tracker track(objective, criteria, clock);
  const Eigen::Map<const Eigen::VectorXd> origin(x0.data(), n);
  SearchTermination reason = SearchTermination::max_eval;
  try {
    for (long generation = 0;; ++generation) {
      std::vector<Eigen::VectorXd> steps(lambda);
      std::vector<double> values(lambda);
      for (int k = 0; k < lambda; ++k) {
        Eigen::VectorXd z(n);
        for (int i = 0; i < n; ++i) z[i] = normal(rng);
        steps[k] = basis * axis.cwiseProduct(z);
        const Eigen::VectorXd x = origin + scale.cwiseProduct(mean + sigma * steps[k]);
        values[k] = track(std::span<const double>(x.data(), x.size()));
      }
      std::vector<int> rank(lambda);
      std::iota(rank.begin(), rank.end(), 0);
      std::stable_sort(rank.begin(), rank.end(), [&](int a, int b) { return values[a] < values[b]; });

      Eigen::VectorXd step_w = Eigen::VectorXd::Zero(n);
      for (int i = 0; i < mu; ++i) step_w += weights[i] * steps[rank[i]];
      mean += sigma * step_w;

      // C^{-1/2} step_w = B D^{-1} B^T step_w
      const Eigen::VectorXd whitened = basis * (basis.transpose() * step_w).cwiseQuotient(axis);
      ps = (1.0 - cs) * ps + std::sqrt(cs * (2.0 - cs) * mueff) * whitened;
      const double ps_norm = ps.norm();
      const bool hsig = ps_norm / std::sqrt(1.0 - std::pow(1.0 - cs, 2.0 * (generation + 1))) <
                        (1.4 + 2.0 / (dn + 1.0)) * chi_n;
      pc = (1.0 - cc) * pc + (hsig ? std::sqrt(cc * (2.0 - cc) * mueff) : 0.0) * step_w;

      Eigen::MatrixXd rank_mu = Eigen::MatrixXd::Zero(n, n);
      for (int i = 0; i < mu; ++i) rank_mu += weights[i] * steps[rank[i]] * steps[rank[i]].transpose();
      cov = (1.0 - c1 - cmu + (hsig ? 0.0 : c1 * cc * (2.0 - cc))) * cov +
            c1 * pc * pc.transpose() + cmu * rank_mu;
      sigma *= std::exp((cs / damps) * (ps_norm / chi_n - 1.0));

      cov = 0.5 * (cov + cov.transpose());
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
      basis = eig.eigenvectors();
      axis = eig.eigenvalues().cwiseMax(1e-300).cwiseSqrt();

      const double x_extent =
          sigma * (cov.diagonal().cwiseMax(0.0).cwiseSqrt().cwiseProduct(scale)).maxCoeff();
      const double f_min = values[rank.front()];
      const double f_max = values[rank.back()];
      if (auto done = converged(criteria, x_extent, f_min, f_max)) {
        reason = *done;
        break;
      }
    }
  } catch (const Stop& stop) {
    reason = stop.reason;
  }
  SearchRecord record = std::move(track.record);
  record.terminated_by = reason;
  return record;
}

namespace {

class NelderMeadSearch final : public DirectSearch {
 public:
  explicit NelderMeadSearch(bool adaptive) : adaptive_(adaptive) {}
  SearchRecord minimize(const Objective& objective, std::span<const double> x0,
                        std::span<const double> scales, const SearchCriteria& criteria,
                        SearchContext ctx) override {
    return nelder_mead(objective, x0, scales, criteria, adaptive_, ctx);
  }

 private:
  bool adaptive_;
};

class CmaesSearch final : public DirectSearch {
 public:
  explicit CmaesSearch(const DsmSettings& s) : sigma0_(s.sigma0), options_{s.population} {}
  SearchRecord minimize(const Objective& objective, std::span<const double> x0,
                        std::span<const double> scales, const SearchCriteria& criteria,
                        SearchContext ctx) override {
    if (!ctx.rng) throw std::invalid_argument("CMA-ES needs a random source");
    return cmaes(objective, x0, sigma0_, criteria, *ctx.rng, scales, options_, ctx.clock);
  }

 private:
  double sigma0_;
  CmaesOptions options_;
};

}  // namespace

SearchRegistry::SearchRegistry() {
  factories_["NelderMead"] = [](const DsmSettings& s) {
    return std::make_unique<NelderMeadSearch>(s.is_adaptive);
  };
  factories_["CMAES"] = [](const DsmSettings& s) { return std::make_unique<CmaesSearch>(s); };
}

SearchRegistry& SearchRegistry::instance() {
  static SearchRegistry registry;
  return registry;
}

void SearchRegistry::add(const std::string& name, Factory factory) {
  factories_[name] = std::move(factory);
}

bool SearchRegistry::contains(const std::string& name) const { return factories_.contains(name); }

std::unique_ptr<DirectSearch> SearchRegistry::create(const DsmSettings& settings) const {
  auto it = factories_.find(settings.dsm_algorithm_name);
  if (it == factories_.end())
    throw std::invalid_argument("unknown direct search method '" + settings.dsm_algorithm_name + "'");
  return it->second(settings);
}

std::vector<std::string> SearchRegistry::names() const {
  std::vector<std::string> out;
  for (const auto& [name, _] : factories_) out.push_back(name);
  return out;
}

}  // namespace qoc
