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

#include <exception>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qoc/clock.hpp"
#include "qoc/rng.hpp"

namespace qoc {

// Gradient-free local searches. Every engine minimizes; maximization is a
// sign flip applied by the caller (see Orientation).

struct ChangeBasedStop {
  int cbs_funct_evals = 50;
  double cbs_change = 1e-3;
};

struct SearchCriteria {
  std::optional<double> xatol;
  std::optional<double> frtol;
  std::optional<long> max_eval;
  std::optional<double> time_lim_minutes;
  std::optional<ChangeBasedStop> change_based;
};

enum class SearchTermination { xatol, frtol, max_eval, time, change_based, global };

const char* to_string(SearchTermination t);

struct SearchRecord {
  /// (evaluation index, value) in minimization orientation, in call order.
  std::vector<std::pair<long, double>> history;
  std::vector<double> best_x;
  double best_f = 0.0;
  SearchTermination terminated_by = SearchTermination::max_eval;
  long evaluations = 0;
};

enum class Direction { minimization, maximization };

struct Orientation {
  Direction direction = Direction::maximization;
  double to_internal(double fom) const { return direction == Direction::maximization ? -fom : fom; }
  double to_external(double f) const { return direction == Direction::maximization ? -f : f; }
  /// True if `a` is strictly better than `b` in the configured direction.
  bool better(double a, double b) const {
    return direction == Direction::maximization ? a > b : a < b;
  }
};

using Objective = std::function<double(std::span<const double>)>;

/// Thrown from inside an objective to end the search early (global stopping
/// criteria, interrupts). The engine returns with terminated_by == global.
struct SearchInterrupted : std::exception {
  const char* what() const noexcept override { return "search interrupted"; }
};

struct SearchContext {
  const Clock* clock = nullptr;  // null: a SteadyClock started with the search
  Rng* rng = nullptr;            // required by stochastic engines
};

/// True iff at least `window` values exist and the least-squares line through
/// the last `window` points of the best-so-far curve changes by no more than
/// `threshold` across the window (|slope| * (window - 1) <= threshold).
bool change_based_stop(std::span<const double> history, int window, double threshold);

/// Nelder-Mead over the start simplex {x0, x0 + offsets_i e_i}. With
/// `adaptive` the coefficients scale with the dimension n as
/// (1, 1 + 2/n, 0.75 - 1/(2n), 1 - 1/n); otherwise (1, 2, 0.5, 0.5).
SearchRecord nelder_mead(const Objective& objective, std::span<const double> x0,
                         std::span<const double> offsets, const SearchCriteria& criteria,
                         bool adaptive, SearchContext ctx = {});

struct CmaesOptions {
  std::optional<int> population;  // lambda; default 4 + floor(3 ln n)
};

int cmaes_default_population(int n);

/// (mu/mu_w, lambda) CMA-ES. `scales` (optional, per coordinate) maps the
/// search to x = x0 + scales .* y so one sigma0 serves mixed units. xatol
/// bounds sigma * max_i sqrt(C_ii) * scales_i.
SearchRecord cmaes(const Objective& objective, std::span<const double> x0, double sigma0,
                   const SearchCriteria& criteria, Rng& rng, std::span<const double> scales = {},
                   CmaesOptions options = {}, const Clock* clock = nullptr);

/// Pluggable search method. Custom engines register under a name and are
/// selected by `dsm_algorithm_name`.
struct DsmSettings {
  std::string dsm_algorithm_name = "NelderMead";
  bool is_adaptive = false;
  std::optional<int> population;
  double sigma0 = 1.0;
};

class DirectSearch {
 public:
  virtual ~DirectSearch() = default;
  /// `scales` are per-coordinate initial step sizes.
  virtual SearchRecord minimize(const Objective& objective, std::span<const double> x0,
                                std::span<const double> scales, const SearchCriteria& criteria,
                                SearchContext ctx) = 0;
};

class SearchRegistry {
 public:
  using Factory = std::function<std::unique_ptr<DirectSearch>(const DsmSettings&)>;

  static SearchRegistry& instance();
  void add(const std::string& name, Factory factory);
  bool contains(const std::string& name) const;
  std::unique_ptr<DirectSearch> create(const DsmSettings& settings) const;
  std::vector<std::string> names() const;

 private:
  SearchRegistry();
  std::map<std::string, Factory> factories_;
};

}  // namespace qoc
