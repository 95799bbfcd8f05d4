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

#include "qoc/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "json.hpp"

#include "qoc/expression.hpp"

namespace qoc {

using json = nlohmann::json;

namespace {

constexpr int kDefaultBins = 100;
constexpr double kDefaultDuration = 1.0;

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

std::string index_path(const std::string& path, std::size_t i) {
  return fmt::format("{}[{}]", path, i);
}

const char* type_name(const json& j) { return j.type_name(); }

class Reader {
 public:
  explicit Reader(OptimizationConfig& cfg) : cfg_(cfg) {}

  void note(const std::string& text) { cfg_.notes.push_back(text); }
  void warn(const std::string& text) { cfg_.warnings.push_back(text); }

  const json& object(const json& j, const std::string& path) {
    if (!j.is_object()) throw ConfigError(path, fmt::format("expected an object, got {}", type_name(j)));
    return j;
  }

  /// Warns about keys outside `known`.
  void check_keys(const json& obj, const std::string& path, std::initializer_list<const char*> known) {
    std::set<std::string> k(known.begin(), known.end());
    for (const auto& [key, value] : obj.items())
      if (!k.count(key)) warn(fmt::format("unknown key '{}' ignored", join(path, key)));
  }

  /// First present key among `names` (aliases); fills `used`.
  const json* find(const json& obj, std::initializer_list<const char*> names, std::string& used) {
    for (const char* n : names)
      if (auto it = obj.find(n); it != obj.end()) {
        used = n;
        return &*it;
      }
    return nullptr;
  }

  const json& require(const json& obj, const char* key, const std::string& path) {
    auto it = obj.find(key);
    if (it == obj.end()) throw ConfigError(join(path, key), "required key is missing");
    return *it;
  }

  double number(const json& j, const std::string& path) {
    if (!j.is_number()) throw ConfigError(path, fmt::format("expected a number, got {}", type_name(j)));
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw ConfigError(path, "must be finite");
    return v;
  }

  long integer(const json& j, const std::string& path) {
    if (j.is_number_integer()) return j.get<long>();
    if (j.is_number_float()) {
      const double v = j.get<double>();
      if (std::floor(v) == v && std::fabs(v) < 9e15) return static_cast<long>(v);
    }
    throw ConfigError(path, fmt::format("expected an integer, got {}", type_name(j)));
  }

  std::string string(const json& j, const std::string& path) {
    if (!j.is_string()) throw ConfigError(path, fmt::format("expected a string, got {}", type_name(j)));
    return j.get<std::string>();
  }

  bool boolean(const json& j, const std::string& path) {
    if (!j.is_boolean()) throw ConfigError(path, fmt::format("expected a boolean, got {}", type_name(j)));
    return j.get<bool>();
  }

  const json& array(const json& j, const std::string& path) {
    if (!j.is_array()) throw ConfigError(path, fmt::format("expected an array, got {}", type_name(j)));
    return j;
  }

  double positive(const json& j, const std::string& path) {
    const double v = number(j, path);
    if (!(v > 0.0)) throw ConfigError(path, "must be positive");
    return v;
  }

 private:
  OptimizationConfig& cfg_;
};

struct FunctionSpec {
  TimeFunction function;
  std::vector<double> samples;
  std::string text;
};

FunctionSpec read_function(Reader& r, const json& j, const std::string& path) {
  FunctionSpec out;
  if (j.is_string()) {
    out.text = j.get<std::string>();
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i)
      out.samples.push_back(r.number(j[i], index_path(path, i)));
    return out;
  } else {
    r.object(j, path);
    r.check_keys(j, path, {"function_type", "lambda_function", "list_function"});
    std::string type = "lambda_function";
    if (auto it = j.find("function_type"); it != j.end())
      type = r.string(*it, join(path, "function_type"));
    if (type == "list_function") {
      const std::string p = join(path, "list_function");
      const json& arr = r.array(r.require(j, "list_function", path), p);
      for (std::size_t i = 0; i < arr.size(); ++i)
        out.samples.push_back(r.number(arr[i], index_path(p, i)));
      return out;
    }
    if (type != "lambda_function")
      throw ConfigError(join(path, "function_type"),
                        "unsupported function_type '" + type + "' (lambda_function, list_function)");
    out.text = r.string(r.require(j, "lambda_function", path), join(path, "lambda_function"));
  }
  try {
    out.function = compile_time_function(out.text);
  } catch (const ExpressionError& e) {
    throw ConfigError(j.is_string() ? path : join(path, "lambda_function"), e.what());
  }
  return out;
}

BasisKind basis_kind(const std::string& name, const std::string& path) {
  if (name == "Fourier") return BasisKind::fourier;
  if (name == "Chebyshev") return BasisKind::chebyshev;
  if (name == "PiecewiseBasis") return BasisKind::piecewise;
  if (name == "Walsh") return BasisKind::walsh;
  if (name == "Sigmoid") return BasisKind::sigmoid;
  throw ConfigError(path, "unknown basis '" + name +
                              "' (Fourier, Chebyshev, PiecewiseBasis, Walsh, Sigmoid)");
}

BasisConfig read_basis(Reader& r, const json& j, const std::string& path, int pulse_bins,
                       Algorithm algorithm) {
  r.object(j, path);
  r.check_keys(j, path,
               {"basis_name", "basis_vector_number", "bins_number",
                "random_super_parameter_distribution", "superparameter_distribution"});
  BasisConfig b;
  b.kind = basis_kind(r.string(r.require(j, "basis_name", path), join(path, "basis_name")),
                      join(path, "basis_name"));
  if (b.kind == BasisKind::piecewise) {
    if (auto it = j.find("bins_number"); it != j.end()) {
      b.bins_number = static_cast<int>(r.integer(*it, join(path, "bins_number")));
      if (b.bins_number < 1) throw ConfigError(join(path, "bins_number"), "must be >= 1");
    } else {
      b.bins_number = pulse_bins;
      r.note(fmt::format("{}: bins_number defaults to the pulse's {}", path, pulse_bins));
    }
    return b;
  }
  if (auto it = j.find("basis_vector_number"); it != j.end()) {
    b.basis_vector_number = static_cast<int>(r.integer(*it, join(path, "basis_vector_number")));
    if (b.basis_vector_number < 1) throw ConfigError(join(path, "basis_vector_number"), "must be >= 1");
  } else {
    r.note(fmt::format("{}: basis_vector_number defaults to 1", path));
  }
  std::string used;
  const json* dist = r.find(j, {"random_super_parameter_distribution", "superparameter_distribution"}, used);
  if (!dist) {
    if (algorithm == Algorithm::dcrab)
      throw ConfigError(join(path, "random_super_parameter_distribution"),
                        "required for randomized bases");
    return b;
  }
  const std::string dpath = join(path, used);
  r.object(*dist, dpath);
  r.check_keys(*dist, dpath, {"distribution_name", "lower_limit", "upper_limit"});
  SuperparameterDistribution d;
  d.distribution_name =
      r.string(r.require(*dist, "distribution_name", dpath), join(dpath, "distribution_name"));
  if (d.distribution_name != "Uniform")
    throw ConfigError(join(dpath, "distribution_name"),
                      "unsupported distribution '" + d.distribution_name + "' (Uniform)");
  d.lower_limit = r.number(r.require(*dist, "lower_limit", dpath), join(dpath, "lower_limit"));
  d.upper_limit = r.number(r.require(*dist, "upper_limit", dpath), join(dpath, "upper_limit"));
  if (!(d.lower_limit < d.upper_limit))
    throw ConfigError(join(dpath, "lower_limit"),
                      fmt::format("lower_limit ({}) must be below upper_limit ({})", d.lower_limit,
                                  d.upper_limit));
  b.distribution = d;
  return b;
}

/// `scaling_samples` receives a sampled scaling function, which can only be
/// turned into a function of time once the duration is known.
PulseSpec read_pulse(Reader& r, const json& j, const std::string& path, Algorithm algorithm,
                     std::vector<double>& scaling_samples) {
  r.object(j, path);
  r.check_keys(j, path,
               {"pulse_name", "upper_limit", "lower_limit", "bins_number", "amplitude_variation",
                "time_name", "basis", "scaling_function", "initial_guess", "constraint_mode",
                "shrink_ampl_lim"});
  PulseSpec p;
  p.pulse_name = r.string(r.require(j, "pulse_name", path), join(path, "pulse_name"));
  p.upper_limit = r.number(r.require(j, "upper_limit", path), join(path, "upper_limit"));
  p.lower_limit = r.number(r.require(j, "lower_limit", path), join(path, "lower_limit"));
  if (!(p.lower_limit < p.upper_limit))
    throw ConfigError(join(path, "lower_limit"),
                      fmt::format("lower_limit ({}) must be below upper_limit ({})", p.lower_limit,
                                  p.upper_limit));
  if (auto it = j.find("bins_number"); it != j.end()) {
    p.bins_number = static_cast<int>(r.integer(*it, join(path, "bins_number")));
    if (p.bins_number < 2) throw ConfigError(join(path, "bins_number"), "must be >= 2");
  } else {
    p.bins_number = kDefaultBins;
    r.note(fmt::format("{}: bins_number defaults to {}", path, kDefaultBins));
  }
  if (auto it = j.find("amplitude_variation"); it != j.end()) {
    p.amplitude_variation = r.positive(*it, join(path, "amplitude_variation"));
  } else {
    p.amplitude_variation = 1.0;
    r.note(fmt::format("{}: amplitude_variation defaults to 1.0", path));
  }
  p.time_name = r.string(r.require(j, "time_name", path), join(path, "time_name"));
  p.basis = read_basis(r, r.require(j, "basis", path), join(path, "basis"), p.bins_number, algorithm);

  if (auto it = j.find("scaling_function"); it != j.end()) {
    FunctionSpec f = read_function(r, *it, join(path, "scaling_function"));
    if (!f.samples.empty()) {
      if (static_cast<int>(f.samples.size()) != p.bins_number)
        throw ConfigError(join(path, "scaling_function"), "sample list length must equal bins_number");
      scaling_samples = std::move(f.samples);
    } else {
      p.scaling_function = f.function;
    }
  } else {
    r.note(fmt::format("{}: scaling_function defaults to 1", path));
  }
  if (auto it = j.find("initial_guess"); it != j.end()) {
    FunctionSpec f = read_function(r, *it, join(path, "initial_guess"));
    p.initial_guess.function = f.function;
    p.initial_guess.samples = f.samples;
    if (!f.samples.empty() && static_cast<int>(f.samples.size()) != p.bins_number)
      throw ConfigError(join(path, "initial_guess"),
                        fmt::format("sample list has {} entries, bins_number is {}",
                                    f.samples.size(), p.bins_number));
  } else {
    r.note(fmt::format("{}: initial_guess defaults to 0", path));
  }
  if (auto it = j.find("constraint_mode"); it != j.end()) {
    const std::string mode = r.string(*it, join(path, "constraint_mode"));
    if (mode == "cut") p.constraint_mode = ConstraintMode::cut;
    else if (mode == "shrink") p.constraint_mode = ConstraintMode::shrink;
    else throw ConfigError(join(path, "constraint_mode"), "expected 'cut' or 'shrink'");
  } else if (auto it2 = j.find("shrink_ampl_lim"); it2 != j.end()) {
    p.constraint_mode =
        r.boolean(*it2, join(path, "shrink_ampl_lim")) ? ConstraintMode::shrink : ConstraintMode::cut;
  } else {
    r.note(fmt::format("{}: constraint_mode defaults to cut", path));
  }
  return p;
}

ParameterSpec read_parameter(Reader& r, const json& j, const std::string& path) {
  r.object(j, path);
  r.check_keys(j, path,
               {"parameter_name", "initial_value", "lower_limit", "upper_limit",
                "amplitude_variation"});
  ParameterSpec p;
  p.parameter_name = r.string(r.require(j, "parameter_name", path), join(path, "parameter_name"));
  p.initial_value = r.number(r.require(j, "initial_value", path), join(path, "initial_value"));
  p.lower_limit = r.number(r.require(j, "lower_limit", path), join(path, "lower_limit"));
  p.upper_limit = r.number(r.require(j, "upper_limit", path), join(path, "upper_limit"));
  if (p.lower_limit > p.upper_limit)
    throw ConfigError(join(path, "lower_limit"), "lower_limit must not exceed upper_limit");
  if (p.initial_value < p.lower_limit || p.initial_value > p.upper_limit)
    throw ConfigError(join(path, "initial_value"), "initial_value must lie within the limits");
  if (auto it = j.find("amplitude_variation"); it != j.end()) {
    p.amplitude_variation = r.positive(*it, join(path, "amplitude_variation"));
  } else {
    p.amplitude_variation = 1.0;
    r.note(fmt::format("{}: amplitude_variation defaults to 1.0", path));
  }
  return p;
}

TimeSpec read_time(Reader& r, const json& j, const std::string& path) {
  r.object(j, path);
  r.check_keys(j, path, {"time_name", "initial_value"});
  TimeSpec t;
  t.time_name = r.string(r.require(j, "time_name", path), join(path, "time_name"));
  if (auto it = j.find("initial_value"); it != j.end()) {
    t.initial_value = r.positive(*it, join(path, "initial_value"));
  } else {
    t.initial_value = kDefaultDuration;
    r.note(fmt::format("{}: initial_value defaults to {}", path, kDefaultDuration));
  }
  return t;
}

void read_dsm(Reader& r, const json& j, const std::string& path, OptimizationConfig& cfg) {
  r.object(j, path);
  r.check_keys(j, path, {"general_settings", "stopping_criteria"});
  if (auto it = j.find("general_settings"); it != j.end()) {
    const std::string gp = join(path, "general_settings");
    r.object(*it, gp);
    r.check_keys(*it, gp, {"dsm_algorithm_name", "is_adaptive", "population", "sigma0"});
    if (auto a = it->find("dsm_algorithm_name"); a != it->end()) {
      cfg.dcrab.dsm.dsm_algorithm_name = r.string(*a, join(gp, "dsm_algorithm_name"));
      if (!SearchRegistry::instance().contains(cfg.dcrab.dsm.dsm_algorithm_name))
        throw ConfigError(join(gp, "dsm_algorithm_name"),
                          "unknown direct search method '" + cfg.dcrab.dsm.dsm_algorithm_name + "'");
    }
    if (auto a = it->find("is_adaptive"); a != it->end())
      cfg.dcrab.dsm.is_adaptive = r.boolean(*a, join(gp, "is_adaptive"));
    if (auto a = it->find("population"); a != it->end()) {
      const long lambda = r.integer(*a, join(gp, "population"));
      if (lambda < 2) throw ConfigError(join(gp, "population"), "must be >= 2");
      cfg.dcrab.dsm.population = static_cast<int>(lambda);
    }
    if (auto a = it->find("sigma0"); a != it->end())
      cfg.dcrab.dsm.sigma0 = r.positive(*a, join(gp, "sigma0"));
  } else {
    r.note(fmt::format("{}: dsm_algorithm_name defaults to NelderMead", path));
  }
  if (auto it = j.find("stopping_criteria"); it != j.end()) {
    const std::string sp = join(path, "stopping_criteria");
    r.object(*it, sp);
    r.check_keys(*it, sp, {"xatol", "frtol", "time_lim", "max_eval", "change_based_stop"});
    SearchCriteria& c = cfg.dcrab.criteria;
    if (auto a = it->find("xatol"); a != it->end()) c.xatol = r.positive(*a, join(sp, "xatol"));
    if (auto a = it->find("frtol"); a != it->end()) c.frtol = r.positive(*a, join(sp, "frtol"));
    if (auto a = it->find("time_lim"); a != it->end())
      c.time_lim_minutes = r.positive(*a, join(sp, "time_lim"));
    if (auto a = it->find("max_eval"); a != it->end()) {
      c.max_eval = r.integer(*a, join(sp, "max_eval"));
      if (*c.max_eval < 1) throw ConfigError(join(sp, "max_eval"), "must be >= 1");
    }
    if (auto a = it->find("change_based_stop"); a != it->end()) {
      const std::string cp = join(sp, "change_based_stop");
      r.object(*a, cp);
      r.check_keys(*a, cp, {"cbs_funct_evals", "cbs_change"});
      ChangeBasedStop cbs;
      cbs.cbs_funct_evals =
          static_cast<int>(r.integer(r.require(*a, "cbs_funct_evals", cp), join(cp, "cbs_funct_evals")));
      if (cbs.cbs_funct_evals < 2) throw ConfigError(join(cp, "cbs_funct_evals"), "must be >= 2");
      cbs.cbs_change = r.positive(r.require(*a, "cbs_change", cp), join(cp, "cbs_change"));
      c.change_based = cbs;
    }
  }
}

void read_algorithm(Reader& r, const json& j, const std::string& path, OptimizationConfig& cfg) {
  r.object(j, path);
  const std::string name = r.string(r.require(j, "algorithm_name", path), join(path, "algorithm_name"));
  if (name == "dCRAB") cfg.algorithm = Algorithm::dcrab;
  else if (name == "GRAPE") cfg.algorithm = Algorithm::grape;
  else throw ConfigError(join(path, "algorithm_name"), "unknown algorithm '" + name + "' (dCRAB, GRAPE)");

  if (cfg.algorithm == Algorithm::dcrab)
    r.check_keys(j, path,
                 {"algorithm_name", "super_iteration_number", "max_eval_total", "total_time_lim",
                  "FoM_goal", "optimization_direction", "dsm_settings", "random_number_generator",
                  "compensate_drift", "re_evaluation"});
  else
    r.check_keys(j, path,
                 {"algorithm_name", "stopping_criteria", "total_time_lim", "FoM_goal",
                  "optimization_direction", "random_number_generator"});

  DcrabSettings& s = cfg.dcrab;
  if (auto it = j.find("optimization_direction"); it != j.end()) {
    const std::string d = r.string(*it, join(path, "optimization_direction"));
    if (d == "maximization") s.direction = Direction::maximization;
    else if (d == "minimization") s.direction = Direction::minimization;
    else throw ConfigError(join(path, "optimization_direction"), "expected maximization or minimization");
  } else {
    r.note(fmt::format("{}: optimization_direction defaults to maximization", path));
  }
  if (auto it = j.find("total_time_lim"); it != j.end())
    s.total_time_lim_minutes = r.positive(*it, join(path, "total_time_lim"));
  if (auto it = j.find("FoM_goal"); it != j.end()) s.fom_goal = r.number(*it, join(path, "FoM_goal"));
  if (auto it = j.find("random_number_generator"); it != j.end()) {
    const std::string rp = join(path, "random_number_generator");
    r.object(*it, rp);
    r.check_keys(*it, rp, {"seed_number"});
    if (auto sd = it->find("seed_number"); sd != it->end()) {
      const long seed = r.integer(*sd, join(rp, "seed_number"));
      if (seed < 0) throw ConfigError(join(rp, "seed_number"), "must be non-negative");
      cfg.seed = static_cast<std::uint64_t>(seed);
    }
  }

  if (cfg.algorithm == Algorithm::grape) {
    if (auto it = j.find("stopping_criteria"); it != j.end()) {
      const std::string sp = join(path, "stopping_criteria");
      r.object(*it, sp);
      r.check_keys(*it, sp, {"max_eval_total", "ftol", "gtol"});
      if (auto a = it->find("max_eval_total"); a != it->end()) {
        cfg.grape.max_eval_total = r.integer(*a, join(sp, "max_eval_total"));
        if (cfg.grape.max_eval_total < 1) throw ConfigError(join(sp, "max_eval_total"), "must be >= 1");
      }
      if (auto a = it->find("ftol"); a != it->end()) cfg.grape.ftol = r.positive(*a, join(sp, "ftol"));
      if (auto a = it->find("gtol"); a != it->end()) cfg.grape.gtol = r.positive(*a, join(sp, "gtol"));
    } else {
      r.note(fmt::format("{}: GRAPE stopping criteria default to max_eval_total 100, ftol 1e-6, gtol 1e-6", path));
    }
    return;
  }

  if (auto it = j.find("super_iteration_number"); it != j.end()) {
    s.super_iteration_number = static_cast<int>(r.integer(*it, join(path, "super_iteration_number")));
    if (s.super_iteration_number < 1) throw ConfigError(join(path, "super_iteration_number"), "must be >= 1");
  } else {
    r.note(fmt::format("{}: super_iteration_number defaults to 1", path));
  }
  if (auto it = j.find("max_eval_total"); it != j.end()) {
    s.max_eval_total = r.integer(*it, join(path, "max_eval_total"));
    if (*s.max_eval_total < 1) throw ConfigError(join(path, "max_eval_total"), "must be >= 1");
  }
  if (auto it = j.find("dsm_settings"); it != j.end()) {
    read_dsm(r, *it, join(path, "dsm_settings"), cfg);
  } else {
    r.note(fmt::format("{}: dsm_settings default to NelderMead without stopping criteria", path));
  }
  if (auto it = j.find("compensate_drift"); it != j.end()) {
    const std::string dp = join(path, "compensate_drift");
    r.object(*it, dp);
    r.check_keys(*it, dp,
                 {"compensation_time_minutes", "compensate_after_minutes", "after_SI",
                  "compensate_after_SI"});
    std::string used;
    if (const json* m = r.find(*it, {"compensation_time_minutes", "compensate_after_minutes"}, used)) {
      s.drift.mode = DriftMode::periodic;
      s.drift.period_minutes = r.positive(*m, join(dp, used));
    }
    if (const json* a = r.find(*it, {"after_SI", "compensate_after_SI"}, used)) {
      if (r.boolean(*a, join(dp, used))) {
        if (s.drift.mode == DriftMode::periodic)
          throw ConfigError(dp, "choose either a compensation period or after_SI, not both");
        s.drift.mode = DriftMode::after_si;
      }
    }
  }
  if (auto it = j.find("re_evaluation"); it != j.end()) {
    const std::string rp = join(path, "re_evaluation");
    r.object(*it, rp);
    r.check_keys(*it, rp, {"thresholds", "re_evaluation_steps"});
    s.re_evaluation.enabled = true;
    std::string used;
    if (const json* t = r.find(*it, {"thresholds", "re_evaluation_steps"}, used)) {
      const std::string tp = join(rp, used);
      r.array(*t, tp);
      if (t->empty()) throw ConfigError(tp, "needs at least one threshold");
      for (std::size_t i = 0; i < t->size(); ++i) {
        const double v = r.number((*t)[i], index_path(tp, i));
        if (!(v > 0.0 && v < 1.0)) throw ConfigError(index_path(tp, i), "must be in (0, 1)");
        s.re_evaluation.thresholds.push_back(v);
      }
    } else {
      s.re_evaluation.thresholds = kDefaultReEvaluationThresholds;
      r.note(fmt::format("{}: thresholds default to [0.33, 0.5, 0.6]", rp));
    }
  }
}

}  // namespace

double OptimizationConfig::duration_of(std::size_t pulse_index) const {
  const std::string& name = pulses.at(pulse_index).time_name;
  for (const auto& t : times)
    if (t.time_name == name) return t.initial_value;
  throw ConfigError(fmt::format("pulses[{}].time_name", pulse_index), "unresolved time '" + name + "'");
}

OptimizationConfig parse_config(const std::string& text) {
  OptimizationConfig cfg;
  cfg.source_text = text;
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("invalid JSON: ") + e.what());
  }
  Reader r(cfg);
  r.object(root, "");
  r.check_keys(root, "",
               {"optimization_client_name", "algorithm_settings", "pulses", "parameters", "times",
                "communication", "problem"});

  if (auto it = root.find("optimization_client_name"); it != root.end()) {
    cfg.optimization_client_name = r.string(*it, "optimization_client_name");
  } else {
    r.note("optimization_client_name defaults to an empty name");
  }
  read_algorithm(r, r.require(root, "algorithm_settings", ""), "algorithm_settings", cfg);

  if (auto it = root.find("times"); it != root.end()) {
    r.array(*it, "times");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const std::string p = index_path("times", i);
      TimeSpec t = read_time(r, (*it)[i], p);
      for (const auto& other : cfg.times)
        if (other.time_name == t.time_name)
          throw ConfigError(join(p, "time_name"), "duplicate time_name '" + t.time_name + "'");
      cfg.times.push_back(std::move(t));
    }
  }
  if (auto it = root.find("pulses"); it != root.end()) {
    r.array(*it, "pulses");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const std::string p = index_path("pulses", i);
      std::vector<double> scaling_samples;
      PulseSpec spec = read_pulse(r, (*it)[i], p, cfg.algorithm, scaling_samples);
      for (const auto& other : cfg.pulses)
        if (other.pulse_name == spec.pulse_name)
          throw ConfigError(join(p, "pulse_name"), "duplicate pulse_name '" + spec.pulse_name + "'");
      std::size_t matches = 0;
      for (const auto& t : cfg.times) matches += t.time_name == spec.time_name;
      if (matches != 1)
        throw ConfigError(join(p, "time_name"), "time_name '" + spec.time_name +
                                                    "' does not resolve to exactly one entry of times");
      if (!scaling_samples.empty()) {
        double duration = 0.0;
        for (const auto& t : cfg.times)
          if (t.time_name == spec.time_name) duration = t.initial_value;
        spec.scaling_function = [samples = std::move(scaling_samples), duration](double t) {
          const auto n = static_cast<double>(samples.size());
          const double k = std::clamp(std::floor(t / duration * n), 0.0, n - 1.0);
          return samples[static_cast<std::size_t>(k)];
        };
      }
      cfg.pulses.push_back(std::move(spec));
    }
  }
  if (auto it = root.find("parameters"); it != root.end()) {
    r.array(*it, "parameters");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const std::string p = index_path("parameters", i);
      ParameterSpec spec = read_parameter(r, (*it)[i], p);
      for (const auto& other : cfg.parameters)
        if (other.parameter_name == spec.parameter_name)
          throw ConfigError(join(p, "parameter_name"),
                            "duplicate parameter_name '" + spec.parameter_name + "'");
      cfg.parameters.push_back(std::move(spec));
    }
  }
  if (cfg.pulses.empty() && cfg.parameters.empty())
    throw ConfigError("pulses", "at least one pulse or parameter is required");
  if (cfg.algorithm == Algorithm::grape) {
    if (cfg.pulses.empty()) throw ConfigError("pulses", "GRAPE needs at least one pulse");
    if (!cfg.parameters.empty())
      r.warn("parameters are not optimized by GRAPE and keep their initial values");
  }

  if (auto it = root.find("communication"); it != root.end()) {
    r.object(*it, "communication");
    r.check_keys(*it, "communication", {"communication_type", "results_folder"});
    if (auto f = it->find("results_folder"); f != it->end()) {
      cfg.results_folder = r.string(*f, "communication.results_folder");
      r.warn("communication.results_folder '" + *cfg.results_folder +
             "' is an absolute, machine-specific path; override it with --results-dir if it is not "
             "writable here");
    }
  }
  if (auto it = root.find("problem"); it != root.end()) {
    r.object(*it, "problem");
    ProblemSpec ps;
    for (const auto& [key, value] : it->items()) {
      if (key == "name") {
        ps.name = r.string(value, "problem.name");
      } else {
        ps.values[key] = r.number(value, join("problem", key));
      }
    }
    cfg.problem = ps;
  }
  if (cfg.seed) cfg.dcrab.seed = *cfg.seed;
  return cfg;
}

OptimizationConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("", "cannot read configuration file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

DcrabProblem dcrab_problem(const OptimizationConfig& config) {
  DcrabProblem p;
  p.pulses = config.pulses;
  for (std::size_t i = 0; i < config.pulses.size(); ++i) p.durations.push_back(config.duration_of(i));
  p.parameters = config.parameters;
  return p;
}

}  // namespace qoc
