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

#include "qoc/dcrab.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "qoc/logging.hpp"

namespace qoc {

namespace {

bool usable(const FoMResult& r, bool need_std) {
  return r.status == FoMStatus::ok && std::isfinite(r.fom) &&
         (!need_std || (r.std && std::isfinite(*r.std) && *r.std >= 0.0));
}

void validate(const DcrabProblem& problem, const DcrabSettings& s, const FoMEvaluator& evaluator) {
  if (problem.pulses.empty() && problem.parameters.empty())
    throw DcrabSetupError("dCRAB needs at least one pulse or parameter");
  if (problem.durations.size() != problem.pulses.size())
    throw DcrabSetupError("dCRAB needs one duration per pulse");
  if (s.super_iteration_number < 1) throw DcrabSetupError("super_iteration_number must be >= 1");
  if (s.max_eval_total && *s.max_eval_total < 1)
    throw DcrabSetupError("max_eval_total must be >= 1");
  if (s.max_retries < 0) throw DcrabSetupError("max_retries must be >= 0");
  if (!SearchRegistry::instance().contains(s.dsm.dsm_algorithm_name))
    throw DcrabSetupError("unknown direct search method '" + s.dsm.dsm_algorithm_name + "'");
  if (s.re_evaluation.enabled) {
    if (s.re_evaluation.thresholds.empty())
      throw DcrabSetupError("re-evaluation needs at least one threshold");
    for (double t : s.re_evaluation.thresholds)
      if (!(t > 0.0 && t < 1.0)) throw DcrabSetupError("re-evaluation thresholds must be in (0, 1)");
    if (!evaluator.provides_std())
      throw DcrabSetupError("re-evaluation requires an evaluator that reports a standard deviation");
  }
  if (s.drift.mode == DriftMode::periodic && !(s.drift.period_minutes > 0.0))
    throw DcrabSetupError("periodic drift compensation needs a positive period");
}

}  // namespace

DcrabState initial_state(const DcrabProblem& problem) {
  DcrabState st;
  for (std::size_t p = 0; p < problem.pulses.size(); ++p) {
    const PulseSpec& spec = problem.pulses[p];
    auto grid = build_timegrid(problem.durations[p], spec.bins_number);
    st.base_pulses.push_back(initial_base_pulse(spec, grid));
    st.timegrids.push_back(std::move(grid));
    st.best_controls.pulse_names.push_back(spec.pulse_name);
  }
  for (const auto& par : problem.parameters) {
    st.best_parameters.push_back(par.initial_value);
    st.best_controls.parameter_names.push_back(par.parameter_name);
  }
  st.best_controls.pulses = st.base_pulses;
  st.best_controls.timegrids = st.timegrids;
  st.best_controls.parameters = st.best_parameters;
  return st;
}

SuperIterationStart start_superiteration(const DcrabState& state, const DcrabProblem& problem,
                                         std::uint64_t seed) {
  SuperIterationStart si;
  for (std::size_t p = 0; p < problem.pulses.size(); ++p) {
    const PulseSpec& spec = problem.pulses[p];
    Rng rng = child_rng(seed, Stream::superparameters,
                        static_cast<std::uint64_t>(state.super_iteration), p);
    BasisExpansion e;
    e.superparameters = sample_superparameters(spec.basis, rng);
    e.coefficients.assign(static_cast<std::size_t>(coefficient_count(spec.basis)), 0.0);
    e.base_pulse = state.base_pulses[p];
    si.offsets.insert(si.offsets.end(), e.coefficients.size(), spec.amplitude_variation);
    si.expansions.push_back(std::move(e));
  }
  for (const auto& par : problem.parameters) si.offsets.push_back(par.amplitude_variation);
  si.x0.assign(si.offsets.size(), 0.0);
  return si;
}

ControlsSet build_controls(const DcrabProblem& problem, const DcrabState& state,
                           const SuperIterationStart& si, std::span<const double> x) {
  if (x.size() != si.x0.size()) throw std::invalid_argument("search point has the wrong dimension");
  ControlsSet c;
  c.timegrids = state.timegrids;
  std::size_t offset = 0;
  for (std::size_t p = 0; p < problem.pulses.size(); ++p) {
    BasisExpansion e = si.expansions[p];
    std::copy_n(x.begin() + static_cast<long>(offset), e.coefficients.size(), e.coefficients.begin());
    offset += e.coefficients.size();
    c.pulse_names.push_back(problem.pulses[p].pulse_name);
    c.pulses.push_back(
        evaluate_pulse(problem.pulses[p], e, state.timegrids[p], problem.durations[p]));
  }
  for (std::size_t i = 0; i < problem.parameters.size(); ++i) {
    const ParameterSpec& par = problem.parameters[i];
    c.parameter_names.push_back(par.parameter_name);
    c.parameters.push_back(
        std::clamp(state.best_parameters[i] + x[offset + i], par.lower_limit, par.upper_limit));
  }
  return c;
}

double improvement_probability(double candidate, double candidate_se, double record,
                               double record_se, Direction direction) {
  const double diff = direction == Direction::maximization ? candidate - record : record - candidate;
  const double scale = std::hypot(candidate_se, record_se);
  if (!(scale > 0.0)) return diff > 0.0 ? 1.0 : (diff < 0.0 ? 0.0 : 0.5);
  return 0.5 * std::erfc(-diff / (scale * std::sqrt(2.0)));
}

CandidateDecision consider_candidate(DcrabState& state, const FoMResult& first,
                                     const ReEvaluationPolicy& policy, Direction direction,
                                     const std::function<FoMResult()>& remeasure) {
  CandidateDecision d;
  d.mean = first.fom;
  d.std = first.std;
  const Orientation orient{direction};
  auto accept = [&] {
    d.accepted = true;
    state.record_fom = d.mean;
    state.record_std = d.std;
  };
  if (!state.record_fom) {
    accept();
    return d;
  }
  if (!policy.enabled) {
    if (orient.better(first.fom, *state.record_fom)) accept();
    return d;
  }
  if (!first.std) throw EvaluatorError("re-evaluation needs a standard deviation with every result");
  double sum = first.fom;
  double var_sum = *first.std * *first.std;
  const int stages = static_cast<int>(policy.thresholds.size());
  for (int k = 1; k <= stages; ++k) {
    d.measurements = k;
    d.mean = sum / k;
    const double sigma = std::sqrt(var_sum / k);
    d.std = sigma / std::sqrt(static_cast<double>(k));
    const double p =
        improvement_probability(d.mean, *d.std, *state.record_fom, state.record_std.value_or(0.0),
                                direction);
    if (p < policy.thresholds[k - 1]) {
      d.failed_stage = k;
      return d;
    }
    if (k == stages) break;
    const FoMResult again = remeasure();
    if (!again.std) throw EvaluatorError("re-evaluation needs a standard deviation with every result");
    sum += again.fom;
    var_sum += *again.std * *again.std;
  }
  accept();
  return d;
}

std::optional<DriftEvent> compensate_drift(DcrabState& state, FoMEvaluator& evaluator,
                                           const Clock& clock) {
  if (!state.record_fom) return std::nullopt;
  FoMResult r;
  try {
    r = evaluator.get_fom(state.best_controls);
  } catch (const SearchInterrupted&) {
    throw;
  } catch (const std::exception& e) {
    ++state.failed_attempts;
    logger().warn("drift compensation skipped: {}", e.what());
    return std::nullopt;
  }
  if (!usable(r, false)) {
    ++state.failed_attempts;
    logger().warn("drift compensation skipped: unusable measurement ({})", r.message);
    return std::nullopt;
  }
  ++state.drift_probes;
  DriftEvent ev{clock.elapsed_minutes(), *state.record_fom, r.fom};
  state.drift_offset += r.fom - *state.record_fom;
  state.record_fom = r.fom;
  state.record_std = r.std;
  logger().info("drift compensation at {:.2f} min: record {:.6g} -> {:.6g} (offset {:.6g})",
                ev.minutes, ev.old_record, ev.new_record, state.drift_offset);
  return ev;
}

OptimizationResult run_dcrab(const DcrabProblem& problem, const DcrabSettings& settings,
                             FoMEvaluator& evaluator, RunContext context) {
  validate(problem, settings, evaluator);
  SteadyClock wall;
  const Clock& clock = context.clock ? *context.clock : wall;
  const Orientation orient{settings.direction};
  const bool need_std = settings.re_evaluation.enabled;

  DcrabState state = initial_state(problem);
  OptimizationResult result;
  result.algorithm = "dCRAB";
  result.direction = settings.direction;
  result.seed = settings.seed;
  std::optional<TerminationReason> stop;
  long index = 0;

  auto push_history = [&](const FoMResult& r, EvaluationKind kind) {
    HistoryEntry h;
    h.index = index++;
    h.fom = r.fom;
    h.std = r.std;
    h.super_iteration = state.super_iteration;
    h.kind = kind;
    h.record_fom = state.record_fom.value_or(r.fom);
    result.history.push_back(h);
    return result.history.size() - 1;
  };

  // One measurement with the retry policy; raises SearchInterrupted after
  // setting `stop` when the run has to end.
  auto measure = [&](const ControlsSet& c) -> FoMResult {
    std::string last_error;
    for (int attempt = 0; attempt <= settings.max_retries; ++attempt) {
      FoMResult r;
      try {
        r = evaluator.get_fom(c);
      } catch (const SearchInterrupted&) {
        stop = TerminationReason::interrupted;
        throw;
      } catch (const std::exception& e) {
        r.status = FoMStatus::error;
        r.message = e.what();
      }
      if (r.status == FoMStatus::abort) {
        logger().warn("evaluator requested abort: {}", r.message);
        stop = TerminationReason::aborted;
        throw SearchInterrupted();
      }
      if (usable(r, need_std)) return r;
      ++state.failed_attempts;
      last_error = r.message.empty() ? "non-finite or incomplete result" : r.message;
      logger().warn("evaluation attempt {} failed: {}", attempt + 1, last_error);
    }
    logger().error("evaluator failed {} consecutive times; stopping", settings.max_retries + 1);
    stop = TerminationReason::evaluator_failure;
    throw SearchInterrupted();
  };

  auto probe_drift = [&] {
    if (auto ev = compensate_drift(state, evaluator, clock)) {
      result.drift_events.push_back(*ev);
      FoMResult r;
      r.fom = ev->new_record;
      r.std = state.record_std;
      push_history(r, EvaluationKind::drift_probe);
    }
  };

  double next_drift = settings.drift.period_minutes;
  auto check_periodic_drift = [&] {
    if (settings.drift.mode != DriftMode::periodic || !state.record_fom) return;
    const double now = clock.elapsed_minutes();
    if (now < next_drift) return;
    probe_drift();
    next_drift = (std::floor(now / settings.drift.period_minutes) + 1.0) * settings.drift.period_minutes;
  };

  auto check_global = [&] {
    if (context.interrupt && context.interrupt->load())
      stop = TerminationReason::interrupted;
    else if (settings.max_eval_total && state.search_evaluations >= *settings.max_eval_total)
      stop = TerminationReason::max_eval_total;
    else if (settings.total_time_lim_minutes &&
             clock.elapsed_minutes() >= *settings.total_time_lim_minutes)
      stop = TerminationReason::time_limit;
    if (stop) throw SearchInterrupted();
  };

  auto goal_reached = [&] {
    return settings.fom_goal && state.record_fom &&
           (*state.record_fom == *settings.fom_goal ||
            orient.better(*state.record_fom, *settings.fom_goal));
  };

  for (int si = 1; si <= settings.super_iteration_number && !stop; ++si) {
    state.super_iteration = si;
    if (settings.drift.mode == DriftMode::after_si && si > 1) probe_drift();
    const SuperIterationStart start = start_superiteration(state, problem, settings.seed);
    logger().info("super-iteration {} starts: dimension {}, record {}", si, start.x0.size(),
                  state.record_fom ? fmt::format("{:.8g}", *state.record_fom) : "none");

    const Objective objective = [&](std::span<const double> x) -> double {
      if (stop) throw SearchInterrupted();
      const ControlsSet controls = build_controls(problem, state, start, x);
      check_periodic_drift();
      check_global();
      const FoMResult first = measure(controls);
      ++state.search_evaluations;
      const std::size_t row = push_history(first, EvaluationKind::search);
      auto remeasure = [&]() -> FoMResult {
        const FoMResult r = measure(controls);
        ++state.re_evaluations;
        push_history(r, EvaluationKind::re_evaluation);
        return r;
      };
      const CandidateDecision d =
          consider_candidate(state, first, settings.re_evaluation, settings.direction, remeasure);
      if (d.accepted) {
        state.best_controls = controls;
        result.history[row].accepted = true;
        logger().debug("SI {} evaluation {}: new record {:.10g}", si, state.search_evaluations,
                       *state.record_fom);
      }
      for (std::size_t i = row; i < result.history.size(); ++i)
        result.history[i].record_fom = *state.record_fom;
      if (goal_reached()) {
        stop = TerminationReason::goal_reached;
        throw SearchInterrupted();
      }
      return orient.to_internal(d.mean - state.drift_offset);
    };

    SearchRecord rec;
    Rng search_rng = child_rng(settings.seed, Stream::search, static_cast<std::uint64_t>(si));
    SearchContext ctx{&clock, &search_rng};
    try {
      // Engines other than the simplex do not evaluate the start point itself.
      if (settings.dsm.dsm_algorithm_name != "NelderMead") objective(start.x0);
      auto engine = SearchRegistry::instance().create(settings.dsm);
      rec = engine->minimize(objective, start.x0, start.offsets, settings.criteria, ctx);
    } catch (const SearchInterrupted&) {
      rec.terminated_by = SearchTermination::global;
    }
    result.si_terminations.push_back(rec.terminated_by);
    if (!stop) ++result.super_iterations_completed;
    logger().info("super-iteration {} ends ({}): record {:.10g}, {} search evaluations so far", si,
                  to_string(rec.terminated_by), state.record_fom.value_or(std::nan("")),
                  state.search_evaluations);
    state.base_pulses = state.best_controls.pulses;
    state.best_parameters = state.best_controls.parameters;
  }

  result.termination = stop.value_or(TerminationReason::completed);
  result.best_controls = state.best_controls;
  result.best_fom = state.record_fom.value_or(std::nan(""));
  result.best_std = state.record_std;
  result.search_evaluations = state.search_evaluations;
  result.re_evaluations = state.re_evaluations;
  result.drift_probes = state.drift_probes;
  result.failed_attempts = state.failed_attempts;
  result.total_evaluations = static_cast<long>(result.history.size());
  result.drift_offset = state.drift_offset;
  logger().info("dCRAB finished: {} after {} evaluations ({} search, {} re-evaluations, {} drift "
                "probes), best FoM {:.10g}",
                to_string(result.termination), result.total_evaluations, result.search_evaluations,
                result.re_evaluations, result.drift_probes, result.best_fom);
  return result;
}

}  // namespace qoc
