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

#include "qoc/optimizer.hpp"

#include <cstdlib>

#include <fmt/format.h>

#include "qoc/logging.hpp"
#include "qoc/results.hpp"

namespace qoc {

namespace fs = std::filesystem;

GrapeProblem grape_problem(const OptimizationConfig& config, const QuantumModel& model) {
  if (config.pulses.size() != model.hamiltonian.controls.size())
    throw ConfigError("pulses", fmt::format("the model has {} control(s) but {} pulse(s) are configured",
                                            model.hamiltonian.controls.size(), config.pulses.size()));
  GrapeProblem p;
  p.hamiltonian = model.hamiltonian;
  p.rho0 = model.rho0;
  p.rho_aim = model.rho_aim;
  p.u_aim = model.u_aim;
  p.duration = config.duration_of(0);
  p.slices = config.pulses[0].bins_number;
  for (std::size_t i = 1; i < config.pulses.size(); ++i) {
    if (config.pulses[i].time_name != config.pulses[0].time_name)
      throw ConfigError(fmt::format("pulses[{}].time_name", i), "GRAPE pulses must share one time");
    if (config.pulses[i].bins_number != p.slices)
      throw ConfigError(fmt::format("pulses[{}].bins_number", i), "GRAPE pulses must share one bin count");
  }
  if (!p.hamiltonian.drift_slices.empty() &&
      p.hamiltonian.drift_slices.size() != static_cast<std::size_t>(p.slices))
    throw ConfigError("pulses[0].bins_number", "does not match the model's time-dependent drift");
  return p;
}

namespace {

TerminationReason from_grape(GrapeTermination t) {
  switch (t) {
    case GrapeTermination::ftol: return TerminationReason::ftol;
    case GrapeTermination::gtol: return TerminationReason::gtol;
    case GrapeTermination::max_eval: return TerminationReason::max_eval_total;
    case GrapeTermination::line_search: return TerminationReason::line_search;
    case GrapeTermination::interrupted: return TerminationReason::interrupted;
    case GrapeTermination::goal_reached: return TerminationReason::goal_reached;
    case GrapeTermination::time_limit: return TerminationReason::time_limit;
  }
  return TerminationReason::completed;
}

OptimizationResult optimize_grape(const OptimizationConfig& config, const QuantumModel& model,
                                  std::uint64_t seed, RunContext context, Exec exec) {
  const GrapeProblem problem = grape_problem(config, model);
  const std::vector<double> grid = build_timegrid(problem.duration, problem.slices);
  std::vector<std::vector<double>> guess;
  GrapeSettings s;
  s.max_iterations = config.grape.max_eval_total;
  s.ftol = config.grape.ftol;
  s.gtol = config.grape.gtol;
  s.seed = seed;
  s.exec = exec;
  s.interrupt = context.interrupt;
  s.clock = context.clock;
  s.fom_goal = config.dcrab.fom_goal;
  s.time_limit_minutes = config.dcrab.total_time_lim_minutes;
  for (const auto& pulse : config.pulses) {
    guess.push_back(initial_base_pulse(pulse, grid));
    s.lower.push_back(pulse.lower_limit);
    s.upper.push_back(pulse.upper_limit);
    s.amplitude_variation.push_back(pulse.amplitude_variation);
  }
  const GrapeResult g = run_grape(problem, guess, s);
  if (g.guess_perturbed)
    logger().info("initial guess is a stationary point; applied a seeded random kick");

  OptimizationResult r;
  r.algorithm = "GRAPE";
  r.direction = Direction::maximization;
  r.seed = seed;
  r.best_fom = g.final_fom;
  r.iterations = g.iterations;
  r.termination = from_grape(g.termination);
  for (std::size_t i = 0; i < config.pulses.size(); ++i) {
    r.best_controls.pulse_names.push_back(config.pulses[i].pulse_name);
    r.best_controls.pulses.push_back(g.optimal_pulses[i]);
    r.best_controls.timegrids.push_back(grid);
  }
  for (const auto& p : config.parameters) {
    r.best_controls.parameter_names.push_back(p.parameter_name);
    r.best_controls.parameters.push_back(p.initial_value);
  }
  // One history row per quasi-Newton iterate; the line-search trial points
  // are not recorded.
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < g.fom_history.size(); ++k) {
    HistoryEntry h;
    h.index = static_cast<long>(k);
    h.fom = g.fom_history[k];
    h.accepted = h.fom > best;
    best = std::max(best, h.fom);
    h.record_fom = best;
    r.history.push_back(h);
  }
  r.total_evaluations = static_cast<long>(r.history.size());
  r.search_evaluations = r.total_evaluations;
  logger().info("GRAPE finished: F = {:.10f} after {} iterations ({} objective calls), {}", g.final_fom,
                g.iterations, g.evaluations, to_string(g.termination));
  return r;
}

}  // namespace

OptimizationResult optimize(const OptimizationConfig& config, FoMEvaluator& evaluator,
                            std::uint64_t seed, RunContext context, Exec exec) {
  if (config.algorithm == Algorithm::grape) {
    const QuantumModel* model = evaluator.model();
    if (!model)
      throw ConfigError("algorithm_settings.algorithm_name",
                        "GRAPE needs a built-in model; black-box evaluators only support dCRAB");
    return optimize_grape(config, *model, seed, context, exec);
  }
  DcrabSettings settings = config.dcrab;
  settings.seed = seed;
  try {
    return run_dcrab(dcrab_problem(config), settings, evaluator, context);
  } catch (const DcrabSetupError& e) {
    throw ConfigError("algorithm_settings", e.what());
  }
}

FomSource parse_fom_source(const std::string& text) {
  const auto colon = text.find(':');
  if (colon != std::string::npos && colon + 1 < text.size()) {
    const std::string kind = text.substr(0, colon);
    const std::string target = text.substr(colon + 1);
    if (kind == "builtin") return {FomSource::Kind::builtin, target};
    if (kind == "file-exchange") return {FomSource::Kind::file_exchange, target};
  }
  throw ConfigError("--fom", "expected builtin:<name> or file-exchange:<dir>, got '" + text + "'");
}

namespace {

fs::path pick_results_base(const RunRequest& request, const OptimizationConfig& config,
                           std::vector<std::string>& log_lines) {
  if (request.results_dir) return *request.results_dir;
  if (const char* env = std::getenv(kResultsDirEnv); env && *env) {
    log_lines.push_back(fmt::format("results directory taken from {}={}", kResultsDirEnv, env));
    return env;
  }
  if (config.results_folder) return *config.results_folder;
  return fs::current_path();
}

std::unique_ptr<FoMEvaluator> make_evaluator(const RunRequest& request,
                                             const OptimizationConfig& config, std::uint64_t seed) {
  std::string text = request.fom;
  if (text.empty()) {
    if (!config.problem)
      throw ConfigError("--fom", "no figure of merit source: pass --fom or add a problem section");
    text = "builtin:" + config.problem->name;
  }
  const FomSource source = parse_fom_source(text);
  if (source.kind == FomSource::Kind::file_exchange) {
    std::error_code ec;
    fs::create_directories(source.target, ec);
    PollOptions poll = request.poll;
    poll.interrupt = request.interrupt;
    return std::make_unique<FileExchangeEvaluator>(source.target, poll);
  }
  if (config.pulses.empty())
    throw ConfigError("pulses", "built-in problems need at least one pulse");
  const ProblemSpec problem = config.problem.value_or(ProblemSpec{});
  try {
    return make_builtin_evaluator(source.target, problem, config.duration_of(0),
                                  config.pulses[0].bins_number, seed);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("--fom", e.what());
  }
}

}  // namespace

RunOutcome run_optimization(const RunRequest& request) {
  RunOutcome out;
  OptimizationConfig config;
  try {
    config = load_config(request.config_path);
  } catch (const ConfigError& e) {
    out.exit_code = kExitConfigError;
    out.error = e.what();
    logger().error("configuration error: {}", e.what());
    return out;
  }

  std::vector<std::string> pending;
  std::uint64_t seed = 0;
  if (request.seed) {
    seed = *request.seed;
    pending.push_back(fmt::format("seed {} (command line)", seed));
  } else if (config.seed) {
    seed = *config.seed;
    pending.push_back(fmt::format("seed {} (configuration)", seed));
  } else {
    seed = entropy_seed();
    pending.push_back(fmt::format("seed {} (entropy; pass --seed {} to reproduce)", seed, seed));
  }

  try {
    const fs::path base = pick_results_base(request, config, pending);
    out.folder = create_results_folder(base, config.optimization_client_name,
                                       std::chrono::system_clock::now());
    configure_logging(out.folder / kLogFile);
    dump_config_copy(out.folder, config.source_text);
  } catch (const std::exception& e) {
    out.exit_code = kExitConfigError;
    out.error = e.what();
    logger().error("cannot prepare the results folder: {}", e.what());
    return out;
  }

  logger().info("qoc {} starting, results in {}", kVersion, out.folder.string());
  for (const auto& line : pending) logger().info("{}", line);
  for (const auto& n : config.notes) logger().info("default applied: {}", n);
  for (const auto& w : config.warnings) logger().warn("{}", w);

  std::unique_ptr<FoMEvaluator> evaluator;
  try {
    evaluator = make_evaluator(request, config, seed);
    RunContext context;
    context.interrupt = request.interrupt;
    out.result = optimize(config, *evaluator, seed, context, request.exec);
  } catch (const ConfigError& e) {
    out.exit_code = kExitConfigError;
    out.error = e.what();
    logger().error("configuration error: {}", e.what());
  } catch (const std::exception& e) {
    out.exit_code = exit_code(TerminationReason::evaluator_failure);
    out.error = e.what();
    logger().error("evaluator failure: {}", e.what());
  }
  if (evaluator) {
    try {
      evaluator->finish();
    } catch (const std::exception& e) {
      logger().warn("evaluator shutdown failed: {}", e.what());
    }
  }
  if (out.result) {
    out.exit_code = exit_code(out.result->termination);
    try {
      dump_results(out.folder, *out.result, config.source_text);
    } catch (const std::exception& e) {
      logger().error("{}", e.what());
      out.error = e.what();
      if (out.exit_code == 0) out.exit_code = exit_code(TerminationReason::evaluator_failure);
    }
    logger().info("finished: {}, best FoM {:.17g}, {} evaluations", to_string(out.result->termination),
                  out.result->best_fom, out.result->total_evaluations);
  }
  logger().flush();
  reset_logging();
  return out;
}

}  // namespace qoc
