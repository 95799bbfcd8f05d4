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

#include <fstream>
#include <sstream>

#include "doctest.h"
#include "qoc/config.hpp"

using namespace qoc;

namespace {

std::string read_text(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const std::string kGrapeDoc = read_text(QOC_CONFIG_DIR "/grape_ising.json");
const std::string kDcrabDoc = read_text(QOC_CONFIG_DIR "/dcrab_ising_noisy.json");

// Minimal valid dCRAB document with one substitution point.
std::string dcrab_doc(const std::string& pulse_extra = "", const std::string& algo_extra = "") {
  return R"({
  "algorithm_settings": {"algorithm_name": "dCRAB", "super_iteration_number": 2)" +
         algo_extra + R"(},
  "pulses": [{"pulse_name": "p", "time_name": "T", "upper_limit": 2.0, "lower_limit": -2.0,
              "basis": {"basis_name": "Fourier", "basis_vector_number": 3,
                        "random_super_parameter_distribution":
                          {"distribution_name": "Uniform", "lower_limit": 0.1, "upper_limit": 4.0}})" +
         pulse_extra + R"(}],
  "times": [{"time_name": "T", "initial_value": 2.5}]
})";
}

std::string error_path(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.path();
  }
  return "<no error>";
}

bool contains(const std::vector<std::string>& lines, const std::string& needle) {
  for (const auto& l : lines)
    if (l.find(needle) != std::string::npos) return true;
  return false;
}

}  // namespace

TEST_SUITE("config") {

TEST_CASE("GRAPE example document parses verbatim") {
  REQUIRE(!kGrapeDoc.empty());
  const OptimizationConfig c = parse_config(kGrapeDoc);
  CHECK(c.algorithm == Algorithm::grape);
  CHECK(c.grape.max_eval_total == 100);
  CHECK(c.grape.ftol == 1e-6);
  CHECK(c.grape.gtol == 1e-6);
  REQUIRE(c.pulses.size() == 1);
  const PulseSpec& p = c.pulses[0];
  CHECK(p.pulse_name == "Pulse_1");
  CHECK(p.upper_limit == 100.0);
  CHECK(p.lower_limit == -100.0);
  CHECK(p.bins_number == 100);
  CHECK(p.amplitude_variation == 20.0);
  CHECK(p.basis.kind == BasisKind::piecewise);
  CHECK(p.basis.bins_number == 100);
  CHECK(p.scaling_function(0.3) == 1.0);
  CHECK(p.initial_guess.function(0.3) == 0.0);
  CHECK(c.duration_of(0) == 1.0);
  CHECK(c.warnings.empty());
  CHECK(c.source_text == kGrapeDoc);
}

TEST_CASE("noisy dCRAB example document parses verbatim") {
  REQUIRE(!kDcrabDoc.empty());
  const OptimizationConfig c = parse_config(kDcrabDoc);
  CHECK(c.algorithm == Algorithm::dcrab);
  CHECK(c.optimization_client_name == "Optimization_dCRAB_IsingModel");
  CHECK(c.dcrab.super_iteration_number == 3);
  CHECK(c.dcrab.max_eval_total == 2000);
  CHECK(c.dcrab.dsm.dsm_algorithm_name == "NelderMead");
  CHECK(c.dcrab.dsm.is_adaptive);
  CHECK(c.dcrab.criteria.xatol == 1e-14);
  CHECK(c.dcrab.criteria.frtol == 1e-3);
  REQUIRE(c.dcrab.criteria.change_based.has_value());
  CHECK(c.dcrab.criteria.change_based->cbs_funct_evals == 200);
  CHECK(c.dcrab.criteria.change_based->cbs_change == 0.01);
  CHECK(c.dcrab.re_evaluation.enabled);
  CHECK(c.dcrab.re_evaluation.thresholds == kDefaultReEvaluationThresholds);
  const PulseSpec& p = c.pulses[0];
  CHECK(p.basis.kind == BasisKind::fourier);
  CHECK(p.basis.basis_vector_number == 5);
  CHECK(p.basis.distribution->lower_limit == 0.01);
  CHECK(p.basis.distribution->upper_limit == 5.0);
  CHECK(p.amplitude_variation == 10.0);
  // omitted in the document: defaults are applied and reported
  CHECK(p.bins_number == 100);
  CHECK(c.duration_of(0) == 1.0);
  CHECK(contains(c.notes, "bins_number defaults to 100"));
  CHECK(contains(c.notes, "initial_value defaults to 1"));
  CHECK(contains(c.notes, "thresholds default"));
  REQUIRE(c.results_folder.has_value());
  CHECK(c.warnings.size() == 1);
  CHECK(contains(c.warnings, "results_folder"));
  const DcrabProblem dp = dcrab_problem(c);
  CHECK(dp.durations == std::vector<double>{1.0});
}

TEST_CASE("error paths name the offending key") {
  CHECK(error_path("{") == "");
  CHECK(error_path("[]") == "");
  CHECK(error_path(R"({"pulses": []})") == "algorithm_settings");
  CHECK(error_path(dcrab_doc(R"(, "bins_number": 1)")) == "pulses[0].bins_number");
  CHECK(error_path(dcrab_doc(R"(, "amplitude_variation": -1)")) == "pulses[0].amplitude_variation");
  CHECK(error_path(dcrab_doc(R"(, "constraint_mode": "wrap")")) == "pulses[0].constraint_mode");
  CHECK(error_path(dcrab_doc(R"x(, "initial_guess": "lambda t: bogus(t)")x")) == "pulses[0].initial_guess");
  CHECK(error_path(dcrab_doc(R"(, "initial_guess": [1, 2, 3])")) == "pulses[0].initial_guess");
  CHECK(error_path(dcrab_doc("", R"(, "optimization_direction": "sideways")")) ==
        "algorithm_settings.optimization_direction");
  CHECK(error_path(dcrab_doc("", R"(, "super_iteration_number": 0)")).rfind("algorithm_settings", 0) == 0);
  CHECK(error_path(dcrab_doc("", R"(, "re_evaluation": {"thresholds": [0.5, 1.2]})")) ==
        "algorithm_settings.re_evaluation.thresholds[1]");
  CHECK(error_path(dcrab_doc("", R"(, "random_number_generator": {"seed_number": -4})")) ==
        "algorithm_settings.random_number_generator.seed_number");
  CHECK(error_path(dcrab_doc("", R"(, "dsm_settings": {"general_settings": {"dsm_algorithm_name": "Powell"}})")) ==
        "algorithm_settings.dsm_settings.general_settings.dsm_algorithm_name");
  CHECK(error_path(dcrab_doc("", R"(, "compensate_drift": {"compensate_after_minutes": 15, "after_SI": true})")) ==
        "algorithm_settings.compensate_drift");
}

TEST_CASE("limits and distribution checks") {
  std::string doc = dcrab_doc();
  const auto swap = [&](const std::string& from, const std::string& to) {
    std::string d = doc;
    d.replace(d.find(from), from.size(), to);
    return d;
  };
  CHECK(error_path(swap(R"("upper_limit": 2.0, "lower_limit": -2.0)",
                        R"("upper_limit": -2.0, "lower_limit": 2.0)")) == "pulses[0].lower_limit");
  CHECK(error_path(swap(R"("distribution_name": "Uniform")", R"("distribution_name": "Normal")")) ==
        "pulses[0].basis.random_super_parameter_distribution.distribution_name");
  CHECK(error_path(swap(R"("lower_limit": 0.1, "upper_limit": 4.0)",
                        R"("lower_limit": 4.0, "upper_limit": 0.1)")) ==
        "pulses[0].basis.random_super_parameter_distribution.lower_limit");
  CHECK(error_path(swap(R"("basis_name": "Fourier")", R"("basis_name": "Legendre")")) ==
        "pulses[0].basis.basis_name");
  CHECK(error_path(swap(R"("time_name": "T", "upper)", R"("time_name": "U", "upper)")) ==
        "pulses[0].time_name");
}

TEST_CASE("aliases and optional forms") {
  SUBCASE("superparameter distribution alias") {
    std::string d = dcrab_doc();
    const std::string key = "random_super_parameter_distribution";
    d.replace(d.find(key), key.size(), "superparameter_distribution");
    CHECK(parse_config(d).pulses[0].basis.distribution->upper_limit == 4.0);
  }
  SUBCASE("re_evaluation_steps and shrink alias") {
    const auto c = parse_config(dcrab_doc(R"(, "shrink_ampl_lim": true)",
                                          R"(, "re_evaluation": {"re_evaluation_steps": [0.4, 0.7]})"));
    CHECK(c.pulses[0].constraint_mode == ConstraintMode::shrink);
    CHECK(c.dcrab.re_evaluation.thresholds == std::vector<double>{0.4, 0.7});
  }
  SUBCASE("drift compensation spellings") {
    auto c = parse_config(dcrab_doc("", R"(, "compensate_drift": {"compensate_after_minutes": 15})"));
    CHECK(c.dcrab.drift.mode == DriftMode::periodic);
    CHECK(c.dcrab.drift.period_minutes == 15.0);
    c = parse_config(dcrab_doc("", R"(, "compensate_drift": {"compensate_after_SI": true})"));
    CHECK(c.dcrab.drift.mode == DriftMode::after_si);
  }
  SUBCASE("bare string functions and sample lists") {
    const auto c = parse_config(dcrab_doc(
        R"(, "bins_number": 4, "initial_guess": [0.5, 1.0, 1.5, 9.0], "scaling_function": [1, 2, 3, 4])"));
    const auto& p = c.pulses[0];
    CHECK(p.initial_guess.samples == std::vector<double>{0.5, 1.0, 1.5, 9.0});
    // samples index by bin of the 2.5 time unit pulse
    CHECK(p.scaling_function(0.1) == 1.0);
    CHECK(p.scaling_function(1.0) == 2.0);
    CHECK(p.scaling_function(2.4) == 4.0);
    const auto s = parse_config(dcrab_doc(R"(, "scaling_function": "lambda t: 2*t")"));
    CHECK(s.pulses[0].scaling_function(1.5) == 3.0);
  }
  SUBCASE("seed and goal") {
    const auto c = parse_config(
        dcrab_doc("", R"(, "random_number_generator": {"seed_number": 123}, "FoM_goal": 0.99)"));
    CHECK(c.seed == 123u);
    CHECK(c.dcrab.seed == 123u);
    CHECK(c.dcrab.fom_goal == 0.99);
  }
}

TEST_CASE("unknown keys warn without failing") {
  const auto c = parse_config(dcrab_doc(R"(, "colour": "blue")"));
  CHECK(contains(c.warnings, "pulses[0].colour"));
}

TEST_CASE("duplicates and missing sections") {
  std::string d = dcrab_doc();
  const std::string times = R"([{"time_name": "T", "initial_value": 2.5}])";
  d.replace(d.find(times), times.size(),
            R"([{"time_name": "T", "initial_value": 2.5}, {"time_name": "T"}])");
  CHECK(error_path(d) == "times[1].time_name");
  CHECK(error_path(R"({"algorithm_settings": {"algorithm_name": "dCRAB"}})") == "pulses");
  CHECK(error_path(R"({"algorithm_settings": {"algorithm_name": "GRAPE"},
                       "parameters": [{"parameter_name": "a", "initial_value": 0,
                                       "lower_limit": -1, "upper_limit": 1}]})") == "pulses");
}

TEST_CASE("problem section") {
  std::string d = dcrab_doc();
  d.insert(d.rfind('}'), R"(, "problem": {"name": "ising_noisy", "noise_std": 0.3})");
  const auto c = parse_config(d);
  REQUIRE(c.problem.has_value());
  CHECK(c.problem->name == "ising_noisy");
  CHECK(c.problem->values.at("noise_std") == 0.3);
}

TEST_CASE("load_config reports unreadable files") {
  CHECK_THROWS_AS(load_config("/nonexistent/qoc.json"), ConfigError);
}

}  // TEST_SUITE
