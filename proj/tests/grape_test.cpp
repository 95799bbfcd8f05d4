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

#include <atomic>
#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "qoc/box_lbfgs.hpp"
#include "qoc/grape.hpp"
#include "qoc/problems.hpp"

using namespace qoc;

namespace {

GrapeProblem random_problem(std::mt19937_64& rng, int d, int n, int controls, bool gate) {
  GrapeProblem p;
  p.hamiltonian.drift = oracle::random_hermitian(d, rng);
  for (int j = 0; j < controls; ++j) p.hamiltonian.controls.push_back(oracle::random_hermitian(d, rng));
  p.rho0 = oracle::random_pure_state(d, rng);
  p.rho_aim = oracle::random_pure_state(d, rng);
  if (gate) p.u_aim = oracle::random_unitary(d, rng);
  p.duration = 1.0 + std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  p.slices = n;
  return p;
}

std::vector<std::vector<double>> random_pulses(std::mt19937_64& rng, int controls, int n) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::vector<std::vector<double>> out(controls, std::vector<double>(n));
  for (auto& p : out)
    for (double& x : p) x = u(rng);
  return out;
}

}  // namespace

TEST_SUITE("grape") {

TEST_CASE("auxiliary-matrix gradient matches central differences on 20 instances") {
  std::mt19937_64 rng(77);
  const int dims[] = {2, 4, 8};
  const int slices[] = {8, 20, 32};
  double worst_rel = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const int d = dims[trial % 3];
    const int n = slices[(trial / 3) % 3];
    const int controls = 1 + trial % 2;
    const bool gate = trial % 4 == 3;
    const GrapeProblem p = random_problem(rng, d, n, controls, gate);
    const auto pulses = random_pulses(rng, controls, n);
    const GrapeGradient g = grape_gradient(p, pulses, Exec::serial);
    CHECK(g.fom == doctest::Approx(grape_fom(p, pulses, Exec::serial)).epsilon(1e-13));

    std::vector<double> flat;
    for (const auto& c : pulses) flat.insert(flat.end(), c.begin(), c.end());
    const auto fd = oracle::fd_gradient(
        [&](const std::vector<double>& x) {
          std::vector<std::vector<double>> q(controls, std::vector<double>(n));
          for (int j = 0; j < controls; ++j)
            for (int k = 0; k < n; ++k) q[j][k] = x[j * n + k];
          return grape_fom(p, q, Exec::serial);
        },
        flat, 1e-6);
    for (int j = 0; j < controls; ++j) {
      for (int k = 0; k < n; ++k) {
        const double a = g.gradient[j][k];
        const double b = fd[j * n + k];
        CAPTURE(trial);
        CAPTURE(j);
        CAPTURE(k);
        if (std::fabs(a) < 1e-10) {
          CHECK(std::fabs(a - b) < 1e-9);
        } else {
          const double rel = std::fabs(a - b) / std::fabs(a);
          worst_rel = std::max(worst_rel, rel);
          CHECK(rel < 1e-6);
        }
      }
    }
  }
  MESSAGE("worst relative gradient error " << worst_rel);
}

TEST_CASE("serial and parallel gradients are identical") {
  std::mt19937_64 rng(78);
  const GrapeProblem p = random_problem(rng, 8, 32, 2, false);
  const auto pulses = random_pulses(rng, 2, 32);
  const auto a = grape_gradient(p, pulses, Exec::serial);
  const auto b = grape_gradient(p, pulses, Exec::parallel);
  CHECK(a.fom == b.fom);
  CHECK(a.gradient == b.gradient);
}

TEST_CASE("problem validation") {
  std::mt19937_64 rng(79);
  GrapeProblem p = random_problem(rng, 2, 4, 1, false);
  CHECK_NOTHROW(validate_problem(p));
  GrapeProblem bad = p;
  bad.hamiltonian.controls[0](0, 1) += 1.0;
  CHECK_THROWS_AS(validate_problem(bad), std::invalid_argument);
  bad = p;
  bad.rho0 *= 2.0;
  CHECK_THROWS_AS(validate_problem(bad), std::invalid_argument);
  bad = p;
  bad.duration = 0.0;
  CHECK_THROWS_AS(validate_problem(bad), std::invalid_argument);
  bad = p;
  bad.slices = 0;
  CHECK_THROWS_AS(validate_problem(bad), std::invalid_argument);
}

TEST_CASE("qubit pi pulse is found from a stationary zero guess") {
  QubitEvaluator qubit(1.0);
  const QuantumModel& m = *qubit.model();
  GrapeProblem p{m.hamiltonian, m.rho0, m.rho_aim, m.u_aim, 1.0, 20};
  GrapeSettings s;
  s.lower = {-10.0};
  s.upper = {10.0};
  s.amplitude_variation = {1.0};
  s.seed = 3;
  const std::vector<std::vector<double>> zero{std::vector<double>(20, 0.0)};
  const GrapeResult r = run_grape(p, zero, s);
  CHECK(r.guess_perturbed);
  CHECK(r.final_fom > 0.9999);
  for (double u : r.optimal_pulses[0]) {
    CHECK(u >= -10.0);
    CHECK(u <= 10.0);
  }
  // the fidelity history of accepted iterates never decreases
  for (std::size_t i = 1; i < r.fom_history.size(); ++i)
    CHECK(r.fom_history[i] >= r.fom_history[i - 1] - 1e-15);
}

TEST_CASE("GRAPE runs are reproducible and exec-independent") {
  QubitEvaluator qubit(1.0, 0.4);
  const QuantumModel& m = *qubit.model();
  GrapeProblem p{m.hamiltonian, m.rho0, m.rho_aim, m.u_aim, 1.0, 16};
  GrapeSettings s;
  s.lower = {-5.0};
  s.upper = {5.0};
  s.amplitude_variation = {1.0};
  s.max_iterations = 30;
  const std::vector<std::vector<double>> guess{std::vector<double>(16, 0.5)};
  s.exec = Exec::serial;
  const GrapeResult a = run_grape(p, guess, s);
  s.exec = Exec::parallel;
  const GrapeResult b = run_grape(p, guess, s);
  CHECK(a.optimal_pulses == b.optimal_pulses);
  CHECK(a.fom_history == b.fom_history);
}

TEST_CASE("a raised interrupt flag stops GRAPE before the first iteration") {
  QubitEvaluator qubit(1.0, 0.4);
  const QuantumModel& m = *qubit.model();
  GrapeProblem p{m.hamiltonian, m.rho0, m.rho_aim, m.u_aim, 1.0, 16};
  GrapeSettings s;
  s.lower = {-5.0};
  s.upper = {5.0};
  s.amplitude_variation = {1.0};
  std::atomic<bool> stop{true};
  s.interrupt = &stop;
  const std::vector<std::vector<double>> guess{std::vector<double>(16, 0.5)};
  const GrapeResult r = run_grape(p, guess, s);
  CHECK(r.termination == GrapeTermination::interrupted);
  CHECK(r.iterations == 0);
  CHECK(r.optimal_pulses == guess);
}

TEST_CASE("GRAPE stops at the FoM goal and at the time limit") {
  QubitEvaluator qubit(1.0);
  const QuantumModel& m = *qubit.model();
  GrapeProblem p{m.hamiltonian, m.rho0, m.rho_aim, m.u_aim, 1.0, 20};
  GrapeSettings s;
  s.lower = {-10.0};
  s.upper = {10.0};
  s.amplitude_variation = {1.0};
  s.seed = 3;
  s.gtol = 1e-14;
  s.ftol = 1e-16;
  const std::vector<std::vector<double>> zero{std::vector<double>(20, 0.0)};
  s.fom_goal = 0.9;
  const GrapeResult goal = run_grape(p, zero, s);
  CHECK(goal.termination == GrapeTermination::goal_reached);
  CHECK(goal.final_fom >= 0.9);
  s.fom_goal.reset();
  const GrapeResult free = run_grape(p, zero, s);
  CHECK(free.termination != GrapeTermination::goal_reached);
  CHECK(goal.iterations < free.iterations);

  ManualClock clock;
  clock.advance_minutes(2.0);
  s.clock = &clock;
  s.time_limit_minutes = 1.0;
  const GrapeResult timed = run_grape(p, zero, s);
  CHECK(timed.termination == GrapeTermination::time_limit);
  CHECK(timed.iterations == 0);
}

}  // TEST_SUITE

TEST_SUITE("box_lbfgs") {

namespace {

double rosen_fg(std::span<const double> x, std::span<double> g) {
  double f = 0.0;
  std::fill(g.begin(), g.end(), 0.0);
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    const double a = x[i + 1] - x[i] * x[i];
    const double b = 1.0 - x[i];
    f += 100 * a * a + b * b;
    g[i] += -400 * x[i] * a - 2 * b;
    g[i + 1] += 200 * a;
  }
  return f;
}

}  // namespace

TEST_CASE("unconstrained Rosenbrock") {
  const std::vector<double> x0{-1.2, 1.0, -1.2, 1.0}, lo(4, -10.0), hi(4, 10.0);
  BoxLbfgsOptions o;
  o.gtol = 1e-8;
  o.ftol = 0.0;
  const auto r = minimize_box(rosen_fg, x0, lo, hi, o);
  CHECK(r.f < 1e-12);
  for (double v : r.x) CHECK(v == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("active bounds satisfy the projected KKT conditions") {
  // minimum of sum (x_i - c_i)^2 with c outside the box sits on the boundary
  const std::vector<double> c{-3.0, 0.5, 4.0};
  auto fg = [&](std::span<const double> x, std::span<double> g) {
    double f = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      f += (x[i] - c[i]) * (x[i] - c[i]);
      g[i] = 2 * (x[i] - c[i]);
    }
    return f;
  };
  const std::vector<double> x0{0.0, 0.0, 0.0}, lo(3, -1.0), hi(3, 1.0);
  const auto r = minimize_box(fg, x0, lo, hi);
  CHECK(r.x[0] == -1.0);
  CHECK(r.x[1] == doctest::Approx(0.5));
  CHECK(r.x[2] == 1.0);
  std::vector<double> g(3);
  fg(r.x, g);
  CHECK(projected_gradient_norm(r.x, g, lo, hi) < 1e-5);
}

TEST_CASE("iterates stay feasible and f is monotone") {
  const std::vector<double> x0{0.9, 0.9, 0.9}, lo(3, 0.0), hi(3, 0.95);
  const auto r = minimize_box(
      [](std::span<const double> x, std::span<double> g) {
        double f = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
          f += std::sin(3 * x[i]) + x[i] * x[i];
          g[i] = 3 * std::cos(3 * x[i]) + 2 * x[i];
        }
        return f;
      },
      x0, lo, hi);
  for (double v : r.x) {
    CHECK(v >= 0.0);
    CHECK(v <= 0.95);
  }
  for (std::size_t i = 1; i < r.f_history.size(); ++i) CHECK(r.f_history[i] <= r.f_history[i - 1]);
}

TEST_CASE("iteration cap") {
  const std::vector<double> x0{-1.2, 1.0}, lo(2, -5.0), hi(2, 5.0);
  BoxLbfgsOptions o;
  o.max_iterations = 3;
  const auto r = minimize_box(rosen_fg, x0, lo, hi, o);
  CHECK(r.iterations == 3);
  CHECK(r.termination == BoxLbfgsTermination::max_iterations);
}

TEST_CASE("stop callback ends the loop between iterations") {
  const std::vector<double> x0{-1.2, 1.0}, lo(2, -5.0), hi(2, 5.0);
  BoxLbfgsOptions o;
  int polls = 0;
  o.stop_requested = [&](double) { return ++polls > 4; };
  const auto r = minimize_box(rosen_fg, x0, lo, hi, o);
  CHECK(r.iterations == 4);
  CHECK(r.termination == BoxLbfgsTermination::interrupted);
}

}  // TEST_SUITE
