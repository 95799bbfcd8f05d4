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

// Serial reference kernels against their OpenMP counterparts. Prints the
// median wall time of each path and the largest deviation between them.
//
//   qoc_bench [repeats]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

#include <fmt/format.h>
#include <omp.h>

#include "qoc/closed_loop.hpp"
#include "qoc/grape.hpp"
#include "qoc/problems.hpp"
#include "qoc/propagation.hpp"

using namespace qoc;

namespace {

double median_ms(const std::function<void()>& f, int repeats) {
  std::vector<double> t;
  for (int i = 0; i < repeats; ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    t.push_back(std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count());
  }
  std::nth_element(t.begin(), t.begin() + t.size() / 2, t.end());
  return t[t.size() / 2];
}

void row(const char* name, double serial_ms, double parallel_ms, double deviation) {
  fmt::print("{:<24} {:>10.3f} {:>10.3f} {:>8.2f}x {:>10.1e}\n", name, serial_ms, parallel_ms,
             serial_ms / parallel_ms, deviation);
}

}  // namespace

int main(int argc, char** argv) {
  const int repeats = argc > 1 ? std::max(1, std::atoi(argv[1])) : 5;
  fmt::print("OpenMP threads: {}, repeats: {}\n", omp_get_max_threads(), repeats);
  fmt::print("{:<24} {:>10} {:>10} {:>9} {:>10}\n", "kernel", "serial ms", "omp ms", "speedup", "max dev");

  IsingChainModel model;
  model.noise_std = 0.1;
  const IsingHamiltonians ops = build_ising_hamiltonians(model);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  std::vector<std::vector<double>> pulses{std::vector<double>(static_cast<std::size_t>(model.bins))};
  for (double& x : pulses[0]) x = u(rng);

  {
    PiecewiseHamiltonian h{ops.drift, {ops.control}};
    std::vector<CMatrix> a, b;
    const double s = median_ms([&] { a = slice_propagators(h, pulses, model.T, Exec::serial); }, repeats);
    const double p = median_ms([&] { b = slice_propagators(h, pulses, model.T, Exec::parallel); }, repeats);
    double dev = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) dev = std::max(dev, (a[k] - b[k]).cwiseAbs().maxCoeff());
    row("slice_propagators", s, p, dev);
  }
  {
    GrapeProblem g;
    g.hamiltonian = {ops.drift, {ops.control}};
    g.rho0 = uniform_basis_state(model.n_qubits, false);
    g.rho_aim = uniform_basis_state(model.n_qubits, true);
    g.duration = model.T;
    g.slices = model.bins;
    GrapeGradient a, b;
    const double s = median_ms([&] { a = grape_gradient(g, pulses, Exec::serial); }, repeats);
    const double p = median_ms([&] { b = grape_gradient(g, pulses, Exec::parallel); }, repeats);
    double dev = std::abs(a.fom - b.fom);
    for (std::size_t k = 0; k < a.gradient[0].size(); ++k)
      dev = std::max(dev, std::abs(a.gradient[0][k] - b.gradient[0][k]));
    row("grape_gradient", s, p, dev);
  }
  {
    ControlsSet c;
    c.pulse_names = {"Pulse1"};
    c.pulses = pulses;
    IsingEvaluator es(model, seeded_rng(3), Exec::serial), ep(model, seeded_rng(3), Exec::parallel);
    double fs = 0.0, fp = 0.0;
    const double s = median_ms([&] { fs = es.get_fom(c).fom; }, repeats);
    const double p = median_ms([&] { fp = ep.get_fom(c).fom; }, repeats);
    row("ising_noisy_get_fom", s, p, std::abs(fs - fp));
  }
  {
    MockNVModel nv;
    nv.ensemble_size = 64;
    std::vector<double> amp(200, std::numbers::pi), phase(200, 0.0);
    for (double& x : amp) x += 0.2 * u(rng);
    double cs = 0.0, cp = 0.0;
    const double s = median_ms([&] { cs = mock_contrast(nv, amp, phase, 1.0, Exec::serial); }, repeats);
    const double p = median_ms([&] { cp = mock_contrast(nv, amp, phase, 1.0, Exec::parallel); }, repeats);
    row("mock_contrast", s, p, std::abs(cs - cp));
  }
  return 0;
}
