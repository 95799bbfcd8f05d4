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

#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "qoc/fidelity.hpp"
#include "qoc/propagation.hpp"

using namespace qoc;

namespace {

struct RandomInstance {
  PiecewiseHamiltonian h;
  std::vector<std::vector<double>> pulses;
  double duration = 1.0;
};

RandomInstance random_instance(std::mt19937_64& rng, int d, int slices, int controls) {
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  RandomInstance r;
  r.h.drift = oracle::random_hermitian(d, rng);
  for (int j = 0; j < controls; ++j) {
    r.h.controls.push_back(oracle::random_hermitian(d, rng));
    std::vector<double> p(slices);
    for (double& x : p) x = u(rng);
    r.pulses.push_back(p);
  }
  r.duration = 0.5 + std::uniform_real_distribution<double>(0.0, 2.0)(rng);
  return r;
}

}  // namespace

TEST_SUITE("propagation") {

TEST_CASE("slice propagators equal the eigendecomposition oracle") {
  std::mt19937_64 rng(21);
  const RandomInstance r = random_instance(rng, 4, 6, 2);
  const auto props = slice_propagators(r.h, r.pulses, r.duration, Exec::serial);
  REQUIRE(props.size() == 6);
  const double dt = r.duration / 6;
  for (std::size_t k = 0; k < 6; ++k) {
    CMatrix hk = r.h.drift;
    for (std::size_t j = 0; j < 2; ++j) hk += r.pulses[j][k] * r.h.controls[j];
    CHECK((props[k] - oracle::expm_hermitian(hk, dt)).norm() < 1e-11);
  }
}

TEST_CASE("total propagator is time ordered") {
  std::mt19937_64 rng(22);
  std::vector<CMatrix> us{oracle::random_unitary(3, rng), oracle::random_unitary(3, rng),
                          oracle::random_unitary(3, rng)};
  CHECK((total_propagator(us) - us[2] * us[1] * us[0]).norm() < 1e-13);
}

TEST_CASE("serial and parallel slice propagators are identical") {
  std::mt19937_64 rng(23);
  const RandomInstance r = random_instance(rng, 8, 40, 2);
  const auto a = slice_propagators(r.h, r.pulses, r.duration, Exec::serial);
  const auto b = slice_propagators(r.h, r.pulses, r.duration, Exec::parallel);
  for (std::size_t k = 0; k < a.size(); ++k) CHECK((a[k] - b[k]).norm() == 0.0);
}

TEST_CASE("per-slice drift replaces the constant drift") {
  std::mt19937_64 rng(24);
  RandomInstance r = random_instance(rng, 2, 3, 1);
  std::vector<CMatrix> drifts{oracle::random_hermitian(2, rng), oracle::random_hermitian(2, rng),
                              oracle::random_hermitian(2, rng)};
  r.h.drift_slices = drifts;
  for (std::size_t k = 0; k < 3; ++k)
    CHECK((r.h.at_slice(k, r.pulses) - (drifts[k] + r.pulses[0][k] * r.h.controls[0])).norm() <
          1e-14);
}

TEST_CASE("malformed pulses are rejected") {
  std::mt19937_64 rng(25);
  RandomInstance r = random_instance(rng, 2, 4, 2);
  r.pulses[1].pop_back();
  CHECK_THROWS_AS(check_pulses(r.h, r.pulses), std::invalid_argument);
  r.pulses.pop_back();
  CHECK_THROWS_AS(check_pulses(r.h, r.pulses), std::invalid_argument);
}

TEST_CASE("physics invariants hold on 1000 randomized propagations") {
  std::mt19937_64 rng(2026);
  std::uniform_int_distribution<int> dims(1, 3);
  double worst_unitarity = 0, worst_trace = 0, worst_route = 0, worst_phase = 0;
  double min_fid = 1, max_fid = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int d = 1 << dims(rng);
    const int slices = 1 + static_cast<int>(rng() % 12);
    const int controls = 1 + static_cast<int>(rng() % 2);
    const RandomInstance r = random_instance(rng, d, slices, controls);
    const auto props = slice_propagators(r.h, r.pulses, r.duration, Exec::serial);
    const CMatrix u = total_propagator(props);
    worst_unitarity =
        std::max(worst_unitarity, (u.adjoint() * u - CMatrix::Identity(d, d)).norm());

    const CMatrix rho0 = oracle::random_density(d, rng);
    const CMatrix direct = evolve_state(rho0, props);
    const CMatrix liouville = evolve_state_vectorized(rho0, props);
    worst_trace = std::max(worst_trace, std::abs(direct.trace() - 1.0));
    worst_route = std::max(worst_route, (direct - liouville).norm());

    const CMatrix target = oracle::random_pure_state(d, rng);
    const double hs = fom_hilbert_schmidt(direct, target);
    const double uhl = state_fidelity(direct, oracle::random_density(d, rng));
    const CMatrix u_aim = oracle::random_unitary(d, rng);
    const double gf = gate_fidelity(u, u_aim);
    for (double f : {hs, uhl, gf}) {
      min_fid = std::min(min_fid, f);
      max_fid = std::max(max_fid, f);
    }
    const double phi = std::uniform_real_distribution<double>(0.0, 6.283185307179586)(rng);
    worst_phase =
        std::max(worst_phase, std::abs(gate_fidelity(std::exp(kI * phi) * u, u_aim) - gf));
  }
  CHECK(worst_unitarity < 1e-10);
  CHECK(worst_trace < 1e-10);
  CHECK(worst_route < 1e-10);
  CHECK(min_fid >= -1e-10);
  CHECK(max_fid <= 1.0 + 1e-10);
  CHECK(worst_phase <= 1e-12);
}

}  // TEST_SUITE

TEST_SUITE("fidelity") {

TEST_CASE("Hilbert-Schmidt overlap is the pure-state fidelity") {
  std::mt19937_64 rng(31);
  const CMatrix a = oracle::random_pure_state(4, rng);
  const CMatrix b = oracle::random_pure_state(4, rng);
  CHECK(fom_hilbert_schmidt(a, a) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(fom_hilbert_schmidt(a, b) == doctest::Approx(state_fidelity(a, b)).epsilon(1e-8));
}

TEST_CASE("Uhlmann fidelity on commuting mixtures is the classical fidelity") {
  CMatrix r = CMatrix::Zero(2, 2), s = CMatrix::Zero(2, 2);
  r(0, 0) = 0.3;
  r(1, 1) = 0.7;
  s(0, 0) = 0.6;
  s(1, 1) = 0.4;
  const double root = std::sqrt(0.3 * 0.6) + std::sqrt(0.7 * 0.4);
  CHECK(state_fidelity(r, s) == doctest::Approx(root * root).epsilon(1e-12));
}

TEST_CASE("Uhlmann fidelity rejects non-PSD input") {
  CMatrix bad = CMatrix::Zero(2, 2);
  bad(0, 0) = 1.5;
  bad(1, 1) = -0.5;
  CHECK_THROWS_AS(state_fidelity(bad, bad), std::invalid_argument);
}

TEST_CASE("gate fidelity of a unitary with itself is one") {
  std::mt19937_64 rng(32);
  const CMatrix u = oracle::random_unitary(4, rng);
  CHECK(gate_fidelity(u, u) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::abs(gate_overlap(u, u) - cplx(4.0, 0.0)) < 1e-12);
}

TEST_CASE("pulse energy and power penalty") {
  std::vector<std::vector<double>> p{{1.0, 2.0}, {0.0, -1.0}};
  CHECK(pulse_energy(p, 2.0) == doctest::Approx(6.0));
  CHECK(power_penalty_fom(0.9, 6.0, 0.75) == doctest::Approx(0.75 * 0.1 + 0.25 * 6.0));
}

}  // TEST_SUITE
