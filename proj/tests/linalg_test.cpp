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
#include "qoc/linalg.hpp"

using namespace qoc;

TEST_SUITE("linalg") {

TEST_CASE("expm matches eigendecomposition for Hermitian generators across norms") {
  std::mt19937_64 rng(11);
  for (double scale : {1e-3, 0.3, 2.0, 15.0, 120.0}) {
    for (int d : {2, 3, 8}) {
      const CMatrix h = oracle::random_hermitian(d, rng, scale);
      const CMatrix expected = oracle::expm_hermitian(h, 1.0);
      const CMatrix got = expm(-kI * h);
      CAPTURE(scale);
      CAPTURE(d);
      CHECK((got - expected).norm() < 1e-10 * std::max(1.0, expected.norm()));
    }
  }
}

TEST_CASE("expm matches a Taylor oracle on non-normal matrices") {
  std::mt19937_64 rng(12);
  std::normal_distribution<double> n01;
  for (int trial = 0; trial < 10; ++trial) {
    CMatrix a(4, 4);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) a(i, j) = cplx(n01(rng), n01(rng));
    a *= 0.5 * (trial + 1);
    const CMatrix ref = oracle::expm_taylor(a);
    CHECK((expm(a) - ref).norm() < 1e-9 * ref.norm());
  }
}

TEST_CASE("expm of zero and of a diagonal") {
  CHECK((expm(CMatrix::Zero(3, 3)) - CMatrix::Identity(3, 3)).norm() == 0.0);
  CMatrix d = CMatrix::Zero(2, 2);
  d(0, 0) = 1.0;
  d(1, 1) = cplx(0.0, 2.0);
  const CMatrix e = expm(d);
  CHECK(std::abs(e(0, 0) - std::exp(1.0)) < 1e-14);
  CHECK(std::abs(e(1, 1) - std::exp(cplx(0.0, 2.0))) < 1e-14);
  CHECK(std::abs(e(0, 1)) == 0.0);
}

TEST_CASE("expm_action agrees with the full exponential") {
  std::mt19937_64 rng(13);
  for (double scale : {0.01, 1.0, 40.0}) {
    const CMatrix h = oracle::random_hermitian(16, rng, scale);
    const CVector v = oracle::random_pure_state(16, rng).col(0).normalized();
    const CVector ref = oracle::expm_hermitian(h, 0.7) * v;
    const CVector got = expm_action(-kI * 0.7 * h, v);
    CHECK((got - ref).norm() < 1e-11);
  }
}

TEST_CASE("kron matches explicit loops") {
  std::mt19937_64 rng(14);
  const CMatrix a = oracle::random_unitary(2, rng);
  const CMatrix b = oracle::random_hermitian(3, rng);
  CHECK((kron(a, b) - oracle::kron_loops(a, b)).norm() == 0.0);
}

TEST_CASE("vec is column stacking and satisfies the Kronecker identity") {
  std::mt19937_64 rng(15);
  const CMatrix a = oracle::random_hermitian(3, rng);
  const CMatrix b = oracle::random_unitary(3, rng);
  const CMatrix c = oracle::random_hermitian(3, rng);
  const CVector v = vec(b);
  CHECK(v(1) == b(1, 0));
  CHECK(v(3) == b(0, 1));
  CHECK((vec(a * b * c) - kron(c.transpose(), a) * vec(b)).norm() < 1e-12);
  CHECK((unvec(v, 3) - b).norm() == 0.0);
}

TEST_CASE("Pauli algebra and site embedding") {
  const CMatrix x = pauli_x(), y = pauli_y(), z = pauli_z();
  CHECK((x * y - kI * z).norm() < 1e-15);
  CHECK((x * x - CMatrix::Identity(2, 2)).norm() < 1e-15);
  const CMatrix z0 = embed_site(z, 0, 3);
  // site 0 is the most significant bit: |100> has label 4
  CHECK(z0(4, 4).real() == -1.0);
  CHECK(z0(3, 3).real() == 1.0);
  CHECK((embed_site(x, 2, 3) - kron(CMatrix::Identity(4, 4), x)).norm() == 0.0);
}

TEST_CASE("one_norm and hermiticity") {
  CMatrix a(2, 2);
  a << 1.0, cplx(0, -3.0), 2.0, 1.0;
  CHECK(one_norm(a) == doctest::Approx(4.0));
  CHECK_FALSE(is_hermitian(a));
  std::mt19937_64 rng(16);
  CHECK(is_hermitian(oracle::random_hermitian(5, rng)));
}

}  // TEST_SUITE
