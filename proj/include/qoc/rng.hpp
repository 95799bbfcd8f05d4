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

#include <cstdint>
#include <random>

namespace qoc {

using Rng = std::mt19937_64;

/// Stream tags for child generators. Values are part of the reproducibility
/// contract: changing them changes every seeded run.
enum class Stream : std::uint64_t {
  superparameters = 1,
  search = 2,
  evaluator = 3,
  mock_experiment = 4,
};

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline Rng seeded_rng(std::uint64_t seed) { return Rng(splitmix64(seed)); }

/// Generator for (stream, a, b), e.g. (superparameters, SI index, pulse index).
/// Each key maps to its own seed, so adding a pulse leaves the draws of the
/// other pulses untouched.
inline Rng child_rng(std::uint64_t seed, Stream stream, std::uint64_t a, std::uint64_t b = 0) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ static_cast<std::uint64_t>(stream));
  h = splitmix64(h ^ a);
  h = splitmix64(h ^ (b + 0x632be59bd9b4e019ULL));
  return Rng(h);
}

inline std::uint64_t entropy_seed() {
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

}  // namespace qoc
