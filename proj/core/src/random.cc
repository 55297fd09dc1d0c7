// Copyright 2026 The CORN Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "corn/random.h"

#include <cmath>
#include <numbers>

#include "corn/error.h"

namespace corn {
namespace {

std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t DeriveSeed(std::uint64_t seed, std::initializer_list<std::uint64_t> keys) {
  std::uint64_t h = SplitMix64(seed);
  for (std::uint64_t k : keys) h = SplitMix64(h ^ SplitMix64(k + 0x632BE59BD9B4E019ULL));
  return h;
}

double UniformReal(Rng& rng, double lo, double hi) {
  // 53 random mantissa bits -> [0, 1).
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

std::uint64_t UniformIndex(Rng& rng, std::uint64_t n) {
  if (n == 0) throw ContractError("UniformIndex: empty range");
  // Rejection sampling removes modulo bias.
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t v;
  do {
    v = rng();
  } while (v >= limit);
  return v % n;
}

double StandardNormal(Rng& rng) {
  double u1;
  do {
    u1 = UniformReal(rng, 0.0, 1.0);
  } while (u1 <= 0.0);
  const double u2 = UniformReal(rng, 0.0, 1.0);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace corn
