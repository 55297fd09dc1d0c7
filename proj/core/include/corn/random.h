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

#ifndef CORN_RANDOM_H_
#define CORN_RANDOM_H_

#include <cstdint>
#include <initializer_list>
#include <random>

namespace corn {

using Rng = std::mt19937_64;

// Stream identifiers keep independent consumers of one run seed from
// sharing random sequences.
enum class RngStream : std::uint64_t {
  kModelInit = 1,
  kTrainPairs = 2,
  kHeldOutPairs = 3,
  kContentInvariance = 4,
  kSmallShift = 5,
  kRetrieval = 6,
  kToyCorpus = 7,
  kSynth = 8,
};

// SplitMix64-mixed combination of a base seed with any number of keys.
std::uint64_t DeriveSeed(std::uint64_t seed, std::initializer_list<std::uint64_t> keys);

inline Rng MakeRng(std::uint64_t seed, std::initializer_list<std::uint64_t> keys) {
  return Rng(DeriveSeed(seed, keys));
}

inline Rng MakeRng(std::uint64_t seed, RngStream stream, std::uint64_t index = 0) {
  return MakeRng(seed, {static_cast<std::uint64_t>(stream), index});
}

// Uniform double in [lo, hi) built from raw engine output, so results do not
// depend on the standard library's distribution implementation.
double UniformReal(Rng& rng, double lo, double hi);
// Uniform integer in [0, n).
std::uint64_t UniformIndex(Rng& rng, std::uint64_t n);
// Standard normal via Box-Muller on UniformReal.
double StandardNormal(Rng& rng);

}  // namespace corn

#endif  // CORN_RANDOM_H_
