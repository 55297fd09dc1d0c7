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

#ifndef CORN_EXCERPT_H_
#define CORN_EXCERPT_H_

#include <cstddef>
#include <string>

#include "corn/audio.h"
#include "corn/random.h"

namespace corn {

inline constexpr double kDefaultExcerptSeconds = 3.0;

struct Excerpt {
  Waveform waveform;
  std::string source_id;
  double offset_s = 0.0;
};

std::size_t ExcerptLength(double length_s, int sample_rate);

// Contiguous slice of exactly round(length_s * rate) samples starting at a
// uniformly drawn offset. Inputs shorter than that are tiled: the slice
// wraps around to the beginning as often as needed.
Excerpt SampleExcerpt(const Waveform& wave, double length_s, Rng& rng,
                      std::string source_id = {});

// Same slicing rule with an explicit start offset (in samples, taken modulo
// the input length).
Excerpt ExcerptAt(const Waveform& wave, std::size_t length, std::size_t offset,
                  std::string source_id = {});

}  // namespace corn

#endif  // CORN_EXCERPT_H_
