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

#include "corn/excerpt.h"

#include <cmath>
#include <utility>

#include "corn/error.h"

namespace corn {

std::size_t ExcerptLength(double length_s, int sample_rate) {
  if (!(length_s > 0.0)) throw ContractError("excerpt length must be positive");
  const auto n = static_cast<std::size_t>(std::llround(length_s * sample_rate));
  if (n == 0) throw ContractError("excerpt shorter than one sample");
  return n;
}

Excerpt ExcerptAt(const Waveform& wave, std::size_t length, std::size_t offset,
                  std::string source_id) {
  if (wave.empty()) throw ContractError("cannot excerpt an empty waveform");
  const std::size_t n = wave.size();
  offset %= n;
  Excerpt ex;
  ex.source_id = std::move(source_id);
  ex.offset_s = static_cast<double>(offset) / wave.sample_rate;
  ex.waveform.sample_rate = wave.sample_rate;
  ex.waveform.samples.resize(length);
  std::size_t src = offset;
  for (std::size_t i = 0; i < length; ++i) {
    ex.waveform.samples[i] = wave.samples[src];
    if (++src == n) src = 0;
  }
  return ex;
}

Excerpt SampleExcerpt(const Waveform& wave, double length_s, Rng& rng,
                      std::string source_id) {
  const std::size_t length = ExcerptLength(length_s, wave.sample_rate);
  if (wave.empty()) throw ContractError("cannot excerpt an empty waveform");
  // Long inputs: any start that keeps the slice in bounds. Short inputs:
  // any start, wrapping.
  const std::size_t choices = wave.size() >= length ? wave.size() - length + 1 : wave.size();
  const std::size_t offset = UniformIndex(rng, choices);
  return ExcerptAt(wave, length, offset, std::move(source_id));
}

}  // namespace corn
