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

#ifndef CORN_TOY_CORPUS_H_
#define CORN_TOY_CORPUS_H_

#include <cstdint>
#include <filesystem>

#include "corn/audio.h"
#include "corn/manifest.h"
#include "corn/random.h"

namespace corn {

struct ToyCorpusOptions {
  int n_clean = 50;
  int n_noise = 20;
  int n_rir = 0;
  std::uint64_t seed = 0;
  int sample_rate = kWorkingSampleRate;
  double min_duration_s = 4.0;
  double max_duration_s = 6.0;
};

// Speech-like clip: a gliding, vibrato-modulated harmonic series shaped by
// two moving formants and gated by a syllabic envelope. Peak is 0.9.
Waveform SynthesizeToySpeech(Rng& rng, double duration_s, int sample_rate);
// Biquad-filtered Gaussian noise, stationary or in bursts, optionally with
// a mains-hum component. Peak is 0.9.
Waveform SynthesizeToyNoise(Rng& rng, double duration_s, int sample_rate);
// Direct impulse followed by an exponentially decaying noise tail.
Waveform SynthesizeToyRir(Rng& rng, int sample_rate);

// Writes clean/, noise/ and rir/ float32 WAVs plus manifest.jsonl under
// `out_dir` and returns the manifest. Output is a pure function of the
// options.
Manifest GenerateToyCorpus(const std::filesystem::path& out_dir,
                           const ToyCorpusOptions& options);

}  // namespace corn

#endif  // CORN_TOY_CORPUS_H_
