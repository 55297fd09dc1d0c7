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

#ifndef CORN_SYNTHESIS_H_
#define CORN_SYNTHESIS_H_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "corn/audio.h"
#include "corn/degradations.h"
#include "corn/excerpt.h"
#include "corn/manifest.h"
#include "corn/metrics.h"
#include "corn/random.h"

namespace corn {

// Decoded sources addressed by id (the manifest path).
class SourceBank {
 public:
  static SourceBank Load(const Manifest& manifest, int sample_rate = kWorkingSampleRate);

  void Add(SourceKind kind, std::string id, Waveform wave);

  const std::vector<std::string>& ids(SourceKind kind) const;
  const Waveform& Get(SourceKind kind, const std::string& id) const;
  const Waveform& At(SourceKind kind, std::size_t index) const;
  std::size_t Count(SourceKind kind) const { return ids(kind).size(); }

 private:
  struct Group {
    std::vector<std::string> ids;
    std::vector<Waveform> waves;
    std::map<std::string, std::size_t> index;
  };
  Group& group(SourceKind kind);
  const Group& group(SourceKind kind) const;

  Group clean_, noise_, rir_;
};

enum class SynthesisMode { kFull, kAdditiveOnly };

std::string_view ToString(SynthesisMode mode);
SynthesisMode ParseSynthesisMode(std::string_view name);

// Sampling ranges for every degradation kind. Kind weights are relative;
// kinds with weight 0 are never drawn.
struct DegradationSamplerConfig {
  double level_min_db = -40.0;
  double level_max_db = 40.0;
  // Fraction of the clean excerpt's peak, drawn log-uniformly.
  double clip_min = 0.05;
  double clip_max = 0.9;
  double mask_min_width_hz = 200.0;
  double mask_max_width_hz = 2000.0;
  double mulaw_mu = 255.0;
  std::vector<int> mulaw_levels = {16, 32, 64, 128};
  // Probability of a trailing reverb stage (needs rir sources).
  double reverb_prob = 0.0;

  double additive_weight = 0.5;
  double clip_weight = 0.25;
  double freq_mask_weight = 0.25;
  double mulaw_weight = 0.0;
  double gaussian_weight = 0.0;

  // Training weights plus the held-back kinds (gaussian noise, mu-law).
  DegradationSamplerConfig UnseenTest() const;
};

struct TrainingPair {
  Waveform degraded;
  Waveform reference;
  QualityScore target;
  DegradationSpec spec;
  std::string clean_id;
  double clean_offset_s = 0.0;
};

struct DegradedPair {
  Waveform degraded;
  Waveform reference;
};

// Applies `spec` to `clean` and returns (degraded, reference). When the
// degraded peak exceeds 1 both signals are divided by it, which leaves
// SI-SDR and SNR unchanged.
DegradedPair ApplyDegradation(const Waveform& clean, const DegradationSpec& spec,
                              const SourceBank& bank);

DegradationSpec SampleDegradation(Rng& rng, const Waveform& clean, const SourceBank& bank,
                                  const DegradationSamplerConfig& config, SynthesisMode mode);

// Samples a spec, applies it, and scores the final (degraded, reference)
// with `metric`. additive_only forces additive noise without reverb.
TrainingPair SynthesizePair(const Excerpt& clean, const SourceBank& bank, Rng& rng,
                            const TargetMetric& metric, SynthesisMode mode,
                            const DegradationSamplerConfig& config = {});

// Deterministic, index-addressed stream of training pairs: pair i depends
// only on (seed, stream, i), so any consumer sees the same sequence.
class PairSynthesizer {
 public:
  PairSynthesizer(const SourceBank& bank, TargetMetric metric, SynthesisMode mode,
                  DegradationSamplerConfig config, double excerpt_s, std::uint64_t seed,
                  RngStream stream = RngStream::kTrainPairs);

  TrainingPair Make(std::uint64_t index) const;
  std::vector<TrainingPair> MakeRange(std::uint64_t first, std::size_t count) const;

  const TargetMetric& metric() const { return metric_; }
  SynthesisMode mode() const { return mode_; }

 private:
  const SourceBank& bank_;
  TargetMetric metric_;
  SynthesisMode mode_;
  DegradationSamplerConfig config_;
  double excerpt_s_;
  std::uint64_t seed_;
  RngStream stream_;
};

}  // namespace corn

#endif  // CORN_SYNTHESIS_H_
