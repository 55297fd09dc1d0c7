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

#ifndef CORN_DEGRADATIONS_H_
#define CORN_DEGRADATIONS_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

#include <nlohmann/json_fwd.hpp>

#include "corn/audio.h"

namespace corn {

enum class DegradationKind {
  kAdditiveNoise,
  kClip,
  kFreqMask,
  kMulawCompress,
  kGaussianNoise,
  kReverb,
};

std::string_view ToString(DegradationKind kind);
DegradationKind ParseDegradationKind(std::string_view name);

// Declarative recipe for one degraded signal. Only the fields belonging to
// `kind` are meaningful; `reverb_rir_id`, when non-empty, adds a reverb stage
// after the primary degradation (degraded path only).
struct DegradationSpec {
  DegradationKind kind = DegradationKind::kAdditiveNoise;

  // additive_noise, gaussian_noise: target SI-SDR of the mixture.
  double level_db = 0.0;
  // additive_noise: noise source and the sample offset of its excerpt.
  std::string noise_id;
  std::size_t noise_offset = 0;
  // gaussian_noise: seed of the white-noise generator.
  std::uint64_t noise_seed = 0;
  // clip
  double clip_threshold = 1.0;
  // freq_mask
  double mask_low_hz = 0.0;
  double mask_high_hz = 0.0;
  // mulaw_compress
  double mu = 255.0;
  int levels = 256;
  // reverb (primary kind) or optional trailing reverb stage.
  std::string rir_id;
  std::string reverb_rir_id;

  // Throws ContractError when the parameters do not fit the kind.
  void Validate(int sample_rate) const;

  friend bool operator==(const DegradationSpec&, const DegradationSpec&) = default;
};

void to_json(nlohmann::json& j, const DegradationSpec& spec);
void from_json(const nlohmann::json& j, DegradationSpec& spec);

// Hard clamp to [-threshold, threshold]; threshold in (0, 1].
Waveform ApplyClip(const Waveform& x, double threshold);

// Zeroes the STFT bins whose centre frequency lies in [low_hz, high_hz] and
// resynthesizes by weighted overlap-add (1024-point Hann frames, hop 256).
// Requires 0 < low < high < rate/2. Output length equals input length.
Waveform ApplyFreqMask(const Waveform& x, double low_hz, double high_hz);

// mu-law compand, quantize, expand. The quantizer is mid-tread (zero is a
// level) with 2*floor((levels-1)/2)+1 <= levels uniform steps over [-1, 1],
// so the companded-domain error is at most half a step. levels == 2 is a
// sign quantizer onto {-1, +1}.
Waveform ApplyMulawCompress(const Waveform& x, double mu, int levels);

// Full convolution with `rir`, truncated to the input length; divided by its
// peak if that exceeds 1.
Waveform ApplyReverb(const Waveform& x, const Waveform& rir);

double MuLawCompand(double x, double mu);
double MuLawExpand(double y, double mu);

}  // namespace corn

#endif  // CORN_DEGRADATIONS_H_
