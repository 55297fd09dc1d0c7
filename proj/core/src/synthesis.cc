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

#include "corn/synthesis.h"

#include <algorithm>
#include <cmath>

#include "corn/error.h"

namespace corn {
namespace {

constexpr int kMaxSynthesisAttempts = 16;

Waveform WhiteNoise(std::uint64_t seed, std::size_t n, int rate) {
  Rng rng(seed);
  Waveform w;
  w.sample_rate = rate;
  w.samples.resize(n);
  for (double& v : w.samples) v = StandardNormal(rng);
  return w;
}

Waveform MixedWith(const Waveform& clean, const Waveform& noise, double level_db) {
  Waveform out;
  out.sample_rate = clean.sample_rate;
  out.samples = MixAtSiSdr(clean.samples, noise.samples, level_db);
  return out;
}

}  // namespace

// --- SourceBank --------------------------------------------------------------

SourceBank SourceBank::Load(const Manifest& manifest, int sample_rate) {
  SourceBank bank;
  for (const auto& entry : manifest.entries) {
    bank.Add(entry.kind, entry.path, LoadAudio(manifest.Resolve(entry), sample_rate));
  }
  return bank;
}

void SourceBank::Add(SourceKind kind, std::string id, Waveform wave) {
  Group& g = group(kind);
  if (g.index.count(id)) throw ContractError("duplicate source id " + id);
  g.index[id] = g.waves.size();
  g.ids.push_back(std::move(id));
  g.waves.push_back(std::move(wave));
}

SourceBank::Group& SourceBank::group(SourceKind kind) {
  return kind == SourceKind::kClean ? clean_ : kind == SourceKind::kNoise ? noise_ : rir_;
}

const SourceBank::Group& SourceBank::group(SourceKind kind) const {
  return kind == SourceKind::kClean ? clean_ : kind == SourceKind::kNoise ? noise_ : rir_;
}

const std::vector<std::string>& SourceBank::ids(SourceKind kind) const { return group(kind).ids; }

const Waveform& SourceBank::Get(SourceKind kind, const std::string& id) const {
  const Group& g = group(kind);
  auto it = g.index.find(id);
  if (it == g.index.end()) {
    throw ContractError("unknown " + std::string(ToString(kind)) + " source '" + id + "'");
  }
  return g.waves[it->second];
}

const Waveform& SourceBank::At(SourceKind kind, std::size_t index) const {
  return group(kind).waves.at(index);
}

// --- sampling ------------------------------------------------------------------

std::string_view ToString(SynthesisMode mode) {
  return mode == SynthesisMode::kFull ? "full" : "additive_only";
}

SynthesisMode ParseSynthesisMode(std::string_view name) {
  if (name == "full") return SynthesisMode::kFull;
  if (name == "additive_only") return SynthesisMode::kAdditiveOnly;
  throw ConfigError("unknown synthesis mode '" + std::string(name) + "'");
}

DegradationSamplerConfig DegradationSamplerConfig::UnseenTest() const {
  DegradationSamplerConfig c = *this;
  const double base = additive_weight + clip_weight + freq_mask_weight;
  if (c.mulaw_weight <= 0.0) c.mulaw_weight = 0.25 * base;
  if (c.gaussian_weight <= 0.0) c.gaussian_weight = 0.25 * base;
  return c;
}

DegradationSpec SampleDegradation(Rng& rng, const Waveform& clean, const SourceBank& bank,
                                  const DegradationSamplerConfig& config, SynthesisMode mode) {
  DegradationSpec spec;
  if (mode == SynthesisMode::kAdditiveOnly) {
    spec.kind = DegradationKind::kAdditiveNoise;
  } else {
    const std::pair<DegradationKind, double> weights[] = {
        {DegradationKind::kAdditiveNoise, config.additive_weight},
        {DegradationKind::kClip, config.clip_weight},
        {DegradationKind::kFreqMask, config.freq_mask_weight},
        {DegradationKind::kMulawCompress, config.mulaw_weight},
        {DegradationKind::kGaussianNoise, config.gaussian_weight},
    };
    double total = 0.0;
    for (const auto& [kind, w] : weights) total += std::max(0.0, w);
    if (!(total > 0.0)) throw ConfigError("all degradation weights are zero");
    double u = UniformReal(rng, 0.0, total);
    spec.kind = DegradationKind::kAdditiveNoise;
    for (const auto& [kind, w] : weights) {
      if (w <= 0.0) continue;
      spec.kind = kind;
      if (u < w) break;
      u -= w;
    }
  }

  switch (spec.kind) {
    case DegradationKind::kAdditiveNoise: {
      const std::size_t n_noise = bank.Count(SourceKind::kNoise);
      if (n_noise == 0) throw ContractError("additive noise needs at least one noise source");
      const std::size_t idx = UniformIndex(rng, n_noise);
      spec.noise_id = bank.ids(SourceKind::kNoise)[idx];
      spec.noise_offset = UniformIndex(rng, bank.At(SourceKind::kNoise, idx).size());
      spec.level_db = UniformReal(rng, config.level_min_db, config.level_max_db);
      break;
    }
    case DegradationKind::kGaussianNoise:
      spec.noise_seed = rng();
      spec.level_db = UniformReal(rng, config.level_min_db, config.level_max_db);
      break;
    case DegradationKind::kClip: {
      const double fraction = std::exp(UniformReal(rng, std::log(config.clip_min), std::log(config.clip_max)));
      const double peak = Peak(clean.samples);
      spec.clip_threshold = std::clamp(fraction * (peak > 0.0 ? peak : 1.0), 1e-6, 1.0);
      break;
    }
    case DegradationKind::kFreqMask: {
      const double nyquist = 0.5 * clean.sample_rate;
      const double margin = 50.0;
      const double width = std::min(UniformReal(rng, config.mask_min_width_hz, config.mask_max_width_hz),
                                    nyquist - 3.0 * margin);
      spec.mask_low_hz = UniformReal(rng, margin, nyquist - margin - width);
      spec.mask_high_hz = spec.mask_low_hz + width;
      break;
    }
    case DegradationKind::kMulawCompress:
      spec.mu = config.mulaw_mu;
      spec.levels = config.mulaw_levels.at(UniformIndex(rng, config.mulaw_levels.size()));
      break;
    case DegradationKind::kReverb:
      break;
  }

  if (mode == SynthesisMode::kFull && bank.Count(SourceKind::kRir) > 0 && config.reverb_prob > 0.0 &&
      UniformReal(rng, 0.0, 1.0) < config.reverb_prob) {
    spec.reverb_rir_id = bank.ids(SourceKind::kRir)[UniformIndex(rng, bank.Count(SourceKind::kRir))];
  }
  return spec;
}

DegradedPair ApplyDegradation(const Waveform& clean, const DegradationSpec& spec,
                              const SourceBank& bank) {
  spec.Validate(clean.sample_rate);
  DegradedPair out;
  out.reference = clean;
  switch (spec.kind) {
    case DegradationKind::kAdditiveNoise: {
      const Waveform& noise = bank.Get(SourceKind::kNoise, spec.noise_id);
      const Excerpt slice = ExcerptAt(noise, clean.size(), spec.noise_offset, spec.noise_id);
      out.degraded = MixedWith(clean, slice.waveform, spec.level_db);
      break;
    }
    case DegradationKind::kGaussianNoise:
      out.degraded = MixedWith(clean, WhiteNoise(spec.noise_seed, clean.size(), clean.sample_rate),
                               spec.level_db);
      break;
    case DegradationKind::kClip:
      out.degraded = ApplyClip(clean, spec.clip_threshold);
      break;
    case DegradationKind::kFreqMask:
      out.degraded = ApplyFreqMask(clean, spec.mask_low_hz, spec.mask_high_hz);
      break;
    case DegradationKind::kMulawCompress:
      out.degraded = ApplyMulawCompress(clean, spec.mu, spec.levels);
      break;
    case DegradationKind::kReverb:
      out.degraded = ApplyReverb(clean, bank.Get(SourceKind::kRir, spec.rir_id));
      break;
  }
  if (!spec.reverb_rir_id.empty()) {
    out.degraded = ApplyReverb(out.degraded, bank.Get(SourceKind::kRir, spec.reverb_rir_id));
  }
  const double peak = Peak(out.degraded.samples);
  if (peak > 1.0) {
    for (double& v : out.degraded.samples) v /= peak;
    for (double& v : out.reference.samples) v /= peak;
  }
  return out;
}

namespace {

// Draws a fresh noise slice for the noise kinds; false for the others.
bool RedrawNoise(DegradationSpec& spec, Rng& rng, const SourceBank& bank) {
  if (spec.kind == DegradationKind::kAdditiveNoise) {
    const std::size_t idx = UniformIndex(rng, bank.Count(SourceKind::kNoise));
    spec.noise_id = bank.ids(SourceKind::kNoise)[idx];
    spec.noise_offset = UniformIndex(rng, bank.At(SourceKind::kNoise, idx).size());
  } else if (spec.kind == DegradationKind::kGaussianNoise) {
    spec.noise_seed = rng();
  } else {
    return false;
  }
  return true;
}

}  // namespace

TrainingPair SynthesizePair(const Excerpt& clean, const SourceBank& bank, Rng& rng,
                            const TargetMetric& metric, SynthesisMode mode,
                            const DegradationSamplerConfig& config) {
  if (Energy(clean.waveform.samples) <= 0.0) {
    throw DomainError("clean excerpt from '" + clean.source_id + "' is silent");
  }
  DegradationSpec spec = SampleDegradation(rng, clean.waveform, bank, config, mode);
  for (int attempt = 0;; ++attempt) {
    try {
      DegradedPair signals = ApplyDegradation(clean.waveform, spec, bank);
      TrainingPair pair;
      pair.target = metric(signals.degraded.samples, signals.reference.samples);
      pair.degraded = std::move(signals.degraded);
      pair.reference = std::move(signals.reference);
      pair.spec = std::move(spec);
      pair.clean_id = clean.source_id;
      pair.clean_offset_s = clean.offset_s;
      return pair;
    } catch (const DomainError&) {
      // The noise slice is too correlated with the excerpt to reach the level.
      // Redraw only the slice, so the sampled levels stay uniform.
      if (attempt + 1 >= kMaxSynthesisAttempts || !RedrawNoise(spec, rng, bank)) throw;
    }
  }
}

PairSynthesizer::PairSynthesizer(const SourceBank& bank, TargetMetric metric, SynthesisMode mode,
                                 DegradationSamplerConfig config, double excerpt_s,
                                 std::uint64_t seed, RngStream stream)
    : bank_(bank),
      metric_(std::move(metric)),
      mode_(mode),
      config_(std::move(config)),
      excerpt_s_(excerpt_s),
      seed_(seed),
      stream_(stream) {
  if (bank_.Count(SourceKind::kClean) == 0) throw ContractError("no clean sources");
}

TrainingPair PairSynthesizer::Make(std::uint64_t index) const {
  Rng rng = MakeRng(seed_, stream_, index);
  const std::size_t n_clean = bank_.Count(SourceKind::kClean);
  for (int attempt = 0;; ++attempt) {
    const std::size_t ci = UniformIndex(rng, n_clean);
    const Excerpt clean = SampleExcerpt(bank_.At(SourceKind::kClean, ci), excerpt_s_, rng,
                                        bank_.ids(SourceKind::kClean)[ci]);
    try {
      return SynthesizePair(clean, bank_, rng, metric_, mode_, config_);
    } catch (const DomainError&) {
      // Silent excerpt; draw another.
      if (attempt + 1 >= kMaxSynthesisAttempts) throw;
    }
  }
}

std::vector<TrainingPair> PairSynthesizer::MakeRange(std::uint64_t first, std::size_t count) const {
  std::vector<TrainingPair> pairs;
  pairs.reserve(count);
  for (std::size_t i = 0; i < count; ++i) pairs.push_back(Make(first + i));
  return pairs;
}

}  // namespace corn
