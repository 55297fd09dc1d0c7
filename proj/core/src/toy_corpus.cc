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

#include "corn/toy_corpus.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>
#include <system_error>

#include "corn/error.h"

namespace corn {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kToyPeak = 0.9;

void ScaleToPeak(std::vector<double>& x, double peak) {
  const double current = Peak(x);
  if (current <= 0.0) return;
  for (double& v : x) v = v / current * peak;
}

// RBJ cookbook biquad.
struct Biquad {
  double b0 = 1, b1 = 0, b2 = 0, a1 = 0, a2 = 0;
  double z1 = 0, z2 = 0;

  double Process(double x) {
    const double y = b0 * x + z1;
    z1 = b1 * x - a1 * y + z2;
    z2 = b2 * x - a2 * y;
    return y;
  }
};

enum class FilterType { kLowpass, kHighpass, kBandpass };

Biquad MakeBiquad(FilterType type, double fc, double q, int rate) {
  const double w0 = kTwoPi * fc / rate;
  const double alpha = std::sin(w0) / (2.0 * q);
  const double cw = std::cos(w0);
  double b0, b1, b2;
  switch (type) {
    case FilterType::kLowpass:
      b0 = (1 - cw) / 2;
      b1 = 1 - cw;
      b2 = (1 - cw) / 2;
      break;
    case FilterType::kHighpass:
      b0 = (1 + cw) / 2;
      b1 = -(1 + cw);
      b2 = (1 + cw) / 2;
      break;
    case FilterType::kBandpass:
    default:
      b0 = alpha;
      b1 = 0;
      b2 = -alpha;
      break;
  }
  const double a0 = 1 + alpha;
  Biquad f;
  f.b0 = b0 / a0;
  f.b1 = b1 / a0;
  f.b2 = b2 / a0;
  f.a1 = -2 * cw / a0;
  f.a2 = (1 - alpha) / a0;
  return f;
}

double FormantGain(double freq, double center, double bandwidth) {
  const double d = (freq - center) / bandwidth;
  return 1.0 / (1.0 + d * d);
}

}  // namespace

Waveform SynthesizeToySpeech(Rng& rng, double duration_s, int sample_rate) {
  const auto n = static_cast<std::size_t>(std::llround(duration_s * sample_rate));
  Waveform w;
  w.sample_rate = sample_rate;
  w.samples.assign(n, 0.0);

  const double f0_base = UniformReal(rng, 90.0, 250.0);
  const double glide_rate = UniformReal(rng, 0.1, 0.5);
  const double glide_depth = UniformReal(rng, 0.05, 0.25);
  const double vibrato_rate = UniformReal(rng, 4.0, 7.0);
  const double vibrato_depth = UniformReal(rng, 0.005, 0.02);
  const double syllable_rate = UniformReal(rng, 2.5, 6.0);
  const double f1_center = UniformReal(rng, 300.0, 900.0);
  const double f2_center = UniformReal(rng, 900.0, 2500.0);
  const double formant_rate = UniformReal(rng, 0.5, 2.0);
  const double glide_phase = UniformReal(rng, 0.0, kTwoPi);
  const double syllable_phase = UniformReal(rng, 0.0, kTwoPi);
  const double breath = UniformReal(rng, 0.002, 0.02);

  // Pauses between phrases.
  std::vector<std::pair<double, double>> pauses;
  for (double t = UniformReal(rng, 0.5, 1.5); t < duration_s; t += UniformReal(rng, 1.0, 2.0)) {
    pauses.emplace_back(t, t + UniformReal(rng, 0.1, 0.35));
  }

  const int max_harmonics = 40;
  double phase = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / sample_rate;
    const double f0 = f0_base *
                      (1.0 + glide_depth * std::sin(kTwoPi * glide_rate * t + glide_phase)) *
                      (1.0 + vibrato_depth * std::sin(kTwoPi * vibrato_rate * t));
    phase += kTwoPi * f0 / sample_rate;
    if (phase > kTwoPi * 1e6) phase = std::fmod(phase, kTwoPi);

    const double f1 = f1_center * (1.0 + 0.3 * std::sin(kTwoPi * formant_rate * t));
    const double f2 = f2_center * (1.0 + 0.2 * std::cos(kTwoPi * formant_rate * 0.7 * t));
    double voiced = 0.0;
    for (int h = 1; h <= max_harmonics; ++h) {
      const double fh = h * f0;
      if (fh >= 0.45 * sample_rate) break;
      const double gain = (FormantGain(fh, f1, 120.0) + 0.6 * FormantGain(fh, f2, 200.0)) / h;
      voiced += gain * std::sin(h * phase);
    }
    double env = std::pow(std::max(0.0, std::sin(kTwoPi * syllable_rate * t / 2.0 + syllable_phase)), 2.0);
    for (const auto& [start, end] : pauses) {
      if (t >= start && t < end) env = 0.0;
    }
    w.samples[i] = env * voiced + breath * StandardNormal(rng);
  }
  ScaleToPeak(w.samples, kToyPeak);
  return w;
}

Waveform SynthesizeToyNoise(Rng& rng, double duration_s, int sample_rate) {
  const auto n = static_cast<std::size_t>(std::llround(duration_s * sample_rate));
  Waveform w;
  w.sample_rate = sample_rate;
  w.samples.assign(n, 0.0);

  const auto type = static_cast<FilterType>(UniformIndex(rng, 3));
  const double nyquist = 0.5 * sample_rate;
  const double fc = std::exp(UniformReal(rng, std::log(100.0), std::log(0.8 * nyquist)));
  const double q = UniformReal(rng, 0.5, 4.0);
  Biquad filter = MakeBiquad(type, fc, q, sample_rate);
  const bool bursty = UniformReal(rng, 0.0, 1.0) < 0.4;
  const bool hum = UniformReal(rng, 0.0, 1.0) < 0.25;
  const double hum_freq = UniformReal(rng, 0.0, 1.0) < 0.5 ? 50.0 : 60.0;
  const double burst_rate = UniformReal(rng, 1.0, 4.0);
  // Colour mix between white and brown-ish noise.
  const double leak = UniformReal(rng, 0.0, 0.98);

  double brown = 0.0;
  bool on = true;
  double next_toggle = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / sample_rate;
    if (bursty && t >= next_toggle) {
      on = !on;
      next_toggle = t + UniformReal(rng, 0.1, 1.0) / burst_rate;
    }
    const double white = StandardNormal(rng);
    brown = leak * brown + (1.0 - leak) * white;
    double v = filter.Process(brown + 0.3 * white);
    if (bursty && !on) v *= 0.05;
    if (hum) {
      v += 0.5 * std::sin(kTwoPi * hum_freq * t) + 0.2 * std::sin(kTwoPi * 3 * hum_freq * t);
    }
    w.samples[i] = v;
  }
  ScaleToPeak(w.samples, kToyPeak);
  return w;
}

Waveform SynthesizeToyRir(Rng& rng, int sample_rate) {
  const double rt60 = UniformReal(rng, 0.05, 0.4);
  const double length_s = std::min(0.5, rt60 * 1.2);
  const auto n = static_cast<std::size_t>(std::llround(length_s * sample_rate));
  const auto pre_delay = static_cast<std::size_t>(UniformIndex(rng, sample_rate / 200 + 1));
  Waveform w;
  w.sample_rate = sample_rate;
  w.samples.assign(std::max<std::size_t>(n, pre_delay + 2), 0.0);
  w.samples[0] = 1.0;
  const double decay = std::log(1000.0) / (rt60 * sample_rate);
  for (std::size_t i = pre_delay + 1; i < w.samples.size(); ++i) {
    w.samples[i] = 0.3 * StandardNormal(rng) * std::exp(-decay * static_cast<double>(i));
  }
  ScaleToPeak(w.samples, 1.0);
  return w;
}

Manifest GenerateToyCorpus(const std::filesystem::path& out_dir,
                           const ToyCorpusOptions& options) {
  if (options.n_clean < 1 || options.n_noise < 1 || options.n_rir < 0) {
    throw ContractError("toy corpus needs at least one clean and one noise clip");
  }
  if (options.min_duration_s < 4.0 || options.max_duration_s < options.min_duration_s) {
    throw ContractError("toy corpus durations must be at least 4 s");
  }
  std::error_code ec;
  for (const char* sub : {"clean", "noise", "rir"}) {
    std::filesystem::create_directories(out_dir / sub, ec);
    if (ec) throw IoError("cannot create " + (out_dir / sub).string() + ": " + ec.message());
  }

  Manifest manifest;
  manifest.base_dir = out_dir;
  char name[64];
  for (int i = 0; i < options.n_clean; ++i) {
    Rng rng = MakeRng(options.seed, {static_cast<std::uint64_t>(RngStream::kToyCorpus), 0, static_cast<std::uint64_t>(i)});
    const double dur = UniformReal(rng, options.min_duration_s, options.max_duration_s);
    std::snprintf(name, sizeof name, "clean/clean_%04d.wav", i);
    WriteWav(out_dir / name, SynthesizeToySpeech(rng, dur, options.sample_rate));
    manifest.entries.push_back({name, SourceKind::kClean});
  }
  for (int i = 0; i < options.n_noise; ++i) {
    Rng rng = MakeRng(options.seed, {static_cast<std::uint64_t>(RngStream::kToyCorpus), 1, static_cast<std::uint64_t>(i)});
    const double dur = UniformReal(rng, options.min_duration_s, options.max_duration_s);
    std::snprintf(name, sizeof name, "noise/noise_%04d.wav", i);
    WriteWav(out_dir / name, SynthesizeToyNoise(rng, dur, options.sample_rate));
    manifest.entries.push_back({name, SourceKind::kNoise});
  }
  for (int i = 0; i < options.n_rir; ++i) {
    Rng rng = MakeRng(options.seed, {static_cast<std::uint64_t>(RngStream::kToyCorpus), 2, static_cast<std::uint64_t>(i)});
    std::snprintf(name, sizeof name, "rir/rir_%04d.wav", i);
    WriteWav(out_dir / name, SynthesizeToyRir(rng, options.sample_rate));
    manifest.entries.push_back({name, SourceKind::kRir});
  }
  WriteManifest(out_dir / "manifest.jsonl", manifest);
  return manifest;
}

}  // namespace corn
