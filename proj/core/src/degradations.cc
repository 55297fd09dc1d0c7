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

#include "corn/degradations.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <nlohmann/json.hpp>

#include "corn/error.h"
#include "corn/fft.h"

namespace corn {
namespace {

constexpr std::size_t kMaskFrame = 1024;
constexpr std::size_t kMaskHop = 256;
constexpr std::size_t kLpcOrder = 32;

// Linear-prediction coefficients (autocorrelation method, Levinson-Durbin)
// of a Hann-weighted segment. a[k] predicts from the sample k+1 steps back.
std::vector<double> LpcCoefficients(const std::vector<double>& seg, std::size_t order) {
  const std::size_t n = seg.size();
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = seg[i] * (0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * (i + 0.5) / n));
  }
  std::vector<double> r(order + 1, 0.0);
  for (std::size_t k = 0; k <= order; ++k) {
    for (std::size_t i = k; i < n; ++i) r[k] += w[i] * w[i - k];
  }
  std::vector<double> a(order, 0.0), prev;
  if (!(r[0] > 0.0)) return a;
  double err = r[0] * (1.0 + 1e-9);
  for (std::size_t i = 0; i < order; ++i) {
    double acc = r[i + 1];
    for (std::size_t j = 0; j < i; ++j) acc -= a[j] * r[i - j];
    const double k = acc / err;
    prev = a;
    a[i] = k;
    for (std::size_t j = 0; j < i; ++j) a[j] = prev[j] - k * prev[i - 1 - j];
    err *= 1.0 - k * k;
    if (!(err > 0.0)) break;
  }
  return a;
}

// Continues `x` forward by `count` samples with a predictor fit to its tail.
// Zeros when the signal is too short to fit one.
std::vector<double> Extrapolate(const std::vector<double>& x, std::size_t count) {
  std::vector<double> out(count, 0.0);
  if (x.size() <= 2 * kLpcOrder) return out;
  const std::size_t span = std::min(x.size(), kMaskFrame);
  const std::vector<double> a =
      LpcCoefficients(std::vector<double>(x.end() - static_cast<std::ptrdiff_t>(span), x.end()), kLpcOrder);
  std::vector<double> hist(x.end() - static_cast<std::ptrdiff_t>(kLpcOrder), x.end());
  hist.reserve(kLpcOrder + count);
  for (std::size_t t = 0; t < count; ++t) {
    double v = 0.0;
    for (std::size_t k = 0; k < kLpcOrder; ++k) v += a[k] * hist[hist.size() - 1 - k];
    hist.push_back(v);
    out[t] = v;
  }
  return out;
}

}  // namespace

std::string_view ToString(DegradationKind kind) {
  switch (kind) {
    case DegradationKind::kAdditiveNoise:
      return "additive_noise";
    case DegradationKind::kClip:
      return "clip";
    case DegradationKind::kFreqMask:
      return "freq_mask";
    case DegradationKind::kMulawCompress:
      return "mulaw_compress";
    case DegradationKind::kGaussianNoise:
      return "gaussian_noise";
    case DegradationKind::kReverb:
      return "reverb";
  }
  return "additive_noise";
}

DegradationKind ParseDegradationKind(std::string_view name) {
  for (auto kind : {DegradationKind::kAdditiveNoise, DegradationKind::kClip,
                    DegradationKind::kFreqMask, DegradationKind::kMulawCompress,
                    DegradationKind::kGaussianNoise, DegradationKind::kReverb}) {
    if (ToString(kind) == name) return kind;
  }
  throw FormatError("unknown degradation kind '" + std::string(name) + "'");
}

void DegradationSpec::Validate(int sample_rate) const {
  auto fail = [this](const std::string& why) {
    throw ContractError("invalid " + std::string(ToString(kind)) + " spec: " + why);
  };
  switch (kind) {
    case DegradationKind::kAdditiveNoise:
      if (noise_id.empty()) fail("missing noise_id");
      [[fallthrough]];
    case DegradationKind::kGaussianNoise:
      if (!(level_db >= -80.0 && level_db <= 80.0)) fail("level_db outside [-80, 80]");
      break;
    case DegradationKind::kClip:
      if (!(clip_threshold > 0.0 && clip_threshold <= 1.0)) fail("clip threshold outside (0, 1]");
      break;
    case DegradationKind::kFreqMask:
      if (!(mask_low_hz > 0.0 && mask_low_hz < mask_high_hz && mask_high_hz < 0.5 * sample_rate)) {
        fail("mask band must satisfy 0 < low < high < rate/2");
      }
      break;
    case DegradationKind::kMulawCompress:
      if (!(mu > 0.0)) fail("mu must be positive");
      if (levels < 2) fail("levels must be at least 2");
      break;
    case DegradationKind::kReverb:
      if (rir_id.empty()) fail("missing rir_id");
      break;
  }
}

void to_json(nlohmann::json& j, const DegradationSpec& s) {
  j = nlohmann::json{{"kind", std::string(ToString(s.kind))}};
  switch (s.kind) {
    case DegradationKind::kAdditiveNoise:
      j["level_db"] = s.level_db;
      j["noise_id"] = s.noise_id;
      j["noise_offset"] = s.noise_offset;
      break;
    case DegradationKind::kGaussianNoise:
      j["level_db"] = s.level_db;
      j["noise_seed"] = s.noise_seed;
      break;
    case DegradationKind::kClip:
      j["clip_threshold"] = s.clip_threshold;
      break;
    case DegradationKind::kFreqMask:
      j["mask_low_hz"] = s.mask_low_hz;
      j["mask_high_hz"] = s.mask_high_hz;
      break;
    case DegradationKind::kMulawCompress:
      j["mu"] = s.mu;
      j["levels"] = s.levels;
      break;
    case DegradationKind::kReverb:
      j["rir_id"] = s.rir_id;
      break;
  }
  if (!s.reverb_rir_id.empty()) j["reverb_rir_id"] = s.reverb_rir_id;
}

void from_json(const nlohmann::json& j, DegradationSpec& s) {
  s = DegradationSpec{};
  s.kind = ParseDegradationKind(j.at("kind").get<std::string>());
  auto opt = [&j](const char* key, auto& field) {
    if (j.contains(key)) j.at(key).get_to(field);
  };
  opt("level_db", s.level_db);
  opt("noise_id", s.noise_id);
  opt("noise_offset", s.noise_offset);
  opt("noise_seed", s.noise_seed);
  opt("clip_threshold", s.clip_threshold);
  opt("mask_low_hz", s.mask_low_hz);
  opt("mask_high_hz", s.mask_high_hz);
  opt("mu", s.mu);
  opt("levels", s.levels);
  opt("rir_id", s.rir_id);
  opt("reverb_rir_id", s.reverb_rir_id);
}

Waveform ApplyClip(const Waveform& x, double threshold) {
  if (!(threshold > 0.0 && threshold <= 1.0)) throw ContractError("clip threshold outside (0, 1]");
  Waveform out = x;
  for (double& v : out.samples) v = std::clamp(v, -threshold, threshold);
  return out;
}

Waveform ApplyFreqMask(const Waveform& x, double low_hz, double high_hz) {
  const double nyquist = 0.5 * x.sample_rate;
  if (!(low_hz > 0.0 && low_hz < high_hz && high_hz < nyquist)) {
    throw ContractError("freq mask band must satisfy 0 < low < high < rate/2");
  }
  const std::size_t n = x.size();
  const std::size_t pad = kMaskFrame;
  const std::size_t padded_len = n + 2 * pad;
  std::vector<double> padded(padded_len, 0.0);
  std::copy(x.samples.begin(), x.samples.end(), padded.begin() + pad);
  // Predictive extension past both ends keeps the edge frames free of the
  // broadband onset a hard boundary would add.
  const std::vector<double> tail = Extrapolate(x.samples, pad);
  const std::vector<double> head =
      Extrapolate(std::vector<double>(x.samples.rbegin(), x.samples.rend()), pad);
  for (std::size_t j = 0; j < pad; ++j) {
    padded[pad - 1 - j] = head[j];
    padded[pad + n + j] = tail[j];
  }

  std::vector<double> window(kMaskFrame);
  for (std::size_t i = 0; i < kMaskFrame; ++i) {
    window[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / kMaskFrame);
  }
  const double bin_hz = static_cast<double>(x.sample_rate) / kMaskFrame;
  const auto first_bin = static_cast<std::size_t>(std::ceil(low_hz / bin_hz));
  const auto last_bin = static_cast<std::size_t>(std::floor(high_hz / bin_hz));

  RealFft fft(kMaskFrame);
  std::vector<double> out(padded_len, 0.0), norm(padded_len, 0.0), frame(kMaskFrame), resynth;
  std::vector<std::complex<double>> spectrum;
  for (std::size_t start = 0; start + kMaskFrame <= padded_len; start += kMaskHop) {
    for (std::size_t i = 0; i < kMaskFrame; ++i) frame[i] = padded[start + i] * window[i];
    fft.Forward(frame, spectrum);
    for (std::size_t k = first_bin; k <= last_bin && k < spectrum.size(); ++k) spectrum[k] = 0.0;
    fft.Inverse(spectrum, resynth);
    for (std::size_t i = 0; i < kMaskFrame; ++i) {
      out[start + i] += resynth[i] / kMaskFrame * window[i];
      norm[start + i] += window[i] * window[i];
    }
  }

  Waveform result;
  result.sample_rate = x.sample_rate;
  result.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double w = norm[pad + i];
    result.samples[i] = w > 1e-12 ? out[pad + i] / w : 0.0;
  }
  NormalizePeakIfAbove(result.samples);
  return result;
}

double MuLawCompand(double x, double mu) {
  return std::copysign(std::log1p(mu * std::abs(x)) / std::log1p(mu), x);
}

double MuLawExpand(double y, double mu) {
  return std::copysign(std::expm1(std::abs(y) * std::log1p(mu)) / mu, y);
}

Waveform ApplyMulawCompress(const Waveform& x, double mu, int levels) {
  if (!(mu > 0.0) || levels < 2) throw ContractError("mu-law needs mu > 0 and levels >= 2");
  const int half_steps = std::max(1, (levels - 1) / 2);
  Waveform out = x;
  for (double& v : out.samples) {
    const double y = MuLawCompand(std::clamp(v, -1.0, 1.0), mu);
    const double q = levels == 2 ? (y < 0.0 ? -1.0 : 1.0) : std::round(y * half_steps) / half_steps;
    v = std::clamp(MuLawExpand(q, mu), -1.0, 1.0);
  }
  return out;
}

Waveform ApplyReverb(const Waveform& x, const Waveform& rir) {
  if (rir.empty()) throw ContractError("reverb needs a non-empty impulse response");
  if (x.empty()) return x;
  Waveform out;
  out.sample_rate = x.sample_rate;
  out.samples = FftConvolveTruncated(x.samples, rir.samples);
  NormalizePeakIfAbove(out.samples);
  return out;
}

}  // namespace corn
