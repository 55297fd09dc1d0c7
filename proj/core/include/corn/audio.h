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

#ifndef CORN_AUDIO_H_
#define CORN_AUDIO_H_

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

namespace corn {

inline constexpr int kWorkingSampleRate = 16000;

// Mono signal. Samples are kept in [-1, 1]; every loader and degradation
// either clamps or rescales to maintain that.
struct Waveform {
  std::vector<double> samples;
  int sample_rate = kWorkingSampleRate;

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
  double duration_s() const {
    return static_cast<double>(samples.size()) / sample_rate;
  }
  std::span<const double> view() const { return samples; }
};

enum class SampleFormat { kPcm16, kFloat32 };

// Interleaved-free multichannel buffer as decoded from a WAV container.
struct DecodedAudio {
  int sample_rate = 0;
  std::vector<std::vector<double>> channels;

  std::size_t frames() const {
    return channels.empty() ? 0 : channels.front().size();
  }
};

// RIFF/WAVE reader for PCM (8/16/24/32-bit) and IEEE float (32/64-bit),
// including WAVE_FORMAT_EXTENSIBLE. Throws IoError or FormatError.
DecodedAudio ReadWav(const std::filesystem::path& path);

void WriteWav(const std::filesystem::path& path, const Waveform& wave,
              SampleFormat format = SampleFormat::kFloat32);
void WriteWav(const std::filesystem::path& path,
              const DecodedAudio& audio, SampleFormat format);

// Band-limited (windowed-sinc) resampling between integer rates. Output
// length is ceil(n * to / from).
std::vector<double> Resample(std::span<const double> input, int from_rate,
                             int to_rate);

// Decodes `path`, averages channels, resamples to `target_rate` and divides
// by the peak only when the peak exceeds 1. Zero-length audio is a
// FormatError.
Waveform LoadAudio(const std::filesystem::path& path,
                   int target_rate = kWorkingSampleRate);

double Peak(std::span<const double> x);
double Energy(std::span<const double> x);
double Dot(std::span<const double> a, std::span<const double> b);

// Divides by the peak if it exceeds 1 and returns the factor applied
// (1.0 when untouched).
double NormalizePeakIfAbove(std::vector<double>& x, double ceiling = 1.0);

}  // namespace corn

#endif  // CORN_AUDIO_H_
