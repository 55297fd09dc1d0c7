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

#include "corn/audio.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <numbers>
#include <numeric>
#include <string>

#include "corn/error.h"

namespace corn {
namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint16_t ReadU16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t ReadU32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) |
         (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

void PutU16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>((v >> 8) & 0xFF));
}

void PutU32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

double DecodeSample(const unsigned char* p, std::uint16_t format, int bits) {
  if (format == kFormatFloat) {
    if (bits == 32) {
      std::uint32_t u = ReadU32(p);
      float f;
      std::memcpy(&f, &u, sizeof f);
      return f;
    }
    std::uint64_t u = static_cast<std::uint64_t>(ReadU32(p)) |
                      (static_cast<std::uint64_t>(ReadU32(p + 4)) << 32);
    double d;
    std::memcpy(&d, &u, sizeof d);
    return d;
  }
  switch (bits) {
    case 8:
      return (static_cast<int>(p[0]) - 128) / 128.0;
    case 16:
      return static_cast<std::int16_t>(ReadU16(p)) / 32768.0;
    case 24: {
      std::int32_t v = static_cast<std::int32_t>(
          (static_cast<std::uint32_t>(p[0]) << 8) |
          (static_cast<std::uint32_t>(p[1]) << 16) |
          (static_cast<std::uint32_t>(p[2]) << 24));
      return (v >> 8) / 8388608.0;
    }
    default:
      return static_cast<std::int32_t>(ReadU32(p)) / 2147483648.0;
  }
}

}  // namespace

DecodedAudio ReadWav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open audio file: " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  const auto* data = reinterpret_cast<const unsigned char*>(bytes.data());
  const std::size_t n = bytes.size();
  if (n < 12 || std::memcmp(data, "RIFF", 4) != 0 ||
      std::memcmp(data + 8, "WAVE", 4) != 0) {
    throw FormatError("not a RIFF/WAVE file: " + path.string());
  }

  std::uint16_t format = 0;
  int channels = 0;
  int sample_rate = 0;
  int bits = 0;
  const unsigned char* pcm = nullptr;
  std::size_t pcm_bytes = 0;

  std::size_t pos = 12;
  while (pos + 8 <= n) {
    const unsigned char* chunk = data + pos;
    std::size_t size = ReadU32(chunk + 4);
    const unsigned char* body = chunk + 8;
    std::size_t available = n - pos - 8;
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (size < 16 || available < 16) throw FormatError("short fmt chunk: " + path.string());
      format = ReadU16(body);
      channels = ReadU16(body + 2);
      sample_rate = static_cast<int>(ReadU32(body + 4));
      bits = ReadU16(body + 14);
      if (format == kFormatExtensible) {
        if (size < 40 || available < 40) throw FormatError("short extensible fmt chunk: " + path.string());
        format = ReadU16(body + 24);
      }
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      pcm = body;
      pcm_bytes = std::min(size, available);
    }
    pos += 8 + size + (size & 1);
  }

  if (format == 0) throw FormatError("missing fmt chunk: " + path.string());
  if (pcm == nullptr) throw FormatError("missing data chunk: " + path.string());
  const bool supported =
      (format == kFormatPcm && (bits == 8 || bits == 16 || bits == 24 || bits == 32)) ||
      (format == kFormatFloat && (bits == 32 || bits == 64));
  if (!supported || channels <= 0 || sample_rate <= 0) {
    throw FormatError("unsupported WAV encoding in " + path.string());
  }

  const std::size_t frame_bytes = static_cast<std::size_t>(channels) * (bits / 8);
  const std::size_t frames = pcm_bytes / frame_bytes;
  if (frames == 0) throw FormatError("zero-length audio: " + path.string());

  DecodedAudio out;
  out.sample_rate = sample_rate;
  out.channels.assign(channels, std::vector<double>(frames));
  for (std::size_t f = 0; f < frames; ++f) {
    for (int c = 0; c < channels; ++c) {
      out.channels[c][f] =
          DecodeSample(pcm + f * frame_bytes + c * (bits / 8), format, bits);
    }
  }
  return out;
}

void WriteWav(const std::filesystem::path& path, const DecodedAudio& audio,
              SampleFormat format) {
  const int channels = static_cast<int>(audio.channels.size());
  if (channels == 0) throw ContractError("WriteWav: no channels");
  const std::size_t frames = audio.frames();
  for (const auto& ch : audio.channels) {
    if (ch.size() != frames) throw ContractError("WriteWav: ragged channels");
  }
  const int bytes_per_sample = format == SampleFormat::kPcm16 ? 2 : 4;
  const std::uint32_t data_bytes =
      static_cast<std::uint32_t>(frames * channels * bytes_per_sample);

  std::string out;
  out.reserve(44 + data_bytes);
  out += "RIFF";
  PutU32(out, 36 + data_bytes);
  out += "WAVEfmt ";
  PutU32(out, 16);
  PutU16(out, format == SampleFormat::kPcm16 ? kFormatPcm : kFormatFloat);
  PutU16(out, static_cast<std::uint16_t>(channels));
  PutU32(out, static_cast<std::uint32_t>(audio.sample_rate));
  PutU32(out, static_cast<std::uint32_t>(audio.sample_rate * channels * bytes_per_sample));
  PutU16(out, static_cast<std::uint16_t>(channels * bytes_per_sample));
  PutU16(out, static_cast<std::uint16_t>(8 * bytes_per_sample));
  out += "data";
  PutU32(out, data_bytes);
  for (std::size_t f = 0; f < frames; ++f) {
    for (int c = 0; c < channels; ++c) {
      double v = audio.channels[c][f];
      if (format == SampleFormat::kPcm16) {
        long q = std::lround(std::clamp(v, -1.0, 1.0) * 32768.0);
        q = std::clamp(q, -32768L, 32767L);
        PutU16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(q)));
      } else {
        float fv = static_cast<float>(v);
        std::uint32_t u;
        std::memcpy(&u, &fv, sizeof u);
        PutU32(out, u);
      }
    }
  }

  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError("cannot open for writing: " + path.string());
  file.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!file) throw IoError("write failed: " + path.string());
}

void WriteWav(const std::filesystem::path& path, const Waveform& wave,
              SampleFormat format) {
  DecodedAudio audio;
  audio.sample_rate = wave.sample_rate;
  audio.channels.push_back(wave.samples);
  WriteWav(path, audio, format);
}

std::vector<double> Resample(std::span<const double> input, int from_rate,
                             int to_rate) {
  if (from_rate <= 0 || to_rate <= 0) throw ContractError("Resample: rates must be positive");
  if (from_rate == to_rate) return {input.begin(), input.end()};

  const int g = std::gcd(from_rate, to_rate);
  const long up = to_rate / g;
  const long down = from_rate / g;
  const std::size_t n_in = input.size();
  const std::size_t n_out = static_cast<std::size_t>(
      (static_cast<long long>(n_in) * up + down - 1) / down);

  // Hann-windowed sinc; cutoff at the lower Nyquist with a small guard band.
  constexpr int kZeroCrossings = 16;
  const double cutoff = 0.95 * std::min(1.0, static_cast<double>(up) / down);
  const double half_width = kZeroCrossings / cutoff;

  std::vector<double> out(n_out);
  for (std::size_t m = 0; m < n_out; ++m) {
    const double t = static_cast<double>(m) * down / up;
    const long first = static_cast<long>(std::ceil(t - half_width));
    const long last = static_cast<long>(std::floor(t + half_width));
    double acc = 0.0;
    for (long k = std::max(first, 0L); k <= last && k < static_cast<long>(n_in); ++k) {
      const double d = t - k;
      const double arg = cutoff * d;
      const double sinc = arg == 0.0 ? 1.0 : std::sin(std::numbers::pi * arg) / (std::numbers::pi * arg);
      const double window = 0.5 + 0.5 * std::cos(std::numbers::pi * d / half_width);
      acc += input[k] * cutoff * sinc * window;
    }
    out[m] = acc;
  }
  return out;
}

Waveform LoadAudio(const std::filesystem::path& path, int target_rate) {
  DecodedAudio audio = ReadWav(path);
  const std::size_t frames = audio.frames();
  std::vector<double> mono(frames, 0.0);
  const double scale = 1.0 / static_cast<double>(audio.channels.size());
  for (const auto& ch : audio.channels) {
    for (std::size_t i = 0; i < frames; ++i) mono[i] += ch[i] * scale;
  }
  for (double v : mono) {
    if (!std::isfinite(v)) throw FormatError("non-finite sample in " + path.string());
  }

  Waveform wave;
  wave.sample_rate = target_rate;
  wave.samples = Resample(mono, audio.sample_rate, target_rate);
  if (wave.samples.empty()) throw FormatError("zero-length audio: " + path.string());
  NormalizePeakIfAbove(wave.samples);
  return wave;
}

double Peak(std::span<const double> x) {
  double peak = 0.0;
  for (double v : x) peak = std::max(peak, std::abs(v));
  return peak;
}

double Energy(std::span<const double> x) { return Dot(x, x); }

double Dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ContractError("Dot: length mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double NormalizePeakIfAbove(std::vector<double>& x, double ceiling) {
  const double peak = Peak(x);
  if (peak <= ceiling) return 1.0;
  // Divide rather than multiply by the reciprocal so |v| <= ceiling holds
  // exactly after rounding.
  for (double& v : x) v = v / peak * ceiling;
  return ceiling / peak;
}

}  // namespace corn
