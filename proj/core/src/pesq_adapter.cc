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

#include "corn/pesq_adapter.h"

#include <unistd.h>

#include <array>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <regex>
#include <sstream>

#include "corn/audio.h"
#include "corn/error.h"

namespace corn {
namespace {

void ReplaceAll(std::string& s, const std::string& from, const std::string& to) {
  for (std::size_t pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos + to.size())) {
    s.replace(pos, from.size(), to);
  }
}

std::string ShellQuote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') {
      out += "'\\''";
    } else {
      out += c;
    }
  }
  return out + "'";
}

// Temporary files removed on scope exit.
struct TempWavs {
  std::filesystem::path degraded, reference;
  ~TempWavs() {
    std::error_code ec;
    std::filesystem::remove(degraded, ec);
    std::filesystem::remove(reference, ec);
  }
};

std::atomic<std::uint64_t> temp_counter{0};

}  // namespace

PesqAdapter::PesqAdapter(PesqOptions options) : options_(std::move(options)) { LoadCache(); }

std::uint64_t PesqAdapter::ContentHash(std::span<const double> degraded,
                                       std::span<const double> reference, int sample_rate) {
  // FNV-1a over the raw sample bytes.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= p[i];
      h *= 0x100000001b3ULL;
    }
  };
  const std::uint64_t nd = degraded.size(), nr = reference.size();
  mix(&sample_rate, sizeof sample_rate);
  mix(&nd, sizeof nd);
  mix(degraded.data(), degraded.size_bytes());
  mix(&nr, sizeof nr);
  mix(reference.data(), reference.size_bytes());
  return h;
}

void PesqAdapter::LoadCache() {
  if (options_.cache_path.empty()) return;
  std::ifstream in(options_.cache_path);
  if (!in) return;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream fields(line);
    std::string hex;
    double score;
    if (fields >> hex >> score) cache_[std::stoull(hex, nullptr, 16)] = score;
  }
}

QualityScore PesqAdapter::Score(std::span<const double> degraded,
                                std::span<const double> reference) {
  if (!configured()) {
    throw UnavailableError("PESQ oracle is not configured (set pesq.command)");
  }
  if (degraded.size() != reference.size()) throw ContractError("PESQ: length mismatch");
  const std::uint64_t key = ContentHash(degraded, reference, options_.sample_rate);
  {
    std::lock_guard<std::mutex> lock(mu_);
    if (auto it = cache_.find(key); it != cache_.end()) {
      ++cache_hits_;
      return {it->second, MetricKind::kPesq};
    }
  }
  const double score = ClampScore(RunOracle(degraded, reference), MetricKind::kPesq);

  std::lock_guard<std::mutex> lock(mu_);
  ++oracle_calls_;
  cache_[key] = score;
  if (!options_.cache_path.empty()) {
    std::ofstream out(options_.cache_path, std::ios::app);
    char hex[32];
    std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(key));
    out << hex << ' ' << score << '\n';
  }
  return {score, MetricKind::kPesq};
}

double PesqAdapter::RunOracle(std::span<const double> degraded,
                              std::span<const double> reference) {
  const auto dir = std::filesystem::temp_directory_path();
  const std::string stem = "corn_pesq_" + std::to_string(::getpid()) + "_" +
                           std::to_string(temp_counter.fetch_add(1));
  TempWavs files{dir / (stem + "_deg.wav"), dir / (stem + "_ref.wav")};
  Waveform deg{{degraded.begin(), degraded.end()}, options_.sample_rate};
  Waveform ref{{reference.begin(), reference.end()}, options_.sample_rate};
  WriteWav(files.degraded, deg, SampleFormat::kPcm16);
  WriteWav(files.reference, ref, SampleFormat::kPcm16);

  std::string cmd = options_.command;
  ReplaceAll(cmd, "{degraded}", ShellQuote(files.degraded.string()));
  ReplaceAll(cmd, "{reference}", ShellQuote(files.reference.string()));
  ReplaceAll(cmd, "{rate}", std::to_string(options_.sample_rate));

  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (pipe == nullptr) throw UnavailableError("PESQ oracle could not be started: " + cmd);
  std::string output;
  std::array<char, 256> buf;
  while (std::fgets(buf.data(), buf.size(), pipe) != nullptr) output += buf.data();
  const int status = ::pclose(pipe);
  if (status != 0) {
    throw UnavailableError("PESQ oracle exited with status " + std::to_string(status) +
                           ": " + cmd);
  }
  static const std::regex number(R"([-+]?(\d+\.?\d*|\.\d+)([eE][-+]?\d+)?)");
  double value = std::nan("");
  for (auto it = std::sregex_iterator(output.begin(), output.end(), number);
       it != std::sregex_iterator(); ++it) {
    value = std::stod(it->str());
  }
  if (!std::isfinite(value)) {
    throw UnavailableError("PESQ oracle printed no score: '" + output + "'");
  }
  return value;
}

std::uint64_t PesqAdapter::oracle_calls() const {
  std::lock_guard<std::mutex> lock(mu_);
  return oracle_calls_;
}

std::uint64_t PesqAdapter::cache_hits() const {
  std::lock_guard<std::mutex> lock(mu_);
  return cache_hits_;
}

TargetMetric PesqMetric(std::shared_ptr<PesqAdapter> adapter) {
  return TargetMetric(MetricKind::kPesq,
                      [adapter = std::move(adapter)](std::span<const double> x,
                                                     std::span<const double> r) {
                        return adapter->Score(x, r);
                      });
}

}  // namespace corn
