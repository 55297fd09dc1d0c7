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

#ifndef CORN_PESQ_ADAPTER_H_
#define CORN_PESQ_ADAPTER_H_

#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <unordered_map>

#include "corn/metrics.h"

namespace corn {

struct PesqOptions {
  // Shell command with {reference}, {degraded} and {rate} placeholders. The
  // last number printed on stdout is taken as the score. Empty means the
  // oracle is not configured.
  std::string command;
  // Optional persistent cache: one "<hex hash> <score>" record per line.
  std::filesystem::path cache_path;
  int sample_rate = 16000;
};

// Forwards to an external PESQ implementation. Results are cached by a
// content hash of (degraded, reference, rate); the cache is mutex-guarded.
class PesqAdapter {
 public:
  explicit PesqAdapter(PesqOptions options);

  bool configured() const { return !options_.command.empty(); }

  // Throws UnavailableError when unconfigured or the oracle fails.
  QualityScore Score(std::span<const double> degraded, std::span<const double> reference);

  std::uint64_t oracle_calls() const;
  std::uint64_t cache_hits() const;

  static std::uint64_t ContentHash(std::span<const double> degraded,
                                   std::span<const double> reference, int sample_rate);

 private:
  double RunOracle(std::span<const double> degraded, std::span<const double> reference);
  void LoadCache();

  PesqOptions options_;
  mutable std::mutex mu_;
  std::unordered_map<std::uint64_t, double> cache_;
  std::uint64_t oracle_calls_ = 0;
  std::uint64_t cache_hits_ = 0;
};

// Wraps a shared adapter as a TargetMetric.
TargetMetric PesqMetric(std::shared_ptr<PesqAdapter> adapter);

}  // namespace corn

#endif  // CORN_PESQ_ADAPTER_H_
