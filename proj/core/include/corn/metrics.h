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

#ifndef CORN_METRICS_H_
#define CORN_METRICS_H_

#include <functional>
#include <span>
#include <string_view>
#include <vector>

namespace corn {

enum class MetricKind { kSiSdr, kSnr, kPesq };

std::string_view ToString(MetricKind kind);
MetricKind ParseMetricKind(std::string_view name);

// dB metrics are clamped to +-80 so losses and MSE stay finite.
inline constexpr double kDbClamp = 80.0;
inline constexpr double kPesqMin = -0.5;
inline constexpr double kPesqMax = 4.5;

struct QualityScore {
  double value = 0.0;
  MetricKind kind = MetricKind::kSiSdr;
};

// Best achievable score for the metric (clamp ceiling for dB metrics).
double MaxScore(MetricKind kind);
double ClampScore(double value, MetricKind kind);

// Scale-invariant SDR of `degraded` against `reference`:
//   alpha = <x, r> / |r|^2,  10 log10(|alpha r|^2 / |alpha r - x|^2).
// Length mismatch is a ContractError; an all-zero reference a DomainError.
QualityScore SiSdr(std::span<const double> degraded, std::span<const double> reference);

// 10 log10(|r|^2 / |r - x|^2). Not invariant to the scale of x.
QualityScore Snr(std::span<const double> degraded, std::span<const double> reference);

// Returns r + g * noise with the unique g > 0 for which SiSdr(result, r)
// equals `target_db`. With c = <noise, r>/|r|^2, n_perp = noise - c r,
// K = |r|^2/|n_perp|^2 and R = 10^(target/10): g = 1/(sqrt(R/K) - c).
// Throws DomainError when noise is parallel to r or no positive root exists.
std::vector<double> MixAtSiSdr(std::span<const double> reference,
                               std::span<const double> noise, double target_db,
                               double* gain = nullptr);

// A target objective: deterministic score(degraded, reference).
class TargetMetric {
 public:
  using Evaluator = std::function<QualityScore(std::span<const double>, std::span<const double>)>;

  TargetMetric(MetricKind kind, Evaluator evaluator)
      : kind_(kind), evaluator_(std::move(evaluator)) {}

  MetricKind kind() const { return kind_; }
  QualityScore operator()(std::span<const double> degraded,
                          std::span<const double> reference) const {
    return evaluator_(degraded, reference);
  }

 private:
  MetricKind kind_;
  Evaluator evaluator_;
};

TargetMetric SiSdrMetric();
TargetMetric SnrMetric();

}  // namespace corn

#endif  // CORN_METRICS_H_
