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

#include "corn/metrics.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "corn/audio.h"
#include "corn/error.h"

namespace corn {
namespace {

void CheckPair(std::span<const double> x, std::span<const double> r, const char* what) {
  if (x.size() != r.size()) {
    throw ContractError(std::string(what) + ": length mismatch (" + std::to_string(x.size()) +
                        " vs " + std::to_string(r.size()) + ")");
  }
  if (r.empty()) throw ContractError(std::string(what) + ": empty input");
}

// 10 log10(num / den) with the +-inf cases mapped onto the clamp.
double RatioDb(double num, double den) {
  if (den <= 0.0) return kDbClamp;
  if (num <= 0.0) return -kDbClamp;
  return std::clamp(10.0 * std::log10(num / den), -kDbClamp, kDbClamp);
}

}  // namespace

std::string_view ToString(MetricKind kind) {
  switch (kind) {
    case MetricKind::kSiSdr:
      return "si_sdr";
    case MetricKind::kSnr:
      return "snr";
    case MetricKind::kPesq:
      return "pesq";
  }
  return "si_sdr";
}

MetricKind ParseMetricKind(std::string_view name) {
  if (name == "si_sdr") return MetricKind::kSiSdr;
  if (name == "snr") return MetricKind::kSnr;
  if (name == "pesq") return MetricKind::kPesq;
  throw ConfigError("unknown metric '" + std::string(name) + "' (expected si_sdr|snr|pesq)");
}

double MaxScore(MetricKind kind) { return kind == MetricKind::kPesq ? kPesqMax : kDbClamp; }

double ClampScore(double value, MetricKind kind) {
  if (kind == MetricKind::kPesq) return std::clamp(value, kPesqMin, kPesqMax);
  return std::clamp(value, -kDbClamp, kDbClamp);
}

QualityScore SiSdr(std::span<const double> degraded, std::span<const double> reference) {
  CheckPair(degraded, reference, "SiSdr");
  const double ref_energy = Energy(reference);
  if (ref_energy <= 0.0) throw DomainError("SiSdr: reference has zero energy");
  const double alpha = Dot(degraded, reference) / ref_energy;
  double residual = 0.0;
  for (std::size_t i = 0; i < reference.size(); ++i) {
    const double d = alpha * reference[i] - degraded[i];
    residual += d * d;
  }
  return {RatioDb(alpha * alpha * ref_energy, residual), MetricKind::kSiSdr};
}

QualityScore Snr(std::span<const double> degraded, std::span<const double> reference) {
  CheckPair(degraded, reference, "Snr");
  const double ref_energy = Energy(reference);
  if (ref_energy <= 0.0) throw DomainError("Snr: reference has zero energy");
  double residual = 0.0;
  for (std::size_t i = 0; i < reference.size(); ++i) {
    const double d = reference[i] - degraded[i];
    residual += d * d;
  }
  return {RatioDb(ref_energy, residual), MetricKind::kSnr};
}

std::vector<double> MixAtSiSdr(std::span<const double> reference,
                               std::span<const double> noise, double target_db,
                               double* gain) {
  CheckPair(noise, reference, "MixAtSiSdr");
  if (!(target_db >= -kDbClamp && target_db <= kDbClamp)) {
    throw ContractError("MixAtSiSdr: target outside [-80, 80] dB");
  }
  const double ref_energy = Energy(reference);
  if (ref_energy <= 0.0) throw DomainError("MixAtSiSdr: reference has zero energy");
  const double c = Dot(noise, reference) / ref_energy;
  double perp_energy = 0.0;
  for (std::size_t i = 0; i < reference.size(); ++i) {
    const double d = noise[i] - c * reference[i];
    perp_energy += d * d;
  }
  if (!(perp_energy > 1e-24 * std::max(Energy(noise), 1e-300))) {
    throw DomainError("MixAtSiSdr: noise is parallel to the reference");
  }
  const double k = ref_energy / perp_energy;
  const double ratio = std::pow(10.0, target_db / 10.0);
  const double denom = std::sqrt(ratio / k) - c;
  if (!(denom > 0.0)) {
    throw DomainError("MixAtSiSdr: no positive gain reaches the requested level");
  }
  const double g = 1.0 / denom;
  if (gain != nullptr) *gain = g;
  std::vector<double> out(reference.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = reference[i] + g * noise[i];
  return out;
}

TargetMetric SiSdrMetric() { return TargetMetric(MetricKind::kSiSdr, &SiSdr); }
TargetMetric SnrMetric() { return TargetMetric(MetricKind::kSnr, &Snr); }

}  // namespace corn
