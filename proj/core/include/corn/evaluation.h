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

// Evaluation harness: held-out score error, content invariance of the
// embedding, robustness to imperceptible perturbations, and quality-level
// retrieval.

#ifndef CORN_EVALUATION_H_
#define CORN_EVALUATION_H_

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json_fwd.hpp>

#include "corn/metrics.h"
#include "corn/model.h"
#include "corn/synthesis.h"

namespace corn {

// What the harness needs from a model. Batches may mix lengths.
class QualityModel {
 public:
  virtual ~QualityModel() = default;
  virtual Matrix Embed(const std::vector<const Waveform*>& x) const = 0;
  virtual Eigen::VectorXd ScoreFr(const std::vector<const Waveform*>& x,
                                  const std::vector<const Waveform*>& reference) const = 0;
  virtual Eigen::VectorXd ScoreNr(const std::vector<const Waveform*>& x) const = 0;
};

class CornQualityModel final : public QualityModel {
 public:
  explicit CornQualityModel(const CornModel& model) : model_(model) {}

  Matrix Embed(const std::vector<const Waveform*>& x) const override;
  Eigen::VectorXd ScoreFr(const std::vector<const Waveform*>& x,
                          const std::vector<const Waveform*>& reference) const override;
  Eigen::VectorXd ScoreNr(const std::vector<const Waveform*>& x) const override;

 private:
  const CornModel& model_;
};

enum class Head { kFr, kNr };

// Mean of (prediction - target)^2; FR scores (degraded, reference), NR the
// degraded signal alone. Throws ContractError on an empty set.
double EvalMse(const QualityModel& model, const std::vector<TrainingPair>& pairs, Head head);

// Predictions of one head for every pair, in order.
Eigen::VectorXd Predict(const QualityModel& model, const std::vector<TrainingPair>& pairs, Head head);

struct GaussianFit {
  double mean = 0.0;
  double stddev = 0.0;  // unbiased sample estimate
};

// Throws ContractError with fewer than two samples.
GaussianFit FitGaussian(const std::vector<double>& samples);

// Area under min(p_a, p_b) of the two fitted normals, in closed form from the
// density intersections. Throws DegenerateDistributionError when either
// group has zero variance.
double GaussianOverlap(const std::vector<double>& a, const std::vector<double>& b);

// GaussianOverlap, with zero-variance groups resolved by their limit: 0 if
// exactly one group is degenerate or both are at different values, 1 if
// both are degenerate at the same value.
double GaussianOverlapOrLimit(const std::vector<double>& a, const std::vector<double>& b);

double CosineSimilarity(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

struct ContentInvarianceConfig {
  int pairs_per_group = 100;
  double excerpt_s = 3.0;
  double level_min_db = -10.0;
  double level_max_db = 20.0;
};

struct ContentInvarianceResult {
  // Same noise source vs different noise, content differing in both groups.
  double overlap_content = 0.0;
  // Same noise source vs different noise, content shared within each pair.
  double overlap_noise = 0.0;
  std::vector<double> same_noise_diff_content;
  std::vector<double> diff_noise_diff_content;
  std::vector<double> same_noise_same_content;
  std::vector<double> diff_noise_same_content;
};

// Builds recording pairs from `bank` (which needs >= 2 clean and >= 2 noise
// sources), embeds both recordings of each pair, and compares the cosine
// similarity distributions. Within a pair both recordings are mixed at the
// same SI-SDR; "same noise" pairs use two excerpts of one noise source.
ContentInvarianceResult ContentInvariance(const QualityModel& model, const SourceBank& bank,
                                          const ContentInvarianceConfig& config, std::uint64_t seed);

struct SmallShiftConfig {
  int pairs = 100;
  double excerpt_s = 3.0;
  double level_db = 60.0;
};

struct SmallShiftResult {
  double fr_deficit = 0.0;  // mean(max_score - f(x_small, r))
  double nr_diff = 0.0;     // mean |n(r) - n(x_small)|
};

// x_small is r plus white noise mixed at config.level_db SI-SDR.
SmallShiftResult SmallShiftEval(const QualityModel& model, const SourceBank& bank, MetricKind metric,
                                const SmallShiftConfig& config, std::uint64_t seed);

struct LabeledEmbedding {
  Eigen::VectorXd embedding;
  int quality_level = 0;
  std::string content_id;
  std::string noise_id;
};

// Mean over sampled queries of |same-class items among the k nearest other
// items by cosine similarity| / k. Uses every item as a query when
// n_queries >= size. Throws ContractError if k < 1 or any class has fewer
// than k members.
double RetrievalMpAtK(const std::vector<LabeledEmbedding>& items, int k, int n_queries,
                      std::uint64_t seed);

struct RetrievalConfig {
  int levels = 10;
  double level_min_db = -40.0;
  double level_max_db = 40.0;
  int per_level = 100;
  int k = 10;
  int queries = 1000;
  double excerpt_s = 3.0;
};

// Level l of L is additive noise at SI-SDR min + l (max - min) / (L - 1).
std::vector<double> RetrievalLevels(const RetrievalConfig& config);

std::vector<LabeledEmbedding> BuildRetrievalSet(const QualityModel& model, const SourceBank& bank,
                                                const RetrievalConfig& config, std::uint64_t seed);

// Spearman rank correlation with average ranks for ties.
double SpearmanCorrelation(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

// Throws ContractError if any clean or noise id appears in both banks.
void AssertDisjointSources(const SourceBank& train, const SourceBank& test);

struct EvalConfig {
  int test_pairs = 200;
  double excerpt_s = 3.0;
  SynthesisMode synthesis = SynthesisMode::kFull;
  DegradationSamplerConfig sampler;
  // Also score a set drawn with the held-back degradation kinds.
  bool unseen = false;
  ContentInvarianceConfig content;
  SmallShiftConfig small_shift;
  RetrievalConfig retrieval;
};

struct EvalReport {
  double mse_fr = 0.0;
  double mse_nr = 0.0;
  double mse_fr_unseen = 0.0;
  double mse_nr_unseen = 0.0;
  bool has_unseen = false;
  double spearman_fr = 0.0;
  double spearman_nr = 0.0;
  double overlap_content = 0.0;
  double overlap_noise = 0.0;
  double small_shift_fr = 0.0;
  double small_shift_nr = 0.0;
  double mp_at_k = 0.0;
  int k = 10;
  std::string model_id;
  std::string dataset_id;
  MetricKind metric = MetricKind::kSiSdr;
};

void to_json(nlohmann::json& j, const EvalReport& report);

// Runs all evaluations on `bank` (held-out sources).
EvalReport RunEvaluation(const QualityModel& model, const SourceBank& bank,
                         const TargetMetric& metric, const EvalConfig& config, std::uint64_t seed);

}  // namespace corn

#endif  // CORN_EVALUATION_H_
