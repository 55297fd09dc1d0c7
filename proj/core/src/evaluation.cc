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

#include "corn/evaluation.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include <nlohmann/json.hpp>

#include "corn/error.h"
#include "corn/excerpt.h"
#include "corn/random.h"

namespace corn {
namespace {

constexpr std::size_t kEvalBatch = 16;
constexpr int kMaxDraws = 64;
constexpr std::uint64_t kUnseenSalt = 0x756e7365656eULL;

// P(N(mean, sd) <= x).
double NormalCdf(double x, double mean, double sd) {
  return 0.5 * std::erfc(-(x - mean) / (sd * std::sqrt(2.0)));
}

double NormalLogPdf(double x, double mean, double sd) {
  const double z = (x - mean) / sd;
  return -0.5 * z * z - std::log(sd);
}

template <typename Fn>
Eigen::VectorXd Batched(std::size_t n, Fn&& fn) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(n));
  for (std::size_t start = 0; start < n; start += kEvalBatch) {
    const std::size_t end = std::min(n, start + kEvalBatch);
    const Eigen::VectorXd part = fn(start, end);
    out.segment(static_cast<Eigen::Index>(start), static_cast<Eigen::Index>(end - start)) = part;
  }
  return out;
}

Waveform Mix(const Waveform& clean, const Waveform& noise, double level_db) {
  Waveform out;
  out.sample_rate = clean.sample_rate;
  out.samples = MixAtSiSdr(clean.samples, noise.samples, level_db);
  NormalizePeakIfAbove(out.samples);
  return out;
}

std::size_t ExcerptSamples(const SourceBank& bank, double excerpt_s) {
  const int rate = bank.At(SourceKind::kClean, 0).sample_rate;
  return ExcerptLength(excerpt_s, rate);
}

// Distinct pair of indices from [0, n), n >= 2.
std::pair<std::size_t, std::size_t> DistinctPair(Rng& rng, std::size_t n) {
  const std::size_t a = UniformIndex(rng, n);
  std::size_t b = UniformIndex(rng, n - 1);
  if (b >= a) ++b;
  return {a, b};
}

Excerpt RandomExcerpt(const SourceBank& bank, SourceKind kind, std::size_t index, std::size_t length,
                      Rng& rng) {
  const Waveform& w = bank.At(kind, index);
  return ExcerptAt(w, length, UniformIndex(rng, w.size()), bank.ids(kind)[index]);
}

std::vector<double> Similarities(const QualityModel& model, const std::vector<Waveform>& a,
                                 const std::vector<Waveform>& b) {
  std::vector<double> sims(a.size());
  for (std::size_t start = 0; start < a.size(); start += kEvalBatch) {
    const std::size_t end = std::min(a.size(), start + kEvalBatch);
    std::vector<const Waveform*> batch;
    for (std::size_t i = start; i < end; ++i) batch.push_back(&a[i]);
    for (std::size_t i = start; i < end; ++i) batch.push_back(&b[i]);
    const Matrix e = model.Embed(batch);
    const Eigen::Index m = static_cast<Eigen::Index>(end - start);
    for (Eigen::Index i = 0; i < m; ++i) {
      sims[start + i] = CosineSimilarity(e.row(i).transpose(), e.row(m + i).transpose());
    }
  }
  return sims;
}

std::vector<double> Ranks(const Eigen::VectorXd& v) {
  const std::size_t n = static_cast<std::size_t>(v.size());
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return v[i] < v[j]; });
  std::vector<double> ranks(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

// --- model adapter ------------------------------------------------------------------

Matrix CornQualityModel::Embed(const std::vector<const Waveform*>& x) const { return model_.Embed(x); }

Eigen::VectorXd CornQualityModel::ScoreFr(const std::vector<const Waveform*>& x,
                                          const std::vector<const Waveform*>& reference) const {
  if (x.size() != reference.size()) throw ContractError("ScoreFr: batch size mismatch");
  std::vector<const Waveform*> all = x;
  all.insert(all.end(), reference.begin(), reference.end());
  const Matrix e = model_.Embed(all);
  const Eigen::Index n = static_cast<Eigen::Index>(x.size());
  return model_.ScoreFrFromEmbeddings(e.topRows(n), e.bottomRows(n));
}

Eigen::VectorXd CornQualityModel::ScoreNr(const std::vector<const Waveform*>& x) const {
  return model_.ScoreNrFromEmbeddings(model_.Embed(x));
}

// --- score error ------------------------------------------------------------------------

Eigen::VectorXd Predict(const QualityModel& model, const std::vector<TrainingPair>& pairs, Head head) {
  return Batched(pairs.size(), [&](std::size_t start, std::size_t end) {
    std::vector<const Waveform*> x, r;
    for (std::size_t i = start; i < end; ++i) {
      x.push_back(&pairs[i].degraded);
      r.push_back(&pairs[i].reference);
    }
    return head == Head::kFr ? model.ScoreFr(x, r) : model.ScoreNr(x);
  });
}

double EvalMse(const QualityModel& model, const std::vector<TrainingPair>& pairs, Head head) {
  if (pairs.empty()) throw ContractError("EvalMse: empty test set");
  const Eigen::VectorXd pred = Predict(model, pairs, head);
  double sum = 0.0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const double d = pred[static_cast<Eigen::Index>(i)] - pairs[i].target.value;
    sum += d * d;
  }
  return sum / static_cast<double>(pairs.size());
}

// --- Gaussian overlap -----------------------------------------------------------------

GaussianFit FitGaussian(const std::vector<double>& samples) {
  if (samples.size() < 2) throw ContractError("FitGaussian needs at least two samples");
  const double n = static_cast<double>(samples.size());
  const double mean = std::accumulate(samples.begin(), samples.end(), 0.0) / n;
  double sq = 0.0;
  for (double s : samples) sq += (s - mean) * (s - mean);
  return {mean, std::sqrt(sq / (n - 1.0))};
}

double GaussianOverlap(const std::vector<double>& a, const std::vector<double>& b) {
  const GaussianFit fa = FitGaussian(a), fb = FitGaussian(b);
  if (!(fa.stddev > 0.0) || !(fb.stddev > 0.0)) {
    throw DegenerateDistributionError("Gaussian overlap of a zero-variance group");
  }
  const double m1 = fa.mean, s1 = fa.stddev, m2 = fb.mean, s2 = fb.stddev;

  // Points where the two densities cross.
  std::vector<double> cuts;
  if (std::abs(s1 - s2) <= 1e-12 * std::max(s1, s2)) {
    if (m1 != m2) cuts.push_back(0.5 * (m1 + m2));
  } else {
    const double qa = 1.0 / (s1 * s1) - 1.0 / (s2 * s2);
    const double qb = -2.0 * (m1 / (s1 * s1) - m2 / (s2 * s2));
    const double qc = m1 * m1 / (s1 * s1) - m2 * m2 / (s2 * s2) + 2.0 * std::log(s1 / s2);
    const double disc = qb * qb - 4.0 * qa * qc;
    if (disc > 0.0) {
      // Numerically stable quadratic roots.
      const double q = -0.5 * (qb + std::copysign(std::sqrt(disc), qb));
      cuts.push_back(q / qa);
      if (q != 0.0) cuts.push_back(qc / q);
      std::sort(cuts.begin(), cuts.end());
    }
  }
  if (cuts.empty()) return 1.0;  // identical densities

  // On each interval between crossings one density is the smaller; integrate it.
  double total = 0.0;
  double lo = -INFINITY;
  for (std::size_t i = 0; i <= cuts.size(); ++i) {
    const double hi = i < cuts.size() ? cuts[i] : INFINITY;
    double probe;
    if (std::isinf(lo)) probe = hi - std::max(s1, s2);
    else if (std::isinf(hi)) probe = lo + std::max(s1, s2);
    else probe = 0.5 * (lo + hi);
    const bool a_smaller = NormalLogPdf(probe, m1, s1) < NormalLogPdf(probe, m2, s2);
    const double m = a_smaller ? m1 : m2, s = a_smaller ? s1 : s2;
    const double upper = std::isinf(hi) ? 1.0 : NormalCdf(hi, m, s);
    const double lower = std::isinf(lo) ? 0.0 : NormalCdf(lo, m, s);
    total += upper - lower;
    lo = hi;
  }
  return std::clamp(total, 0.0, 1.0);
}

double GaussianOverlapOrLimit(const std::vector<double>& a, const std::vector<double>& b) {
  try {
    return GaussianOverlap(a, b);
  } catch (const DegenerateDistributionError&) {
    const GaussianFit fa = FitGaussian(a), fb = FitGaussian(b);
    const bool both = !(fa.stddev > 0.0) && !(fb.stddev > 0.0);
    return both && fa.mean == fb.mean ? 1.0 : 0.0;
  }
}

double CosineSimilarity(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const double na = a.norm(), nb = b.norm();
  if (na == 0.0 || nb == 0.0) return 0.0;
  return a.dot(b) / (na * nb);
}

// --- content invariance --------------------------------------------------------------

ContentInvarianceResult ContentInvariance(const QualityModel& model, const SourceBank& bank,
                                          const ContentInvarianceConfig& config, std::uint64_t seed) {
  const std::size_t n_clean = bank.Count(SourceKind::kClean);
  const std::size_t n_noise = bank.Count(SourceKind::kNoise);
  if (n_clean < 2 || n_noise < 2) {
    throw ContractError("content invariance needs at least two clean and two noise sources");
  }
  if (config.pairs_per_group < 2) throw ContractError("content invariance needs >= 2 pairs per group");
  const std::size_t length = ExcerptSamples(bank, config.excerpt_s);

  // group 0: same noise, different content   group 1: different noise, different content
  // group 2: same noise, same content        group 3: different noise, same content
  std::vector<Waveform> first[4], second[4];
  for (int group = 0; group < 4; ++group) {
    const bool same_noise = group == 0 || group == 2;
    const bool same_content = group >= 2;
    for (int i = 0; i < config.pairs_per_group; ++i) {
      Rng rng = MakeRng(seed, {static_cast<std::uint64_t>(RngStream::kContentInvariance),
                               static_cast<std::uint64_t>(group), static_cast<std::uint64_t>(i)});
      for (int attempt = 0;; ++attempt) {
        try {
          const auto [c1, c2] = DistinctPair(rng, n_clean);
          const auto [n1, n2] = DistinctPair(rng, n_noise);
          const Excerpt clean_a = RandomExcerpt(bank, SourceKind::kClean, c1, length, rng);
          const Excerpt clean_b =
              same_content ? clean_a : RandomExcerpt(bank, SourceKind::kClean, c2, length, rng);
          const Excerpt noise_a = RandomExcerpt(bank, SourceKind::kNoise, n1, length, rng);
          const Excerpt noise_b =
              RandomExcerpt(bank, SourceKind::kNoise, same_noise ? n1 : n2, length, rng);
          const double level = UniformReal(rng, config.level_min_db, config.level_max_db);
          Waveform a = Mix(clean_a.waveform, noise_a.waveform, level);
          Waveform b = Mix(clean_b.waveform, noise_b.waveform, level);
          first[group].push_back(std::move(a));
          second[group].push_back(std::move(b));
          break;
        } catch (const DomainError&) {
          if (attempt + 1 >= kMaxDraws) throw;
        }
      }
    }
  }
  ContentInvarianceResult r;
  r.same_noise_diff_content = Similarities(model, first[0], second[0]);
  r.diff_noise_diff_content = Similarities(model, first[1], second[1]);
  r.same_noise_same_content = Similarities(model, first[2], second[2]);
  r.diff_noise_same_content = Similarities(model, first[3], second[3]);
  r.overlap_content = GaussianOverlapOrLimit(r.same_noise_diff_content, r.diff_noise_diff_content);
  r.overlap_noise = GaussianOverlapOrLimit(r.same_noise_same_content, r.diff_noise_same_content);
  return r;
}

// --- small shifts ---------------------------------------------------------------------

SmallShiftResult SmallShiftEval(const QualityModel& model, const SourceBank& bank, MetricKind metric,
                                const SmallShiftConfig& config, std::uint64_t seed) {
  const std::size_t n_clean = bank.Count(SourceKind::kClean);
  if (n_clean == 0) throw ContractError("small-shift evaluation needs clean sources");
  if (config.pairs <= 0) throw ContractError("small-shift evaluation needs pairs > 0");
  const std::size_t length = ExcerptSamples(bank, config.excerpt_s);
  std::vector<Waveform> refs, shifted;
  for (int i = 0; i < config.pairs; ++i) {
    Rng rng = MakeRng(seed, RngStream::kSmallShift, static_cast<std::uint64_t>(i));
    for (int attempt = 0;; ++attempt) {
      try {
        const Excerpt clean = RandomExcerpt(bank, SourceKind::kClean, UniformIndex(rng, n_clean), length, rng);
        Waveform noise;
        noise.sample_rate = clean.waveform.sample_rate;
        noise.samples.resize(length);
        for (double& v : noise.samples) v = StandardNormal(rng);
        Waveform r = clean.waveform;
        Waveform x = r;
        x.samples = MixAtSiSdr(r.samples, noise.samples, config.level_db);
        const double peak = Peak(x.samples);
        if (peak > 1.0) {
          for (double& v : x.samples) v /= peak;
          for (double& v : r.samples) v /= peak;
        }
        refs.push_back(std::move(r));
        shifted.push_back(std::move(x));
        break;
      } catch (const DomainError&) {
        if (attempt + 1 >= kMaxDraws) throw;
      }
    }
  }
  const double max_score = MaxScore(metric);
  double deficit = 0.0, diff = 0.0;
  for (std::size_t start = 0; start < refs.size(); start += kEvalBatch) {
    const std::size_t end = std::min(refs.size(), start + kEvalBatch);
    std::vector<const Waveform*> x, r;
    for (std::size_t i = start; i < end; ++i) {
      x.push_back(&shifted[i]);
      r.push_back(&refs[i]);
    }
    const Eigen::VectorXd f = model.ScoreFr(x, r);
    const Eigen::VectorXd nx = model.ScoreNr(x);
    const Eigen::VectorXd nr = model.ScoreNr(r);
    deficit += (max_score - f.array()).sum();
    diff += (nr - nx).cwiseAbs().sum();
  }
  return {deficit / static_cast<double>(refs.size()), diff / static_cast<double>(refs.size())};
}

// --- retrieval --------------------------------------------------------------------------

double RetrievalMpAtK(const std::vector<LabeledEmbedding>& items, int k, int n_queries,
                      std::uint64_t seed) {
  if (k < 1) throw ContractError("retrieval needs k >= 1");
  if (items.size() < static_cast<std::size_t>(k) + 1) {
    throw ContractError("retrieval needs more than k items");
  }
  std::map<int, int> class_sizes;
  for (const auto& it : items) ++class_sizes[it.quality_level];
  for (const auto& [level, size] : class_sizes) {
    if (size < k) {
      throw ContractError("quality level " + std::to_string(level) + " has " + std::to_string(size) +
                          " items, fewer than k = " + std::to_string(k));
    }
  }
  const Eigen::Index n = static_cast<Eigen::Index>(items.size());
  const Eigen::Index dim = items.front().embedding.size();
  Matrix unit(n, dim);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::VectorXd& e = items[i].embedding;
    if (e.size() != dim) throw ContractError("retrieval embeddings differ in dimension");
    const double norm = e.norm();
    if (norm > 0.0) {
      unit.row(i) = (e / norm).transpose();
    } else {
      unit.row(i).setZero();
    }
  }

  std::vector<std::size_t> queries(static_cast<std::size_t>(n));
  std::iota(queries.begin(), queries.end(), 0);
  if (n_queries > 0 && n_queries < n) {
    // Partial Fisher-Yates: the first n_queries entries are a uniform sample.
    Rng rng = MakeRng(seed, RngStream::kRetrieval);
    for (int i = 0; i < n_queries; ++i) {
      const std::size_t j = i + UniformIndex(rng, queries.size() - i);
      std::swap(queries[i], queries[j]);
    }
    queries.resize(n_queries);
  }

  double total = 0.0;
  std::vector<std::size_t> order;
  for (std::size_t q : queries) {
    const Eigen::VectorXd sims = unit * unit.row(static_cast<Eigen::Index>(q)).transpose();
    order.clear();
    for (std::size_t i = 0; i < static_cast<std::size_t>(n); ++i) {
      if (i != q) order.push_back(i);
    }
    std::partial_sort(order.begin(), order.begin() + k, order.end(), [&](std::size_t a, std::size_t b) {
      return sims[a] != sims[b] ? sims[a] > sims[b] : a < b;
    });
    int hits = 0;
    for (int i = 0; i < k; ++i) hits += items[order[i]].quality_level == items[q].quality_level;
    total += static_cast<double>(hits) / k;
  }
  return total / static_cast<double>(queries.size());
}

std::vector<double> RetrievalLevels(const RetrievalConfig& config) {
  if (config.levels < 1) throw ContractError("retrieval needs at least one level");
  std::vector<double> levels(config.levels);
  for (int l = 0; l < config.levels; ++l) {
    levels[l] = config.levels == 1 ? config.level_min_db
                                   : config.level_min_db + l * (config.level_max_db - config.level_min_db) /
                                                               (config.levels - 1);
  }
  return levels;
}

std::vector<LabeledEmbedding> BuildRetrievalSet(const QualityModel& model, const SourceBank& bank,
                                                const RetrievalConfig& config, std::uint64_t seed) {
  const std::size_t n_clean = bank.Count(SourceKind::kClean);
  const std::size_t n_noise = bank.Count(SourceKind::kNoise);
  if (n_clean == 0 || n_noise == 0) throw ContractError("retrieval set needs clean and noise sources");
  const std::size_t length = ExcerptSamples(bank, config.excerpt_s);
  const std::vector<double> levels = RetrievalLevels(config);

  std::vector<LabeledEmbedding> items;
  std::vector<Waveform> waves;
  for (int l = 0; l < config.levels; ++l) {
    for (int i = 0; i < config.per_level; ++i) {
      Rng rng = MakeRng(seed, {static_cast<std::uint64_t>(RngStream::kRetrieval), 1,
                               static_cast<std::uint64_t>(l), static_cast<std::uint64_t>(i)});
      for (int attempt = 0;; ++attempt) {
        try {
          const Excerpt clean = RandomExcerpt(bank, SourceKind::kClean, UniformIndex(rng, n_clean), length, rng);
          const Excerpt noise = RandomExcerpt(bank, SourceKind::kNoise, UniformIndex(rng, n_noise), length, rng);
          waves.push_back(Mix(clean.waveform, noise.waveform, levels[l]));
          LabeledEmbedding item;
          item.quality_level = l;
          item.content_id = clean.source_id;
          item.noise_id = noise.source_id;
          items.push_back(std::move(item));
          break;
        } catch (const DomainError&) {
          if (attempt + 1 >= kMaxDraws) throw;
        }
      }
    }
  }
  for (std::size_t start = 0; start < waves.size(); start += kEvalBatch) {
    const std::size_t end = std::min(waves.size(), start + kEvalBatch);
    std::vector<const Waveform*> batch;
    for (std::size_t i = start; i < end; ++i) batch.push_back(&waves[i]);
    const Matrix e = model.Embed(batch);
    for (std::size_t i = start; i < end; ++i) {
      items[i].embedding = e.row(static_cast<Eigen::Index>(i - start)).transpose();
    }
  }
  return items;
}

double SpearmanCorrelation(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  if (a.size() != b.size() || a.size() < 2) throw ContractError("Spearman needs two equal samples of size >= 2");
  const std::vector<double> ra = Ranks(a), rb = Ranks(b);
  const Eigen::Map<const Eigen::VectorXd> va(ra.data(), a.size()), vb(rb.data(), b.size());
  const Eigen::VectorXd ca = va.array() - va.mean();
  const Eigen::VectorXd cb = vb.array() - vb.mean();
  const double denom = ca.norm() * cb.norm();
  return denom > 0.0 ? ca.dot(cb) / denom : 0.0;
}

void AssertDisjointSources(const SourceBank& train, const SourceBank& test) {
  for (SourceKind kind : {SourceKind::kClean, SourceKind::kNoise}) {
    const auto& ids = train.ids(kind);
    const std::set<std::string> seen(ids.begin(), ids.end());
    for (const auto& id : test.ids(kind)) {
      if (seen.count(id)) throw ContractError("source '" + id + "' is in both training and test sets");
    }
  }
}

// --- report -------------------------------------------------------------------------------

void to_json(nlohmann::json& j, const EvalReport& r) {
  j = nlohmann::json{{"mse_fr", r.mse_fr},
                     {"mse_nr", r.mse_nr},
                     {"spearman_fr", r.spearman_fr},
                     {"spearman_nr", r.spearman_nr},
                     {"overlap_content", r.overlap_content},
                     {"overlap_noise", r.overlap_noise},
                     {"small_shift_fr", r.small_shift_fr},
                     {"small_shift_nr", r.small_shift_nr},
                     {"mp_at_k", r.mp_at_k},
                     {"k", r.k},
                     {"metadata",
                      {{"model_id", r.model_id},
                       {"dataset_id", r.dataset_id},
                       {"metric", ToString(r.metric)}}}};
  if (r.has_unseen) {
    j["mse_fr_unseen"] = r.mse_fr_unseen;
    j["mse_nr_unseen"] = r.mse_nr_unseen;
  }
}

EvalReport RunEvaluation(const QualityModel& model, const SourceBank& bank,
                         const TargetMetric& metric, const EvalConfig& config, std::uint64_t seed) {
  EvalReport report;
  report.metric = metric.kind();
  report.k = config.retrieval.k;

  const PairSynthesizer held_out(bank, metric, config.synthesis, config.sampler, config.excerpt_s, seed,
                                 RngStream::kHeldOutPairs);
  const std::vector<TrainingPair> pairs = held_out.MakeRange(0, config.test_pairs);
  Eigen::VectorXd targets(static_cast<Eigen::Index>(pairs.size()));
  for (std::size_t i = 0; i < pairs.size(); ++i) targets[static_cast<Eigen::Index>(i)] = pairs[i].target.value;
  const Eigen::VectorXd fr = Predict(model, pairs, Head::kFr);
  const Eigen::VectorXd nr = Predict(model, pairs, Head::kNr);
  report.mse_fr = (fr - targets).squaredNorm() / static_cast<double>(pairs.size());
  report.mse_nr = (nr - targets).squaredNorm() / static_cast<double>(pairs.size());
  report.spearman_fr = SpearmanCorrelation(fr, targets);
  report.spearman_nr = SpearmanCorrelation(nr, targets);

  if (config.unseen) {
    const PairSynthesizer unseen(bank, metric, SynthesisMode::kFull, config.sampler.UnseenTest(),
                                 config.excerpt_s, DeriveSeed(seed, {kUnseenSalt}),
                                 RngStream::kHeldOutPairs);
    const std::vector<TrainingPair> upairs = unseen.MakeRange(0, config.test_pairs);
    report.mse_fr_unseen = EvalMse(model, upairs, Head::kFr);
    report.mse_nr_unseen = EvalMse(model, upairs, Head::kNr);
    report.has_unseen = true;
  }

  ContentInvarianceConfig content = config.content;
  content.excerpt_s = config.excerpt_s;
  const ContentInvarianceResult ci = ContentInvariance(model, bank, content, seed);
  report.overlap_content = ci.overlap_content;
  report.overlap_noise = ci.overlap_noise;

  SmallShiftConfig shift = config.small_shift;
  shift.excerpt_s = config.excerpt_s;
  const SmallShiftResult ss = SmallShiftEval(model, bank, metric.kind(), shift, seed);
  report.small_shift_fr = ss.fr_deficit;
  report.small_shift_nr = ss.nr_diff;

  RetrievalConfig retrieval = config.retrieval;
  retrieval.excerpt_s = config.excerpt_s;
  const std::vector<LabeledEmbedding> items = BuildRetrievalSet(model, bank, retrieval, seed);
  report.mp_at_k = RetrievalMpAtK(items, retrieval.k, retrieval.queries, seed);
  return report;
}

}  // namespace corn
