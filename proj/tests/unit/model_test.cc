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

#include <cmath>
#include <set>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "corn/error.h"
#include "corn/model.h"
#include "corn/nn.h"
#include "corn/trainer.h"
#include "gradient_check.h"
#include "test_util.h"

namespace corn {
namespace {

using ::corn::testing::GaussianSignal;

ModelConfig Tiny() {
  ModelConfig c;
  c.width_scale = 0.05;
  return c;
}

FeatureMap Signal(int batch, int length, std::uint64_t seed) {
  FeatureMap x(batch, 1, length);
  const auto v = GaussianSignal(x.size(), seed, 0.3);
  std::copy(v.begin(), v.end(), x.data());
  return x;
}

TEST(MuLawFrontendTest, KnownValue) {
  MuLawFrontend f("f", 4.0);
  EXPECT_NEAR(f.mu(), 4.0, 1e-12);
  FeatureMap x(1, 1, 3);
  x.at(0, 0, 0) = 0.5;
  x.at(0, 0, 1) = -0.5;
  x.at(0, 0, 2) = 0.0;
  const FeatureMap y = f.Infer(x);
  EXPECT_NEAR(y.at(0, 0, 0), std::log(3.0) / std::log(5.0), 1e-9);
  EXPECT_NEAR(y.at(0, 0, 1), -std::log(3.0) / std::log(5.0), 1e-9);
  EXPECT_EQ(y.at(0, 0, 2), 0.0);
}

TEST(Conv1dTest, MatchesDirectSamePaddedCorrelation) {
  Rng rng(1);
  Conv1d conv("c", 2, 3, 3, true, rng);
  FeatureMap x(1, 2, 10);
  const auto v = GaussianSignal(x.size(), 2);
  std::copy(v.begin(), v.end(), x.data());
  const FeatureMap y = conv.Infer(x);
  ASSERT_EQ(y.channels(), 3);
  ASSERT_EQ(y.length(), 10);
  for (int o = 0; o < 3; ++o) {
    for (int t = 0; t < 10; ++t) {
      double acc = conv.bias.value[o];
      for (int c = 0; c < 2; ++c) {
        for (int k = 0; k < 3; ++k) {
          const int src = t + k - 1;
          if (src >= 0 && src < 10) acc += conv.weight.value[(k * 3 + o) * 2 + c] * x.at(0, c, src);
        }
      }
      EXPECT_NEAR(y.at(0, o, t), acc, 1e-12);
    }
  }
}

TEST(BatchNormTest, TrainingOutputIsStandardized) {
  BatchNorm bn("bn", 2);
  FeatureMap x = Signal(4, 50, 3);
  FeatureMap x2(4, 2, 25);
  std::copy(x.data(), x.data() + x.size(), x2.data());
  for (double& v : x2.values()) v = 3.0 * v + 1.0;
  const FeatureMap y = bn.Forward(x2);
  for (int c = 0; c < 2; ++c) {
    double sum = 0, sq = 0;
    for (int b = 0; b < 4; ++b) {
      for (int t = 0; t < 25; ++t) {
        sum += y.at(b, c, t);
        sq += y.at(b, c, t) * y.at(b, c, t);
      }
    }
    EXPECT_NEAR(sum / 100, 0.0, 1e-9);
    EXPECT_NEAR(sq / 100, 1.0, 1e-3);
  }
  EXPECT_GT(bn.running_mean.value.cwiseAbs().maxCoeff(), 0.0);
}

TEST(BlurPoolTest, ConstantInAndNyquistSuppressed) {
  BlurPool pool(2);
  FeatureMap c(1, 1, 16, 0.7);
  const FeatureMap flat = pool.Infer(c);
  for (double v : flat.values()) EXPECT_NEAR(v, 0.7, 1e-12);
  FeatureMap alt(1, 1, 16);
  for (int t = 0; t < 16; ++t) alt.at(0, 0, t) = t % 2 ? 1.0 : -1.0;
  const FeatureMap y = pool.Infer(alt);
  EXPECT_EQ(y.length(), 8);
  for (int t = 1; t < 7; ++t) EXPECT_NEAR(y.at(0, 0, t), 0.0, 1e-12);
}

TEST(TemporalStatsTest, MeanAndStd) {
  TemporalStats stats(0.0);
  FeatureMap x(1, 1, 4);
  for (int t = 0; t < 4; ++t) x.at(0, 0, t) = t;
  const FeatureMap y = stats.Infer(x);
  EXPECT_NEAR(y.at(0, 0, 0), 1.5, 1e-12);
  EXPECT_NEAR(y.at(0, 1, 0), std::sqrt(1.25), 1e-12);
}

TEST(ResidualBlockTest, GateMixesIdentityAndBranch) {
  Rng rng(4);
  ResidualBlock block("r", 4, {6, 6, 4}, {1, 3, 1}, 6.0, rng);
  const Eigen::VectorXd a = block.gate();
  for (Eigen::Index i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], 1.0 / (1.0 + std::exp(-6.0)), 1e-12);
  FeatureMap h(2, 4, 12);
  const auto v = GaussianSignal(h.size(), 5);
  std::copy(v.begin(), v.end(), h.data());
  const FeatureMap f = block.InferBranch(h);
  const FeatureMap y = block.Infer(h);
  for (int b = 0; b < 2; ++b) {
    for (int c = 0; c < 4; ++c) {
      for (int t = 0; t < 12; ++t) {
        EXPECT_NEAR(y.at(b, c, t), a[c] * h.at(b, c, t) + (1 - a[c]) * f.at(b, c, t), 1e-12);
      }
    }
  }
}

TEST(ModelConfigTest, WidthScalingAndValidation) {
  ModelConfig c = Tiny();
  EXPECT_EQ(c.Scaled(128), 6);
  EXPECT_EQ(c.Scaled(20), 4);
  EXPECT_EQ(c.pool_stride(), 2);
  EXPECT_GE(c.min_input_length(), 16);
  const ModelConfig back = nlohmann::json(c).get<ModelConfig>();
  EXPECT_EQ(back, c);
  c.res_filters = {8, 8};
  EXPECT_THROW(c.Validate(), ConfigError);
  ModelConfig bad = Tiny();
  bad.width_scale = 0.0;
  EXPECT_THROW(bad.Validate(), ConfigError);
}

TEST(CornModelTest, ShapesAndShortInput) {
  const CornModel model(Tiny(), 0);
  Waveform x;
  x.samples = GaussianSignal(400, 6);
  EXPECT_EQ(model.Embed(x).size(), model.embed_dim());
  EXPECT_TRUE(std::isfinite(model.ScoreNr(x)));
  EXPECT_TRUE(std::isfinite(model.ScoreFr(x, x)));
  Waveform tiny;
  tiny.samples = {0.1, 0.2};
  EXPECT_THROW(model.Embed(tiny), ContractError);
}

TEST(CornModelTest, SameSeedSameInitialization) {
  CornModel a(Tiny(), 3), b(Tiny(), 3), c(Tiny(), 4);
  const auto pa = a.Parameters().params, pb = b.Parameters().params, pc = c.Parameters().params;
  ASSERT_EQ(pa.size(), pb.size());
  bool any_differs = false;
  for (std::size_t i = 0; i < pa.size(); ++i) {
    EXPECT_EQ(pa[i]->name, pb[i]->name);
    EXPECT_EQ(pa[i]->value, pb[i]->value);
    if (pa[i]->value != pc[i]->value) any_differs = true;
  }
  EXPECT_TRUE(any_differs);
}

TEST(CornModelTest, ParameterNamesAreUnique) {
  CornModel model(Tiny(), 0);
  std::set<std::string> names;
  const ParameterList list = model.Parameters();
  for (const Parameter* p : list.params) EXPECT_TRUE(names.insert(p->name).second) << p->name;
  for (const Buffer* b : list.buffers) EXPECT_TRUE(names.insert(b->name).second) << b->name;
  for (const Parameter* p : list.params) EXPECT_NE(testing::ParameterGroup(p->name), "other") << p->name;
}

TEST(CornModelTest, CopyIsDeep) {
  CornModel a(Tiny(), 0);
  CornModel b = a;
  b.Parameters().params.front()->value.array() += 1.0;
  EXPECT_NE(a.Parameters().params.front()->value, b.Parameters().params.front()->value);
}

TEST(CornModelTest, BatchedEmbeddingMatchesSingle) {
  const CornModel model(Tiny(), 1);
  Waveform a, b, c;
  a.samples = GaussianSignal(400, 7);
  b.samples = GaussianSignal(400, 8);
  c.samples = GaussianSignal(320, 9);
  const Matrix e = model.Embed({&a, &b, &c});
  EXPECT_EQ(Eigen::VectorXd(e.row(0).transpose()), model.Embed(a));
  EXPECT_EQ(Eigen::VectorXd(e.row(2).transpose()), model.Embed(c));
}

// The FR branch sees e(x) through the same encoder call as the NR branch.
TEST(WeightSharingTest, FrAndNrPathsShareTheEmbedding) {
  const CornModel model(Tiny(), 2);
  Waveform x, r;
  x.samples = GaussianSignal(480, 10);
  r.samples = GaussianSignal(480, 11);
  const Matrix fr_inputs = model.Embed({&x, &r});
  const Matrix nr_inputs = model.Embed({&x});
  for (Eigen::Index j = 0; j < nr_inputs.cols(); ++j) EXPECT_EQ(fr_inputs(0, j), nr_inputs(0, j));
  EXPECT_EQ(model.ScoreNr(x), model.ScoreNrFromEmbeddings(fr_inputs.topRows(1))[0]);
}

TEST(WeightSharingTest, NrOnlyStepMovesFrOutputs) {
  CornModel model(Tiny(), 3);
  const auto batch = testing::GradientCheckBatch(4, 480, 5);
  std::vector<const TrainingPair*> ptrs;
  for (const auto& p : batch) ptrs.push_back(&p);
  TrainConfig cfg;
  cfg.w_fr = 0.0;
  cfg.lr = 1e-3;
  const double before = model.ScoreFr(batch[0].degraded, batch[0].reference);
  const auto fr_before = model.fr_head().fc1.weight.value;
  Adam adam(AdamConfig{cfg.lr});
  CoTrainStep(model, adam, ptrs, cfg);
  EXPECT_EQ(model.fr_head().fc1.weight.value, fr_before);
  EXPECT_NE(model.ScoreFr(batch[0].degraded, batch[0].reference), before);
}

TEST(GradientTest, AllGroupsMatchFiniteDifferences) {
  CornModel model(Tiny(), 7);
  const auto batch = testing::GradientCheckBatch(3, 256, 9);
  TrainConfig cfg;
  const auto groups = testing::GradientCheck(model, batch, cfg);
  for (const char* name : {"mu", "conv", "bn", "a_raw", "mlp", "fr_head", "nr_head"}) {
    ASSERT_TRUE(groups.count(name)) << name;
    EXPECT_GT(groups.at(name).coordinates, 0);
    EXPECT_LE(groups.at(name).max_rel, 1e-3) << name << " worst at " << groups.at(name).worst;
  }
  EXPECT_EQ(groups.count("other"), 0u);
}

TEST(GradientTest, NrOnlyModeMatchesFiniteDifferences) {
  CornModel model(Tiny(), 8);
  const auto batch = testing::GradientCheckBatch(3, 256, 10);
  TrainConfig cfg;
  cfg.mode = TrainMode::kNrOnly;
  cfg.beta = 50.0;  // quadratic branch throughout
  const auto groups = testing::GradientCheck(model, batch, cfg, 2);
  for (const auto& [name, g] : groups) {
    if (name == "fr_head") continue;
    EXPECT_LE(g.max_rel, 1e-3) << name << " worst at " << g.worst;
  }
}

}  // namespace
}  // namespace corn
