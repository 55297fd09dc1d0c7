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

// Shared waveform encoder and the two scoring heads.
//
//   embedding  e = B(x)
//   FR score   f = H_f([e_x, e_r])
//   NR score   n = H_n(e_x)
//
// The base encoder B is: mu-law frontend, two pooling blocks (conv, BN, ReLU,
// BlurPool), three gated residual blocks, per-channel temporal mean/std, and
// an MLP. Any Encoder implementation can replace it.

#ifndef CORN_MODEL_H_
#define CORN_MODEL_H_

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "corn/audio.h"
#include "corn/nn.h"

namespace corn {

struct ModelConfig {
  double mu_init = 4.0;
  std::vector<int> pool_filters = {128, 256};
  int pool_kernel = 4;
  int pool_total_downsample = 4;
  std::vector<int> res_filters = {512, 512, 256};
  std::vector<int> res_kernels = {1, 3, 1};
  int res_blocks = 3;
  double a_raw_init = 6.0;
  std::vector<int> mlp_units = {1024, 200};
  int head_hidden = 64;
  double width_scale = 1.0;

  // Channel count after width scaling, never below 4.
  int Scaled(int width) const;
  int embed_dim() const { return Scaled(mlp_units.back()); }
  // BlurPool stride of each pooling block.
  int pool_stride() const;
  // Shortest accepted input, in samples.
  int min_input_length() const;

  // Throws ConfigError on inconsistent settings.
  void Validate() const;

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

void to_json(nlohmann::json& j, const ModelConfig& config);
void from_json(const nlohmann::json& j, ModelConfig& config);

// Packs equal-length waveforms into a [batch][1][time] map.
FeatureMap StackWaveforms(const std::vector<const Waveform*>& batch);

// Waveform batch -> embedding rows (batch x embed_dim).
class Encoder {
 public:
  virtual ~Encoder() = default;

  virtual int embed_dim() const = 0;
  // Training-mode pass. Caches activations for one Backward call.
  virtual Matrix Forward(const FeatureMap& x) = 0;
  // Accumulates parameter gradients from dL/d(embeddings).
  virtual void Backward(const Matrix& grad_embeddings) = 0;
  virtual Matrix Infer(const FeatureMap& x) const = 0;
  virtual void Collect(ParameterList& list) = 0;
  virtual std::unique_ptr<Encoder> Clone() const = 0;
};

class PoolBlock {
 public:
  PoolBlock(const std::string& name, int in_channels, int out_channels, int kernel, int stride,
            Rng& rng);

  FeatureMap Forward(const FeatureMap& x);
  FeatureMap Backward(const FeatureMap& grad_out);
  FeatureMap Infer(const FeatureMap& x) const;
  void Collect(ParameterList& list);

  Conv1d conv;
  BatchNorm bn;

 private:
  Relu relu_;
  BlurPool pool_;
};

// h0 = a * h + (1 - a) * F(h), a = sigmoid(a_raw) per channel, where
// F = BN, then (ReLU, conv, BN) for each configured stage.
class ResidualBlock {
 public:
  ResidualBlock(const std::string& name, int channels, const std::vector<int>& filters,
                const std::vector<int>& kernels, double a_raw_init, Rng& rng);

  FeatureMap Forward(const FeatureMap& h);
  FeatureMap Backward(const FeatureMap& grad_out);
  FeatureMap Infer(const FeatureMap& h) const;
  void Collect(ParameterList& list);

  // The residual branch alone, in inference mode.
  FeatureMap InferBranch(const FeatureMap& h) const;
  Eigen::VectorXd gate() const;

  Parameter a_raw;

 private:
  struct Stage {
    Relu relu;
    Conv1d conv;
    BatchNorm bn;
  };
  FeatureMap Combine(const FeatureMap& h, const FeatureMap& branch) const;

  int channels_;
  BatchNorm bn0_;
  std::vector<Stage> stages_;
  FeatureMap input_, branch_;
};

class BaseEncoder final : public Encoder {
 public:
  BaseEncoder(const ModelConfig& config, Rng& rng);

  int embed_dim() const override { return config_.embed_dim(); }
  Matrix Forward(const FeatureMap& x) override;
  void Backward(const Matrix& grad_embeddings) override;
  Matrix Infer(const FeatureMap& x) const override;
  void Collect(ParameterList& list) override;
  std::unique_ptr<Encoder> Clone() const override;

  const MuLawFrontend& frontend() const { return frontend_; }
  const std::vector<ResidualBlock>& residual_blocks() const { return res_; }

 private:
  void CheckInput(const FeatureMap& x) const;

  ModelConfig config_;
  MuLawFrontend frontend_;
  std::vector<PoolBlock> pools_;
  std::vector<ResidualBlock> res_;
  TemporalStats stats_;
  BatchNorm stats_bn_;
  Linear fc1_;
  BatchNorm fc1_bn_;
  Relu fc1_relu_;
  Linear fc2_;
};

// Linear -> ReLU -> Linear(1).
class ScoreHead {
 public:
  ScoreHead(const std::string& name, int in_features, int hidden, Rng& rng);

  int in_features() const { return in_; }
  Eigen::VectorXd Forward(const Matrix& inputs);
  // Returns dL/d(inputs) given dL/d(scores).
  Matrix Backward(const Eigen::VectorXd& grad_scores);
  Eigen::VectorXd Infer(const Matrix& inputs) const;
  void Collect(ParameterList& list);

  Linear fc1;
  Linear fc2;

 private:
  int in_;
  Relu relu_;
};

// Encoder plus FR and NR heads. Copying deep-copies all parameters.
class CornModel {
 public:
  CornModel(const ModelConfig& config, std::uint64_t seed);
  // Custom encoder; heads are sized from encoder->embed_dim().
  CornModel(const ModelConfig& config, std::unique_ptr<Encoder> encoder, std::uint64_t seed);
  CornModel(const CornModel& other);
  CornModel& operator=(const CornModel& other);
  CornModel(CornModel&&) noexcept = default;
  CornModel& operator=(CornModel&&) noexcept = default;

  const ModelConfig& config() const { return config_; }
  int embed_dim() const { return encoder_->embed_dim(); }

  Encoder& encoder() { return *encoder_; }
  const Encoder& encoder() const { return *encoder_; }
  ScoreHead& fr_head() { return fr_head_; }
  const ScoreHead& fr_head() const { return fr_head_; }
  ScoreHead& nr_head() { return nr_head_; }
  const ScoreHead& nr_head() const { return nr_head_; }

  // Encoder parameters first, then FR head, then NR head.
  ParameterList Parameters();
  ParameterList EncoderParameters();
  void ZeroGrad();

  // Inference. Waveforms of different lengths are embedded separately.
  Matrix Embed(const std::vector<const Waveform*>& batch) const;
  Eigen::VectorXd Embed(const Waveform& x) const;
  Eigen::VectorXd ScoreFrFromEmbeddings(const Matrix& e_x, const Matrix& e_r) const;
  Eigen::VectorXd ScoreNrFromEmbeddings(const Matrix& e_x) const;
  double ScoreFr(const Waveform& x, const Waveform& reference) const;
  double ScoreNr(const Waveform& x) const;

 private:
  struct InitTag {};
  CornModel(const ModelConfig& config, std::unique_ptr<Encoder> encoder, Rng rng, InitTag);

  ModelConfig config_;
  std::unique_ptr<Encoder> encoder_;
  ScoreHead fr_head_;
  ScoreHead nr_head_;
};

// [a, b] column-wise.
Matrix ConcatColumns(const Matrix& a, const Matrix& b);

}  // namespace corn

#endif  // CORN_MODEL_H_
