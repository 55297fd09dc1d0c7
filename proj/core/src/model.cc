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

#include "corn/model.h"

#include <algorithm>
#include <cmath>
#include <map>

#include <nlohmann/json.hpp>

#include "corn/error.h"
#include "corn/random.h"

namespace corn {
namespace {

constexpr int kMinWidth = 4;
constexpr int kMinInputSamples = 16;

double Sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

bool AllPositive(const std::vector<int>& v) {
  return std::all_of(v.begin(), v.end(), [](int x) { return x > 0; });
}

}  // namespace

// --- ModelConfig ----------------------------------------------------------------

int ModelConfig::Scaled(int width) const {
  return std::max(kMinWidth, static_cast<int>(std::lround(width * width_scale)));
}

int ModelConfig::pool_stride() const {
  const int n = static_cast<int>(pool_filters.size());
  for (int s = 1; s <= pool_total_downsample; ++s) {
    long long p = 1;
    for (int i = 0; i < n; ++i) p *= s;
    if (p == pool_total_downsample) return s;
    if (p > pool_total_downsample) break;
  }
  throw ConfigError("pool_total_downsample " + std::to_string(pool_total_downsample) +
                    " is not an integer power over " + std::to_string(n) + " pooling blocks");
}

int ModelConfig::min_input_length() const {
  const int stride = pool_stride();
  const int res_kernel = res_kernels.empty() ? 1 : *std::max_element(res_kernels.begin(), res_kernels.end());
  for (int t = kMinInputSamples;; ++t) {
    int len = t;
    bool ok = true;
    for (std::size_t i = 0; i < pool_filters.size() && ok; ++i) {
      ok = len >= pool_kernel && len >= 2;
      len = (len + stride - 1) / stride;
    }
    if (ok && len >= std::max(2, res_kernel)) return t;
  }
}

void ModelConfig::Validate() const {
  if (!(mu_init > 0.0) || !std::isfinite(mu_init)) throw ConfigError("model.mu_init must be > 0");
  if (pool_filters.empty() || !AllPositive(pool_filters)) {
    throw ConfigError("model.pool_filters must be non-empty and positive");
  }
  if (pool_kernel <= 0) throw ConfigError("model.pool_kernel must be positive");
  if (pool_total_downsample <= 0) throw ConfigError("model.pool_total_downsample must be positive");
  pool_stride();
  if (res_blocks < 0) throw ConfigError("model.res_blocks must be >= 0");
  if (res_filters.empty() || res_filters.size() != res_kernels.size()) {
    throw ConfigError("model.res_filters and model.res_kernels must have equal, non-zero length");
  }
  if (!AllPositive(res_filters) || !AllPositive(res_kernels)) {
    throw ConfigError("model.res_filters and model.res_kernels must be positive");
  }
  if (res_blocks > 0 && res_filters.back() != pool_filters.back()) {
    throw ConfigError("model.res_filters must end with the last pooling width");
  }
  if (!std::isfinite(a_raw_init)) throw ConfigError("model.a_raw_init must be finite");
  if (mlp_units.empty() || !AllPositive(mlp_units)) {
    throw ConfigError("model.mlp_units must be non-empty and positive");
  }
  if (head_hidden <= 0) throw ConfigError("model.head_hidden must be positive");
  if (!(width_scale > 0.0 && width_scale <= 1.0)) {
    throw ConfigError("model.width_scale must lie in (0, 1]");
  }
}

void to_json(nlohmann::json& j, const ModelConfig& c) {
  j = nlohmann::json{{"mu_init", c.mu_init},
                     {"pool_filters", c.pool_filters},
                     {"pool_kernel", c.pool_kernel},
                     {"pool_total_downsample", c.pool_total_downsample},
                     {"res_filters", c.res_filters},
                     {"res_kernels", c.res_kernels},
                     {"res_blocks", c.res_blocks},
                     {"a_raw_init", c.a_raw_init},
                     {"mlp_units", c.mlp_units},
                     {"head_hidden", c.head_hidden},
                     {"width_scale", c.width_scale}};
}

void from_json(const nlohmann::json& j, ModelConfig& c) {
  ModelConfig d;
  c.mu_init = j.value("mu_init", d.mu_init);
  c.pool_filters = j.value("pool_filters", d.pool_filters);
  c.pool_kernel = j.value("pool_kernel", d.pool_kernel);
  c.pool_total_downsample = j.value("pool_total_downsample", d.pool_total_downsample);
  c.res_filters = j.value("res_filters", d.res_filters);
  c.res_kernels = j.value("res_kernels", d.res_kernels);
  c.res_blocks = j.value("res_blocks", d.res_blocks);
  c.a_raw_init = j.value("a_raw_init", d.a_raw_init);
  c.mlp_units = j.value("mlp_units", d.mlp_units);
  c.head_hidden = j.value("head_hidden", d.head_hidden);
  c.width_scale = j.value("width_scale", d.width_scale);
}

FeatureMap StackWaveforms(const std::vector<const Waveform*>& batch) {
  if (batch.empty()) throw ContractError("empty waveform batch");
  const std::size_t length = batch.front()->size();
  FeatureMap x(static_cast<int>(batch.size()), 1, static_cast<int>(length));
  for (std::size_t b = 0; b < batch.size(); ++b) {
    if (batch[b]->size() != length) throw ContractError("waveforms in a batch must share a length");
    std::copy(batch[b]->samples.begin(), batch[b]->samples.end(), &x.at(static_cast<int>(b), 0, 0));
  }
  return x;
}

Matrix ConcatColumns(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) throw ContractError("ConcatColumns: row mismatch");
  Matrix out(a.rows(), a.cols() + b.cols());
  out << a, b;
  return out;
}

// --- PoolBlock ------------------------------------------------------------------

PoolBlock::PoolBlock(const std::string& name, int in_channels, int out_channels, int kernel,
                     int stride, Rng& rng)
    : conv(name + ".conv", in_channels, out_channels, kernel, false, rng),
      bn(name + ".bn", out_channels),
      pool_(stride) {}

FeatureMap PoolBlock::Forward(const FeatureMap& x) {
  return pool_.Forward(relu_.Forward(bn.Forward(conv.Forward(x))));
}

FeatureMap PoolBlock::Backward(const FeatureMap& grad_out) {
  return conv.Backward(bn.Backward(relu_.Backward(pool_.Backward(grad_out))));
}

FeatureMap PoolBlock::Infer(const FeatureMap& x) const {
  return pool_.Infer(Relu::Infer(bn.Infer(conv.Infer(x))));
}

void PoolBlock::Collect(ParameterList& list) {
  conv.Collect(list);
  bn.Collect(list);
}

// --- ResidualBlock ------------------------------------------------------------------

ResidualBlock::ResidualBlock(const std::string& name, int channels, const std::vector<int>& filters,
                             const std::vector<int>& kernels, double a_raw_init, Rng& rng)
    : a_raw(name + ".a_raw", {channels}), channels_(channels), bn0_(name + ".bn0", channels) {
  a_raw.value.setConstant(a_raw_init);
  int in = channels;
  for (std::size_t i = 0; i < filters.size(); ++i) {
    const std::string stage = name + ".stage" + std::to_string(i + 1);
    stages_.push_back(Stage{Relu(), Conv1d(stage + ".conv", in, filters[i], kernels[i], false, rng),
                            BatchNorm(stage + ".bn", filters[i])});
    in = filters[i];
  }
  if (in != channels) throw ConfigError("residual branch must return to the input width");
}

Eigen::VectorXd ResidualBlock::gate() const { return a_raw.value.unaryExpr(&Sigmoid); }

FeatureMap ResidualBlock::Combine(const FeatureMap& h, const FeatureMap& branch) const {
  const Eigen::VectorXd a = gate();
  FeatureMap out(h.batch(), channels_, h.length());
  for (int b = 0; b < h.batch(); ++b) {
    for (int c = 0; c < channels_; ++c) {
      const double* hv = &h.at(b, c, 0);
      const double* fv = &branch.at(b, c, 0);
      double* o = &out.at(b, c, 0);
      for (int t = 0; t < h.length(); ++t) o[t] = a[c] * hv[t] + (1.0 - a[c]) * fv[t];
    }
  }
  return out;
}

FeatureMap ResidualBlock::InferBranch(const FeatureMap& h) const {
  FeatureMap f = bn0_.Infer(h);
  for (const Stage& s : stages_) f = s.bn.Infer(s.conv.Infer(Relu::Infer(f)));
  return f;
}

FeatureMap ResidualBlock::Infer(const FeatureMap& h) const { return Combine(h, InferBranch(h)); }

FeatureMap ResidualBlock::Forward(const FeatureMap& h) {
  input_ = h;
  FeatureMap f = bn0_.Forward(h);
  for (Stage& s : stages_) f = s.bn.Forward(s.conv.Forward(s.relu.Forward(f)));
  branch_ = std::move(f);
  return Combine(input_, branch_);
}

FeatureMap ResidualBlock::Backward(const FeatureMap& grad_out) {
  const Eigen::VectorXd a = gate();
  FeatureMap grad_h(grad_out.batch(), channels_, grad_out.length());
  FeatureMap grad_branch(grad_out.batch(), channels_, grad_out.length());
  for (int b = 0; b < grad_out.batch(); ++b) {
    for (int c = 0; c < channels_; ++c) {
      const double* g = &grad_out.at(b, c, 0);
      const double* hv = &input_.at(b, c, 0);
      const double* fv = &branch_.at(b, c, 0);
      double* gh = &grad_h.at(b, c, 0);
      double* gf = &grad_branch.at(b, c, 0);
      double da = 0.0;
      for (int t = 0; t < grad_out.length(); ++t) {
        gh[t] = a[c] * g[t];
        gf[t] = (1.0 - a[c]) * g[t];
        da += g[t] * (hv[t] - fv[t]);
      }
      a_raw.grad[c] += da * a[c] * (1.0 - a[c]);
    }
  }
  FeatureMap g = std::move(grad_branch);
  for (auto it = stages_.rbegin(); it != stages_.rend(); ++it) {
    g = it->relu.Backward(it->conv.Backward(it->bn.Backward(g)));
  }
  AddInPlace(grad_h, bn0_.Backward(g));
  return grad_h;
}

void ResidualBlock::Collect(ParameterList& list) {
  list.params.push_back(&a_raw);
  bn0_.Collect(list);
  for (Stage& s : stages_) {
    s.conv.Collect(list);
    s.bn.Collect(list);
  }
}

// --- BaseEncoder ------------------------------------------------------------------

namespace {

std::vector<PoolBlock> MakePools(const ModelConfig& c, Rng& rng) {
  std::vector<PoolBlock> pools;
  int in = 1;
  for (std::size_t i = 0; i < c.pool_filters.size(); ++i) {
    const int out = c.Scaled(c.pool_filters[i]);
    pools.emplace_back("encoder.pool" + std::to_string(i + 1), in, out, c.pool_kernel,
                       c.pool_stride(), rng);
    in = out;
  }
  return pools;
}

std::vector<ResidualBlock> MakeResidual(const ModelConfig& c, Rng& rng) {
  std::vector<int> filters;
  for (int f : c.res_filters) filters.push_back(c.Scaled(f));
  std::vector<ResidualBlock> blocks;
  for (int i = 0; i < c.res_blocks; ++i) {
    blocks.emplace_back("encoder.res" + std::to_string(i + 1), c.Scaled(c.pool_filters.back()),
                        filters, c.res_kernels, c.a_raw_init, rng);
  }
  return blocks;
}

const ModelConfig& Validated(const ModelConfig& c) {
  c.Validate();
  return c;
}

}  // namespace

// Members are initialized in declaration order, which fixes the order of
// draws from `rng` and so the initial weights for a given seed.
BaseEncoder::BaseEncoder(const ModelConfig& config, Rng& rng)
    : config_(Validated(config)),
      frontend_("encoder.frontend", config.mu_init),
      pools_(MakePools(config, rng)),
      res_(MakeResidual(config, rng)),
      stats_bn_("encoder.stats_bn", 2 * config.Scaled(config.pool_filters.back())),
      fc1_("encoder.mlp1", 2 * config.Scaled(config.pool_filters.back()),
           config.Scaled(config.mlp_units.front()), false, rng),
      fc1_bn_("encoder.mlp1_bn", config.Scaled(config.mlp_units.front())),
      fc2_("encoder.mlp2", config.Scaled(config.mlp_units.front()), config.embed_dim(), true, rng) {
  if (config.mlp_units.size() != 2) throw ConfigError("model.mlp_units must have two entries");
}

void BaseEncoder::CheckInput(const FeatureMap& x) const {
  if (x.channels() != 1) throw ContractError("encoder expects single-channel input");
  if (x.length() < config_.min_input_length()) {
    throw ContractError("input of " + std::to_string(x.length()) + " samples is shorter than " +
                        std::to_string(config_.min_input_length()));
  }
}

Matrix BaseEncoder::Forward(const FeatureMap& x) {
  CheckInput(x);
  FeatureMap h = frontend_.Forward(x);
  for (PoolBlock& p : pools_) h = p.Forward(h);
  for (ResidualBlock& r : res_) h = r.Forward(h);
  h = stats_bn_.Forward(stats_.Forward(h));
  h = fc2_.Forward(fc1_relu_.Forward(fc1_bn_.Forward(fc1_.Forward(h))));
  return h.ToRows();
}

void BaseEncoder::Backward(const Matrix& grad_embeddings) {
  FeatureMap g = FeatureMap::FromRows(grad_embeddings);
  g = fc1_.Backward(fc1_bn_.Backward(fc1_relu_.Backward(fc2_.Backward(g))));
  g = stats_.Backward(stats_bn_.Backward(g));
  for (auto it = res_.rbegin(); it != res_.rend(); ++it) g = it->Backward(g);
  for (auto it = pools_.rbegin(); it != pools_.rend(); ++it) g = it->Backward(g);
  frontend_.Backward(g);
}

Matrix BaseEncoder::Infer(const FeatureMap& x) const {
  CheckInput(x);
  FeatureMap h = frontend_.Infer(x);
  for (const PoolBlock& p : pools_) h = p.Infer(h);
  for (const ResidualBlock& r : res_) h = r.Infer(h);
  h = stats_bn_.Infer(stats_.Infer(h));
  h = fc2_.Infer(Relu::Infer(fc1_bn_.Infer(fc1_.Infer(h))));
  return h.ToRows();
}

void BaseEncoder::Collect(ParameterList& list) {
  frontend_.Collect(list);
  for (PoolBlock& p : pools_) p.Collect(list);
  for (ResidualBlock& r : res_) r.Collect(list);
  stats_bn_.Collect(list);
  fc1_.Collect(list);
  fc1_bn_.Collect(list);
  fc2_.Collect(list);
}

std::unique_ptr<Encoder> BaseEncoder::Clone() const { return std::make_unique<BaseEncoder>(*this); }

// --- ScoreHead ----------------------------------------------------------------------

ScoreHead::ScoreHead(const std::string& name, int in_features, int hidden, Rng& rng)
    : fc1(name + ".fc1", in_features, hidden, true, rng),
      fc2(name + ".fc2", hidden, 1, true, rng),
      in_(in_features) {}

Eigen::VectorXd ScoreHead::Forward(const Matrix& inputs) {
  return fc2.Forward(relu_.Forward(fc1.Forward(FeatureMap::FromRows(inputs)))).AsRows().col(0);
}

Matrix ScoreHead::Backward(const Eigen::VectorXd& grad_scores) {
  return fc1.Backward(relu_.Backward(fc2.Backward(FeatureMap::FromRows(grad_scores)))).ToRows();
}

Eigen::VectorXd ScoreHead::Infer(const Matrix& inputs) const {
  return fc2.Infer(Relu::Infer(fc1.Infer(FeatureMap::FromRows(inputs)))).AsRows().col(0);
}

void ScoreHead::Collect(ParameterList& list) {
  fc1.Collect(list);
  fc2.Collect(list);
}

// --- CornModel ------------------------------------------------------------------------

namespace {

std::unique_ptr<Encoder> MakeBaseEncoder(const ModelConfig& config, Rng& rng) {
  return std::make_unique<BaseEncoder>(config, rng);
}

}  // namespace

CornModel::CornModel(const ModelConfig& config, std::uint64_t seed)
    : CornModel(config, nullptr, seed) {}

CornModel::CornModel(const ModelConfig& config, std::unique_ptr<Encoder> encoder,
                     std::uint64_t seed)
    : CornModel(config, std::move(encoder), MakeRng(seed, RngStream::kModelInit), InitTag{}) {}

CornModel::CornModel(const ModelConfig& config, std::unique_ptr<Encoder> encoder, Rng rng, InitTag)
    : config_(Validated(config)),
      encoder_(encoder ? std::move(encoder) : MakeBaseEncoder(config_, rng)),
      fr_head_("fr_head", 2 * encoder_->embed_dim(), config_.head_hidden, rng),
      nr_head_("nr_head", encoder_->embed_dim(), config_.head_hidden, rng) {}

CornModel::CornModel(const CornModel& other)
    : config_(other.config_),
      encoder_(other.encoder_->Clone()),
      fr_head_(other.fr_head_),
      nr_head_(other.nr_head_) {}

CornModel& CornModel::operator=(const CornModel& other) {
  if (this != &other) {
    config_ = other.config_;
    encoder_ = other.encoder_->Clone();
    fr_head_ = other.fr_head_;
    nr_head_ = other.nr_head_;
  }
  return *this;
}

ParameterList CornModel::Parameters() {
  ParameterList list;
  encoder_->Collect(list);
  fr_head_.Collect(list);
  nr_head_.Collect(list);
  return list;
}

ParameterList CornModel::EncoderParameters() {
  ParameterList list;
  encoder_->Collect(list);
  return list;
}

void CornModel::ZeroGrad() {
  for (Parameter* p : Parameters().params) p->ZeroGrad();
}

Matrix CornModel::Embed(const std::vector<const Waveform*>& batch) const {
  Matrix out(static_cast<Eigen::Index>(batch.size()), embed_dim());
  // Group by length so equal-length inputs share one batched pass.
  std::map<std::size_t, std::vector<std::size_t>> by_length;
  for (std::size_t i = 0; i < batch.size(); ++i) by_length[batch[i]->size()].push_back(i);
  for (const auto& [length, idx] : by_length) {
    std::vector<const Waveform*> group;
    for (std::size_t i : idx) group.push_back(batch[i]);
    const Matrix e = encoder_->Infer(StackWaveforms(group));
    for (std::size_t k = 0; k < idx.size(); ++k) out.row(static_cast<Eigen::Index>(idx[k])) = e.row(k);
  }
  return out;
}

Eigen::VectorXd CornModel::Embed(const Waveform& x) const {
  return encoder_->Infer(StackWaveforms({&x})).row(0).transpose();
}

Eigen::VectorXd CornModel::ScoreFrFromEmbeddings(const Matrix& e_x, const Matrix& e_r) const {
  return fr_head_.Infer(ConcatColumns(e_x, e_r));
}

Eigen::VectorXd CornModel::ScoreNrFromEmbeddings(const Matrix& e_x) const {
  return nr_head_.Infer(e_x);
}

double CornModel::ScoreFr(const Waveform& x, const Waveform& reference) const {
  const Matrix e = Embed({&x, &reference});
  return ScoreFrFromEmbeddings(e.topRows(1), e.bottomRows(1))[0];
}

double CornModel::ScoreNr(const Waveform& x) const {
  return ScoreNrFromEmbeddings(Embed({&x}))[0];
}

}  // namespace corn
