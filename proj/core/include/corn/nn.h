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

// Minimal double-precision layers with explicit backward passes.
//
// Every layer offers three entry points:
//   Forward   training-mode pass; caches what Backward needs and, for batch
//             norm, uses batch statistics and updates the running averages.
//   Backward  consumes dL/d(output), accumulates parameter gradients and
//             returns dL/d(input). Valid once per Forward.
//   Infer     const inference-mode pass (running statistics, no caching).

#ifndef CORN_NN_H_
#define CORN_NN_H_

#include <string>
#include <vector>

#include <Eigen/Core>

#include "corn/random.h"

namespace corn {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatrixMap = Eigen::Map<Matrix>;
using ConstMatrixMap = Eigen::Map<const Matrix>;

// Trainable tensor stored flat, with a gradient accumulator of equal size.
struct Parameter {
  std::string name;
  std::vector<int> shape;
  Eigen::VectorXd value;
  Eigen::VectorXd grad;

  Parameter() = default;
  Parameter(std::string name, std::vector<int> shape);

  Eigen::Index size() const { return value.size(); }
  void ZeroGrad() { grad.setZero(); }
};

// Non-trainable state saved with the model (batch-norm running moments).
struct Buffer {
  std::string name;
  Eigen::VectorXd value;
};

struct ParameterList {
  std::vector<Parameter*> params;
  std::vector<Buffer*> buffers;
};

// Activations laid out as [batch][channel][time], contiguous.
class FeatureMap {
 public:
  FeatureMap() = default;
  FeatureMap(int batch, int channels, int length, double fill = 0.0)
      : batch_(batch), channels_(channels), length_(length),
        data_(static_cast<std::size_t>(batch) * channels * length, fill) {}

  int batch() const { return batch_; }
  int channels() const { return channels_; }
  int length() const { return length_; }
  std::size_t size() const { return data_.size(); }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  std::vector<double>& values() { return data_; }
  const std::vector<double>& values() const { return data_; }

  double& at(int b, int c, int t) { return data_[Offset(b, c, t)]; }
  const double& at(int b, int c, int t) const { return data_[Offset(b, c, t)]; }

  // channels x length view of one batch item.
  MatrixMap Item(int b) { return MatrixMap(data() + ItemOffset(b), channels_, length_); }
  ConstMatrixMap Item(int b) const {
    return ConstMatrixMap(data() + ItemOffset(b), channels_, length_);
  }
  // batch x channels view; only meaningful when length() == 1.
  MatrixMap AsRows() { return MatrixMap(data(), batch_, channels_ * length_); }
  ConstMatrixMap AsRows() const { return ConstMatrixMap(data(), batch_, channels_ * length_); }

  static FeatureMap FromRows(const Matrix& rows);
  Matrix ToRows() const { return AsRows(); }

 private:
  std::size_t ItemOffset(int b) const { return static_cast<std::size_t>(b) * channels_ * length_; }
  std::size_t Offset(int b, int c, int t) const {
    return ItemOffset(b) + static_cast<std::size_t>(c) * length_ + t;
  }

  int batch_ = 0;
  int channels_ = 0;
  int length_ = 0;
  std::vector<double> data_;
};

// Elementwise mu-law companding with a trainable mu kept positive through
// mu = softplus(mu_raw): y = sign(x) ln(1 + mu|x|) / ln(1 + mu).
class MuLawFrontend {
 public:
  MuLawFrontend(const std::string& name, double mu_init);

  double mu() const;
  FeatureMap Forward(const FeatureMap& x);
  FeatureMap Backward(const FeatureMap& grad_out);
  FeatureMap Infer(const FeatureMap& x) const;
  void Collect(ParameterList& list);

  Parameter mu_raw;

 private:
  FeatureMap input_;
};

// Stride-1 1-D convolution with "same" padding (left (k-1)/2, right the
// rest). The weight is stored as [kernel][out][in] so each tap is a
// contiguous out x in block.
class Conv1d {
 public:
  Conv1d(const std::string& name, int in_channels, int out_channels, int kernel, bool with_bias,
         Rng& rng);

  FeatureMap Forward(const FeatureMap& x);
  FeatureMap Backward(const FeatureMap& grad_out);
  FeatureMap Infer(const FeatureMap& x) const;
  void Collect(ParameterList& list);

  int in_channels() const { return in_; }
  int out_channels() const { return out_; }
  int kernel() const { return kernel_; }

  Parameter weight;
  Parameter bias;  // empty when constructed without bias

 private:
  FeatureMap Pad(const FeatureMap& x) const;
  FeatureMap Apply(const FeatureMap& padded, int length) const;

  int in_, out_, kernel_;
  bool has_bias_;
  FeatureMap padded_;
};

// Batch normalization over (batch, time) per channel; for length-1 maps this
// is the usual 1-D batch norm over the batch.
class BatchNorm {
 public:
  BatchNorm(const std::string& name, int channels, double momentum = 0.1, double eps = 1e-5);

  FeatureMap Forward(const FeatureMap& x);
  FeatureMap Backward(const FeatureMap& grad_out);
  FeatureMap Infer(const FeatureMap& x) const;
  void Collect(ParameterList& list);

  Parameter gamma;
  Parameter beta;
  Buffer running_mean;
  Buffer running_var;

 private:
  int channels_;
  double momentum_, eps_;
  FeatureMap normalized_;
  Eigen::VectorXd inv_std_;
};

class Relu {
 public:
  FeatureMap Forward(const FeatureMap& x);
  FeatureMap Backward(const FeatureMap& grad_out) const;
  static FeatureMap Infer(const FeatureMap& x);

 private:
  FeatureMap output_;
};

// Anti-aliased downsampling: binomial (1, 2, 1)/4 low-pass with reflect
// padding, evaluated at every `stride`-th sample. Output length is
// ceil(T / stride).
class BlurPool {
 public:
  explicit BlurPool(int stride = 2) : stride_(stride) {}

  FeatureMap Forward(const FeatureMap& x);
  FeatureMap Backward(const FeatureMap& grad_out) const;
  FeatureMap Infer(const FeatureMap& x) const;
  int stride() const { return stride_; }

 private:
  int stride_;
  int input_length_ = 0;
};

// Fully connected layer on length-1 maps: y = W x (+ b), W is [out][in].
class Linear {
 public:
  Linear(const std::string& name, int in_features, int out_features, bool with_bias, Rng& rng);

  FeatureMap Forward(const FeatureMap& x);
  FeatureMap Backward(const FeatureMap& grad_out);
  FeatureMap Infer(const FeatureMap& x) const;
  void Collect(ParameterList& list);

  Parameter weight;
  Parameter bias;

 private:
  int in_, out_;
  bool has_bias_;
  FeatureMap input_;
};

// Per-channel mean and standard deviation over time, concatenated as
// [means..., stds...] into a length-1 map of 2C channels. Population
// variance with eps inside the square root. Requires T >= 2.
class TemporalStats {
 public:
  explicit TemporalStats(double eps = 1e-5) : eps_(eps) {}

  FeatureMap Forward(const FeatureMap& x);
  FeatureMap Backward(const FeatureMap& grad_out) const;
  FeatureMap Infer(const FeatureMap& x) const;

 private:
  double eps_;
  FeatureMap input_;
  FeatureMap stats_;
};

// Elementwise sum of two equally shaped maps.
void AddInPlace(FeatureMap& acc, const FeatureMap& other);

}  // namespace corn

#endif  // CORN_NN_H_
