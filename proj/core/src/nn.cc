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

#include "corn/nn.h"

#include <algorithm>
#include <cmath>
#include <utility>

#include "corn/error.h"

namespace corn {
namespace {

Eigen::Index Product(const std::vector<int>& shape) {
  Eigen::Index n = 1;
  for (int d : shape) n *= d;
  return n;
}

void FillUniform(Eigen::VectorXd& v, double bound, Rng& rng) {
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = UniformReal(rng, -bound, bound);
}

double Softplus(double x) { return x > 30.0 ? x : std::log1p(std::exp(x)); }
double Sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }
double InverseSoftplus(double y) { return y > 30.0 ? y : std::log(std::expm1(y)); }

void CheckChannels(const FeatureMap& x, int expected, const char* layer) {
  if (x.channels() != expected) {
    throw ContractError(std::string(layer) + ": expected " + std::to_string(expected) +
                        " channels, got " + std::to_string(x.channels()));
  }
}

}  // namespace

Parameter::Parameter(std::string n, std::vector<int> s)
    : name(std::move(n)), shape(std::move(s)),
      value(Eigen::VectorXd::Zero(Product(shape))), grad(Eigen::VectorXd::Zero(Product(shape))) {}

FeatureMap FeatureMap::FromRows(const Matrix& rows) {
  FeatureMap out(static_cast<int>(rows.rows()), static_cast<int>(rows.cols()), 1);
  out.AsRows() = rows;
  return out;
}

void AddInPlace(FeatureMap& acc, const FeatureMap& other) {
  if (acc.size() != other.size()) throw ContractError("AddInPlace: shape mismatch");
  double* a = acc.data();
  const double* b = other.data();
  for (std::size_t i = 0; i < acc.size(); ++i) a[i] += b[i];
}

// --- MuLawFrontend ---------------------------------------------------------------

MuLawFrontend::MuLawFrontend(const std::string& name, double mu_init)
    : mu_raw(name + ".mu_raw", {1}) {
  if (!(mu_init > 0.0)) throw ContractError("mu_init must be positive");
  mu_raw.value[0] = InverseSoftplus(mu_init);
}

double MuLawFrontend::mu() const { return Softplus(mu_raw.value[0]); }

FeatureMap MuLawFrontend::Infer(const FeatureMap& x) const {
  const double m = mu();
  const double inv_log = 1.0 / std::log1p(m);
  FeatureMap y(x.batch(), x.channels(), x.length());
  const double* in = x.data();
  double* out = y.data();
  for (std::size_t i = 0; i < x.size(); ++i) {
    out[i] = std::copysign(std::log1p(m * std::abs(in[i])) * inv_log, in[i]);
  }
  return y;
}

FeatureMap MuLawFrontend::Forward(const FeatureMap& x) {
  input_ = x;
  return Infer(x);
}

FeatureMap MuLawFrontend::Backward(const FeatureMap& grad_out) {
  const double m = mu();
  const double log_mu = std::log1p(m);
  const double inv_log = 1.0 / log_mu;
  FeatureMap grad_in(input_.batch(), input_.channels(), input_.length());
  const double* x = input_.data();
  const double* g = grad_out.data();
  double* gi = grad_in.data();
  double d_mu = 0.0;
  for (std::size_t i = 0; i < input_.size(); ++i) {
    const double ax = std::abs(x[i]);
    const double denom = 1.0 + m * ax;
    gi[i] = g[i] * m * inv_log / denom;
    const double sign = x[i] > 0.0 ? 1.0 : (x[i] < 0.0 ? -1.0 : 0.0);
    d_mu += g[i] * sign * (ax / denom * inv_log - std::log1p(m * ax) / ((1.0 + m) * log_mu * log_mu));
  }
  mu_raw.grad[0] += d_mu * Sigmoid(mu_raw.value[0]);
  return grad_in;
}

void MuLawFrontend::Collect(ParameterList& list) { list.params.push_back(&mu_raw); }

// --- Conv1d ------------------------------------------------------------------------

Conv1d::Conv1d(const std::string& name, int in_channels, int out_channels, int kernel,
               bool with_bias, Rng& rng)
    : weight(name + ".weight", {kernel, out_channels, in_channels}),
      in_(in_channels), out_(out_channels), kernel_(kernel), has_bias_(with_bias) {
  if (in_channels <= 0 || out_channels <= 0 || kernel <= 0) {
    throw ContractError("Conv1d: non-positive dimension");
  }
  const double bound = 1.0 / std::sqrt(static_cast<double>(in_channels * kernel));
  FillUniform(weight.value, bound, rng);
  if (has_bias_) {
    bias = Parameter(name + ".bias", {out_channels});
    FillUniform(bias.value, bound, rng);
  }
}

FeatureMap Conv1d::Pad(const FeatureMap& x) const {
  CheckChannels(x, in_, "Conv1d");
  if (x.length() < kernel_) throw ContractError("Conv1d: input shorter than kernel");
  const int left = (kernel_ - 1) / 2;
  const int padded_len = x.length() + kernel_ - 1;
  FeatureMap p(x.batch(), in_, padded_len);
  for (int b = 0; b < x.batch(); ++b) {
    for (int c = 0; c < in_; ++c) {
      std::copy_n(&x.at(b, c, 0), x.length(), &p.at(b, c, left));
    }
  }
  return p;
}

FeatureMap Conv1d::Apply(const FeatureMap& padded, int length) const {
  FeatureMap y(padded.batch(), out_, length);
  for (int b = 0; b < padded.batch(); ++b) {
    ConstMatrixMap p = padded.Item(b);
    MatrixMap out = y.Item(b);
    for (int k = 0; k < kernel_; ++k) {
      ConstMatrixMap w(weight.value.data() + static_cast<Eigen::Index>(k) * out_ * in_, out_, in_);
      out.noalias() += w * p.middleCols(k, length);
    }
    if (has_bias_) out.colwise() += bias.value;
  }
  return y;
}

FeatureMap Conv1d::Forward(const FeatureMap& x) {
  padded_ = Pad(x);
  return Apply(padded_, x.length());
}

FeatureMap Conv1d::Infer(const FeatureMap& x) const { return Apply(Pad(x), x.length()); }

FeatureMap Conv1d::Backward(const FeatureMap& grad_out) {
  const int length = grad_out.length();
  const int left = (kernel_ - 1) / 2;
  FeatureMap grad_in(grad_out.batch(), in_, length);
  Matrix d_padded(in_, length + kernel_ - 1);
  for (int b = 0; b < grad_out.batch(); ++b) {
    ConstMatrixMap g = grad_out.Item(b);
    ConstMatrixMap p = std::as_const(padded_).Item(b);
    d_padded.setZero();
    for (int k = 0; k < kernel_; ++k) {
      const Eigen::Index offset = static_cast<Eigen::Index>(k) * out_ * in_;
      ConstMatrixMap w(weight.value.data() + offset, out_, in_);
      MatrixMap dw(weight.grad.data() + offset, out_, in_);
      dw.noalias() += g * p.middleCols(k, length).transpose();
      d_padded.middleCols(k, length).noalias() += w.transpose() * g;
    }
    if (has_bias_) bias.grad += g.rowwise().sum();
    grad_in.Item(b) = d_padded.middleCols(left, length);
  }
  return grad_in;
}

void Conv1d::Collect(ParameterList& list) {
  list.params.push_back(&weight);
  if (has_bias_) list.params.push_back(&bias);
}

// --- BatchNorm -----------------------------------------------------------------------

BatchNorm::BatchNorm(const std::string& name, int channels, double momentum, double eps)
    : gamma(name + ".gamma", {channels}),
      beta(name + ".beta", {channels}),
      running_mean{name + ".running_mean", Eigen::VectorXd::Zero(channels)},
      running_var{name + ".running_var", Eigen::VectorXd::Ones(channels)},
      channels_(channels), momentum_(momentum), eps_(eps) {
  gamma.value.setOnes();
}

FeatureMap BatchNorm::Forward(const FeatureMap& x) {
  CheckChannels(x, channels_, "BatchNorm");
  const int batch = x.batch(), length = x.length();
  const double count = static_cast<double>(batch) * length;
  normalized_ = FeatureMap(batch, channels_, length);
  inv_std_.resize(channels_);
  FeatureMap y(batch, channels_, length);
  for (int c = 0; c < channels_; ++c) {
    double sum = 0.0;
    for (int b = 0; b < batch; ++b) {
      const double* row = &x.at(b, c, 0);
      for (int t = 0; t < length; ++t) sum += row[t];
    }
    const double mean = sum / count;
    double sq = 0.0;
    for (int b = 0; b < batch; ++b) {
      const double* row = &x.at(b, c, 0);
      for (int t = 0; t < length; ++t) sq += (row[t] - mean) * (row[t] - mean);
    }
    const double var = sq / count;
    const double inv_std = 1.0 / std::sqrt(var + eps_);
    inv_std_[c] = inv_std;
    const double g = gamma.value[c], bt = beta.value[c];
    for (int b = 0; b < batch; ++b) {
      const double* row = &x.at(b, c, 0);
      double* xn = &normalized_.at(b, c, 0);
      double* out = &y.at(b, c, 0);
      for (int t = 0; t < length; ++t) {
        xn[t] = (row[t] - mean) * inv_std;
        out[t] = g * xn[t] + bt;
      }
    }
    const double unbiased = count > 1.0 ? var * count / (count - 1.0) : var;
    running_mean.value[c] = (1.0 - momentum_) * running_mean.value[c] + momentum_ * mean;
    running_var.value[c] = (1.0 - momentum_) * running_var.value[c] + momentum_ * unbiased;
  }
  return y;
}

FeatureMap BatchNorm::Backward(const FeatureMap& grad_out) {
  const int batch = grad_out.batch(), length = grad_out.length();
  const double count = static_cast<double>(batch) * length;
  FeatureMap grad_in(batch, channels_, length);
  for (int c = 0; c < channels_; ++c) {
    double sum_g = 0.0, sum_gx = 0.0;
    for (int b = 0; b < batch; ++b) {
      const double* g = &grad_out.at(b, c, 0);
      const double* xn = &normalized_.at(b, c, 0);
      for (int t = 0; t < length; ++t) {
        sum_g += g[t];
        sum_gx += g[t] * xn[t];
      }
    }
    beta.grad[c] += sum_g;
    gamma.grad[c] += sum_gx;
    const double scale = gamma.value[c] * inv_std_[c] / count;
    for (int b = 0; b < batch; ++b) {
      const double* g = &grad_out.at(b, c, 0);
      const double* xn = &normalized_.at(b, c, 0);
      double* gi = &grad_in.at(b, c, 0);
      for (int t = 0; t < length; ++t) gi[t] = scale * (count * g[t] - sum_g - xn[t] * sum_gx);
    }
  }
  return grad_in;
}

FeatureMap BatchNorm::Infer(const FeatureMap& x) const {
  CheckChannels(x, channels_, "BatchNorm");
  FeatureMap y(x.batch(), channels_, x.length());
  for (int c = 0; c < channels_; ++c) {
    const double scale = gamma.value[c] / std::sqrt(running_var.value[c] + eps_);
    const double shift = beta.value[c] - running_mean.value[c] * scale;
    for (int b = 0; b < x.batch(); ++b) {
      const double* row = &x.at(b, c, 0);
      double* out = &y.at(b, c, 0);
      for (int t = 0; t < x.length(); ++t) out[t] = row[t] * scale + shift;
    }
  }
  return y;
}

void BatchNorm::Collect(ParameterList& list) {
  list.params.push_back(&gamma);
  list.params.push_back(&beta);
  list.buffers.push_back(&running_mean);
  list.buffers.push_back(&running_var);
}

// --- Relu ------------------------------------------------------------------------------

FeatureMap Relu::Infer(const FeatureMap& x) {
  FeatureMap y(x.batch(), x.channels(), x.length());
  const double* in = x.data();
  double* out = y.data();
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = in[i] > 0.0 ? in[i] : 0.0;
  return y;
}

FeatureMap Relu::Forward(const FeatureMap& x) {
  output_ = Infer(x);
  return output_;
}

FeatureMap Relu::Backward(const FeatureMap& grad_out) const {
  FeatureMap grad_in(grad_out.batch(), grad_out.channels(), grad_out.length());
  const double* y = output_.data();
  const double* g = grad_out.data();
  double* gi = grad_in.data();
  for (std::size_t i = 0; i < grad_out.size(); ++i) gi[i] = y[i] > 0.0 ? g[i] : 0.0;
  return grad_in;
}

// --- BlurPool --------------------------------------------------------------------------

namespace {

constexpr double kBlurTaps[3] = {0.25, 0.5, 0.25};

inline int Reflect(int i, int n) {
  if (i < 0) return -i;
  if (i >= n) return 2 * n - 2 - i;
  return i;
}

}  // namespace

FeatureMap BlurPool::Infer(const FeatureMap& x) const {
  const int n = x.length();
  if (n < 2) throw ContractError("BlurPool: input needs at least 2 samples");
  const int out_len = (n + stride_ - 1) / stride_;
  FeatureMap y(x.batch(), x.channels(), out_len);
  for (int b = 0; b < x.batch(); ++b) {
    for (int c = 0; c < x.channels(); ++c) {
      const double* in = &x.at(b, c, 0);
      double* out = &y.at(b, c, 0);
      for (int t = 0; t < out_len; ++t) {
        const int center = t * stride_;
        out[t] = kBlurTaps[0] * in[Reflect(center - 1, n)] + kBlurTaps[1] * in[center] +
                 kBlurTaps[2] * in[Reflect(center + 1, n)];
      }
    }
  }
  return y;
}

FeatureMap BlurPool::Forward(const FeatureMap& x) {
  input_length_ = x.length();
  return Infer(x);
}

FeatureMap BlurPool::Backward(const FeatureMap& grad_out) const {
  const int n = input_length_;
  FeatureMap grad_in(grad_out.batch(), grad_out.channels(), n);
  for (int b = 0; b < grad_out.batch(); ++b) {
    for (int c = 0; c < grad_out.channels(); ++c) {
      const double* g = &grad_out.at(b, c, 0);
      double* gi = &grad_in.at(b, c, 0);
      for (int t = 0; t < grad_out.length(); ++t) {
        const int center = t * stride_;
        gi[Reflect(center - 1, n)] += kBlurTaps[0] * g[t];
        gi[center] += kBlurTaps[1] * g[t];
        gi[Reflect(center + 1, n)] += kBlurTaps[2] * g[t];
      }
    }
  }
  return grad_in;
}

// --- Linear ------------------------------------------------------------------------------

Linear::Linear(const std::string& name, int in_features, int out_features, bool with_bias,
               Rng& rng)
    : weight(name + ".weight", {out_features, in_features}),
      in_(in_features), out_(out_features), has_bias_(with_bias) {
  if (in_features <= 0 || out_features <= 0) throw ContractError("Linear: non-positive dimension");
  const double bound = 1.0 / std::sqrt(static_cast<double>(in_features));
  FillUniform(weight.value, bound, rng);
  if (has_bias_) {
    bias = Parameter(name + ".bias", {out_features});
    FillUniform(bias.value, bound, rng);
  }
}

FeatureMap Linear::Infer(const FeatureMap& x) const {
  if (x.length() != 1) throw ContractError("Linear: expects length-1 maps");
  CheckChannels(x, in_, "Linear");
  ConstMatrixMap w(weight.value.data(), out_, in_);
  FeatureMap y(x.batch(), out_, 1);
  // Row by row, so an item's output does not depend on its batch mates.
  for (int b = 0; b < x.batch(); ++b) {
    y.AsRows().row(b).transpose().noalias() = w * x.AsRows().row(b).transpose();
  }
  if (has_bias_) y.AsRows().rowwise() += bias.value.transpose();
  return y;
}

FeatureMap Linear::Forward(const FeatureMap& x) {
  input_ = x;
  return Infer(x);
}

FeatureMap Linear::Backward(const FeatureMap& grad_out) {
  ConstMatrixMap w(weight.value.data(), out_, in_);
  MatrixMap dw(weight.grad.data(), out_, in_);
  dw.noalias() += grad_out.AsRows().transpose() * input_.AsRows();
  if (has_bias_) bias.grad += grad_out.AsRows().colwise().sum().transpose();
  FeatureMap grad_in(grad_out.batch(), in_, 1);
  grad_in.AsRows().noalias() = grad_out.AsRows() * w;
  return grad_in;
}

void Linear::Collect(ParameterList& list) {
  list.params.push_back(&weight);
  if (has_bias_) list.params.push_back(&bias);
}

// --- TemporalStats -------------------------------------------------------------------------

FeatureMap TemporalStats::Infer(const FeatureMap& x) const {
  const int length = x.length();
  if (length < 2) throw ContractError("TemporalStats: time length must be at least 2");
  const int channels = x.channels();
  FeatureMap y(x.batch(), 2 * channels, 1);
  for (int b = 0; b < x.batch(); ++b) {
    for (int c = 0; c < channels; ++c) {
      const double* row = &x.at(b, c, 0);
      double sum = 0.0;
      for (int t = 0; t < length; ++t) sum += row[t];
      const double mean = sum / length;
      double sq = 0.0;
      for (int t = 0; t < length; ++t) sq += (row[t] - mean) * (row[t] - mean);
      y.at(b, c, 0) = mean;
      y.at(b, channels + c, 0) = std::sqrt(sq / length + eps_);
    }
  }
  return y;
}

FeatureMap TemporalStats::Forward(const FeatureMap& x) {
  input_ = x;
  stats_ = Infer(x);
  return stats_;
}

FeatureMap TemporalStats::Backward(const FeatureMap& grad_out) const {
  const int length = input_.length();
  const int channels = input_.channels();
  FeatureMap grad_in(input_.batch(), channels, length);
  for (int b = 0; b < input_.batch(); ++b) {
    for (int c = 0; c < channels; ++c) {
      const double mean = stats_.at(b, c, 0);
      const double std = stats_.at(b, channels + c, 0);
      const double g_mean = grad_out.at(b, c, 0) / length;
      const double g_std = grad_out.at(b, channels + c, 0) / (length * std);
      const double* row = &input_.at(b, c, 0);
      double* gi = &grad_in.at(b, c, 0);
      for (int t = 0; t < length; ++t) gi[t] = g_mean + g_std * (row[t] - mean);
    }
  }
  return grad_in;
}

}  // namespace corn
