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

#include "corn/fft.h"

#include <fftw3.h>

#include <algorithm>
#include <cstring>
#include <mutex>

#include "corn/error.h"

namespace corn {
namespace {

std::mutex& PlannerMutex() {
  static std::mutex mu;
  return mu;
}

}  // namespace

struct RealFft::Impl {
  double* real = nullptr;
  fftw_complex* spectrum = nullptr;
  fftw_plan forward = nullptr;
  fftw_plan inverse = nullptr;
};

RealFft::RealFft(std::size_t size) : size_(size), impl_(std::make_unique<Impl>()) {
  if (size < 2) throw ContractError("RealFft: size must be at least 2");
  std::lock_guard<std::mutex> lock(PlannerMutex());
  impl_->real = fftw_alloc_real(size);
  impl_->spectrum = fftw_alloc_complex(size / 2 + 1);
  const int n = static_cast<int>(size);
  impl_->forward = fftw_plan_dft_r2c_1d(n, impl_->real, impl_->spectrum, FFTW_ESTIMATE);
  impl_->inverse = fftw_plan_dft_c2r_1d(n, impl_->spectrum, impl_->real, FFTW_ESTIMATE);
}

RealFft::~RealFft() {
  std::lock_guard<std::mutex> lock(PlannerMutex());
  fftw_destroy_plan(impl_->forward);
  fftw_destroy_plan(impl_->inverse);
  fftw_free(impl_->real);
  fftw_free(impl_->spectrum);
}

void RealFft::Forward(std::span<const double> input, std::vector<std::complex<double>>& output) {
  if (input.size() != size_) throw ContractError("RealFft::Forward: size mismatch");
  std::copy(input.begin(), input.end(), impl_->real);
  fftw_execute(impl_->forward);
  output.resize(bins());
  std::memcpy(output.data(), impl_->spectrum, bins() * sizeof(fftw_complex));
}

void RealFft::Inverse(std::span<const std::complex<double>> input, std::vector<double>& output) {
  if (input.size() != bins()) throw ContractError("RealFft::Inverse: size mismatch");
  // c2r destroys its input, so it works on the internal buffer.
  std::memcpy(impl_->spectrum, input.data(), bins() * sizeof(fftw_complex));
  fftw_execute(impl_->inverse);
  output.assign(impl_->real, impl_->real + size_);
}

std::vector<double> FftConvolveTruncated(std::span<const double> x, std::span<const double> h) {
  if (x.empty() || h.empty()) throw ContractError("convolution of empty sequence");
  const std::size_t needed = x.size() + h.size() - 1;
  std::size_t n = 1;
  while (n < needed) n <<= 1;
  RealFft fft(std::max<std::size_t>(n, 2));
  std::vector<double> xp(fft.size(), 0.0), hp(fft.size(), 0.0);
  std::copy(x.begin(), x.end(), xp.begin());
  std::copy(h.begin(), h.end(), hp.begin());
  std::vector<std::complex<double>> xs, hs;
  fft.Forward(xp, xs);
  fft.Forward(hp, hs);
  for (std::size_t k = 0; k < xs.size(); ++k) xs[k] *= hs[k];
  std::vector<double> y;
  fft.Inverse(xs, y);
  const double scale = 1.0 / static_cast<double>(fft.size());
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = y[i] * scale;
  return out;
}

}  // namespace corn
