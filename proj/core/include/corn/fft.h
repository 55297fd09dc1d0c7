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

#ifndef CORN_FFT_H_
#define CORN_FFT_H_

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace corn {

// Real-to-complex / complex-to-real transform of a fixed size backed by
// FFTW. Plan creation is serialized internally; Forward/Inverse on distinct
// objects may run concurrently.
class RealFft {
 public:
  explicit RealFft(std::size_t size);
  ~RealFft();
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  std::size_t size() const { return size_; }
  std::size_t bins() const { return size_ / 2 + 1; }

  // input.size() == size(); output gets bins() values.
  void Forward(std::span<const double> input, std::vector<std::complex<double>>& output);
  // Unnormalized inverse: Inverse(Forward(x)) == size() * x.
  void Inverse(std::span<const std::complex<double>> input, std::vector<double>& output);

 private:
  struct Impl;
  std::size_t size_;
  std::unique_ptr<Impl> impl_;
};

// Linear convolution of x and h truncated to the first x.size() samples.
std::vector<double> FftConvolveTruncated(std::span<const double> x, std::span<const double> h);

}  // namespace corn

#endif  // CORN_FFT_H_
