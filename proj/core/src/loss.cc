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

#include "corn/loss.h"

#include <cmath>

#include "corn/error.h"

namespace corn {
namespace {

void CheckBeta(double beta) {
  if (!(beta > 0.0)) throw ContractError("smoothed L1 needs beta > 0");
}

}  // namespace

double SmoothedL1(double prediction, double target, double beta) {
  CheckBeta(beta);
  const double d = std::abs(prediction - target);
  return d <= beta ? d * d / beta : 2.0 * d - beta;
}

double SmoothedL1Grad(double prediction, double target, double beta) {
  CheckBeta(beta);
  const double d = prediction - target;
  return std::abs(d) <= beta ? 2.0 * d / beta : (d > 0.0 ? 2.0 : -2.0);
}

double MeanSmoothedL1(const Eigen::VectorXd& predictions, const Eigen::VectorXd& targets,
                      double beta, Eigen::VectorXd* grad) {
  if (predictions.size() != targets.size() || predictions.size() == 0) {
    throw ContractError("MeanSmoothedL1: size mismatch or empty batch");
  }
  const double n = static_cast<double>(predictions.size());
  if (grad) grad->resize(predictions.size());
  double total = 0.0;
  for (Eigen::Index i = 0; i < predictions.size(); ++i) {
    total += SmoothedL1(predictions[i], targets[i], beta);
    if (grad) (*grad)[i] = SmoothedL1Grad(predictions[i], targets[i], beta) / n;
  }
  return total / n;
}

}  // namespace corn
