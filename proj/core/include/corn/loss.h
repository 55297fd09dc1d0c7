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

#ifndef CORN_LOSS_H_
#define CORN_LOSS_H_

#include <Eigen/Core>

namespace corn {

// Smoothed L1 with knee beta, d = prediction - target:
//   d^2 / beta        if |d| <= beta
//   2 |d| - beta      otherwise
// Twice the usual Huber-style smooth L1; both branches and their slopes meet
// at |d| = beta. Throws ContractError unless beta > 0.
double SmoothedL1(double prediction, double target, double beta);

// d/d(prediction) of SmoothedL1.
double SmoothedL1Grad(double prediction, double target, double beta);

// Batch mean of SmoothedL1; `grad`, when non-null, receives the gradient of
// the mean with respect to each prediction.
double MeanSmoothedL1(const Eigen::VectorXd& predictions, const Eigen::VectorXd& targets,
                      double beta, Eigen::VectorXd* grad = nullptr);

}  // namespace corn

#endif  // CORN_LOSS_H_
