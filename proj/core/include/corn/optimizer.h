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

#ifndef CORN_OPTIMIZER_H_
#define CORN_OPTIMIZER_H_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "corn/nn.h"

namespace corn {

struct AdamConfig {
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Adam with bias correction. Moments are keyed by parameter name so the state
// survives model copies and checkpoint round trips.
class Adam {
 public:
  struct Moments {
    Eigen::VectorXd m;
    Eigen::VectorXd v;
  };

  explicit Adam(AdamConfig config = {});

  // One update of every listed parameter from its accumulated gradient.
  void Step(const std::vector<Parameter*>& params);

  const AdamConfig& config() const { return config_; }
  std::int64_t step_count() const { return step_; }
  void set_step_count(std::int64_t step) { step_ = step; }
  const std::map<std::string, Moments>& moments() const { return moments_; }
  std::map<std::string, Moments>& moments() { return moments_; }

 private:
  AdamConfig config_;
  std::int64_t step_ = 0;
  std::map<std::string, Moments> moments_;
};

}  // namespace corn

#endif  // CORN_OPTIMIZER_H_
