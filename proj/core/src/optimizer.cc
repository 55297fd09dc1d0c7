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

#include "corn/optimizer.h"

#include <cmath>

#include "corn/error.h"

namespace corn {

Adam::Adam(AdamConfig config) : config_(config) {
  if (!(config_.lr >= 0.0) || !(config_.beta1 >= 0.0 && config_.beta1 < 1.0) ||
      !(config_.beta2 >= 0.0 && config_.beta2 < 1.0) || !(config_.eps > 0.0)) {
    throw ConfigError("invalid Adam hyper-parameters");
  }
}

void Adam::Step(const std::vector<Parameter*>& params) {
  ++step_;
  const double c1 = 1.0 - std::pow(config_.beta1, static_cast<double>(step_));
  const double c2 = 1.0 - std::pow(config_.beta2, static_cast<double>(step_));
  const double step_size = config_.lr / c1;
  const double inv_sqrt_c2 = 1.0 / std::sqrt(c2);
  for (Parameter* p : params) {
    Moments& s = moments_[p->name];
    if (s.m.size() != p->size()) {
      s.m = Eigen::VectorXd::Zero(p->size());
      s.v = Eigen::VectorXd::Zero(p->size());
    }
    s.m = config_.beta1 * s.m + (1.0 - config_.beta1) * p->grad;
    s.v = config_.beta2 * s.v + (1.0 - config_.beta2) * p->grad.cwiseAbs2();
    p->value.array() -=
        step_size * s.m.array() / ((s.v.array().sqrt() * inv_sqrt_c2) + config_.eps);
  }
}

}  // namespace corn
