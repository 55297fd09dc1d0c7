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

#include "gradient_check.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "corn/metrics.h"
#include "corn/random.h"
#include "test_util.h"

namespace corn::testing {

std::string ParameterGroup(const std::string& name) {
  auto has = [&name](const char* s) { return name.find(s) != std::string::npos; };
  if (has("fr_head")) return "fr_head";
  if (has("nr_head")) return "nr_head";
  if (has("mu_raw")) return "mu";
  if (has("a_raw")) return "a_raw";
  if (has("conv.")) return "conv";
  if (has("bn.") || has("bn0.")) return "bn";
  if (has("mlp1.") || has("mlp2.")) return "mlp";
  return "other";
}

std::vector<TrainingPair> GradientCheckBatch(int n, int length, std::uint64_t seed) {
  const SourceBank bank = ToyBank(3, 2, seed, 0.5);
  const double excerpt_s = static_cast<double>(length) / kWorkingSampleRate;
  const PairSynthesizer synth(bank, SiSdrMetric(), SynthesisMode::kAdditiveOnly, {}, excerpt_s, seed);
  std::vector<TrainingPair> batch = synth.MakeRange(0, n);
  const double pinned[] = {25.0, -30.0, 12.0, -8.0, 33.0, -17.0};
  for (int i = 0; i < n; ++i) batch[i].target.value = pinned[i % 6];
  return batch;
}

std::map<std::string, GroupError> GradientCheck(CornModel& model, const std::vector<TrainingPair>& batch,
                                                const TrainConfig& config, int per_tensor, double h,
                                                double floor) {
  std::vector<const TrainingPair*> ptrs;
  for (const TrainingPair& p : batch) ptrs.push_back(&p);
  auto loss = [&] { return ComputeGradients(model, ptrs, config).total; };

  loss();
  std::vector<Parameter*> params = model.Parameters().params;
  std::vector<Eigen::VectorXd> analytic;
  for (const Parameter* p : params) analytic.push_back(p->grad);

  Rng rng(12345);
  std::map<std::string, GroupError> groups;
  for (std::size_t pi = 0; pi < params.size(); ++pi) {
    Parameter& p = *params[pi];
    const Eigen::VectorXd& g = analytic[pi];
    std::vector<Eigen::Index> order(static_cast<std::size_t>(g.size()));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&g](Eigen::Index a, Eigen::Index b) { return std::abs(g[a]) > std::abs(g[b]); });
    std::vector<Eigen::Index> picks(order.begin(),
                                    order.begin() + std::min<std::size_t>(order.size(), per_tensor - 1));
    picks.push_back(static_cast<Eigen::Index>(UniformIndex(rng, static_cast<std::uint64_t>(g.size()))));

    GroupError& group = groups[ParameterGroup(p.name)];
    ++group.tensors;
    for (Eigen::Index i : picks) {
      const double saved = p.value[i];
      auto at = [&](double offset) {
        p.value[i] = saved + offset;
        return loss();
      };
      // Fourth-order central difference.
      const double numeric = (8.0 * (at(h) - at(-h)) - (at(2.0 * h) - at(-2.0 * h))) / (12.0 * h);
      p.value[i] = saved;
      const double scale = std::max(std::abs(g[i]), std::abs(numeric));
      const double rel = scale < floor ? 0.0 : std::abs(g[i] - numeric) / scale;
      ++group.coordinates;
      if (rel >= group.max_rel) {
        group.max_rel = rel;
        group.worst = p.name + "[" + std::to_string(i) + "] analytic " + std::to_string(g[i]) +
                      " numeric " + std::to_string(numeric);
      }
    }
  }
  return groups;
}

}  // namespace corn::testing
