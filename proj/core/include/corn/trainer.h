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

// Co-training loop and the single-head baselines.
//
// In every mode a step embeds the degraded inputs x (and, when the FR head
// is active, the references r) in one batched encoder pass, so the batch-norm
// statistics are shared by both paths. The total loss is
//   w_fr * mean L(f(x, r), s) + w_nr * mean L(n(x), s)
// with L the smoothed L1 of loss.h, followed by one Adam step over every
// parameter that received a gradient.

#ifndef CORN_TRAINER_H_
#define CORN_TRAINER_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "corn/checkpoint.h"
#include "corn/metrics.h"
#include "corn/model.h"
#include "corn/optimizer.h"
#include "corn/synthesis.h"

namespace corn {

enum class TrainMode { kCorn, kFrOnly, kNrOnly };

std::string_view ToString(TrainMode mode);
TrainMode ParseTrainMode(std::string_view name);

struct TrainConfig {
  TrainMode mode = TrainMode::kCorn;
  MetricKind target_metric = MetricKind::kSiSdr;
  double lr = 1e-4;
  int batch_size = 64;
  int epochs = 1000;
  // Pairs per epoch; 0 means 10 * batch_size.
  int pairs_per_epoch = 0;
  double beta = 1.0;
  double w_fr = 1.0;
  double w_nr = 1.0;
  std::uint64_t seed = 0;
  double excerpt_s = 3.0;
  // Save a checkpoint every N epochs (0 disables).
  int checkpoint_every = 0;

  int EffectivePairsPerEpoch() const { return pairs_per_epoch > 0 ? pairs_per_epoch : 10 * batch_size; }
  // Loss weights after applying the mode: fr_only zeroes w_nr, nr_only w_fr.
  double EffectiveWFr() const { return mode == TrainMode::kNrOnly ? 0.0 : w_fr; }
  double EffectiveWNr() const { return mode == TrainMode::kFrOnly ? 0.0 : w_nr; }
  bool UsesFr() const { return mode != TrainMode::kNrOnly; }
  bool UsesNr() const { return mode != TrainMode::kFrOnly; }

  // Throws ConfigError.
  void Validate() const;
};

void to_json(nlohmann::json& j, const TrainConfig& config);

// Batch-mean losses of one step; a head that is not part of the mode
// reports nullopt.
struct StepLosses {
  std::optional<double> fr;
  std::optional<double> nr;
  double total = 0.0;
};

struct EpochRecord {
  int epoch = 0;  // 1-based
  std::optional<double> loss_fr;
  std::optional<double> loss_nr;
  double loss_total = 0.0;
};

void to_json(nlohmann::json& j, const EpochRecord& record);
void from_json(const nlohmann::json& j, EpochRecord& record);

// Zeroes gradients, runs the training-mode forward and backward passes and
// leaves the gradients in the model. Throws NumericalError on a non-finite
// loss or gradient.
StepLosses ComputeGradients(CornModel& model, const std::vector<const TrainingPair*>& batch,
                            const TrainConfig& config);

// ComputeGradients followed by one Adam update of the mode's parameters.
StepLosses CoTrainStep(CornModel& model, Adam& optimizer,
                       const std::vector<const TrainingPair*>& batch, const TrainConfig& config);

// Parameters a mode trains: encoder plus its active heads.
std::vector<Parameter*> TrainableParameters(CornModel& model, TrainMode mode);

struct TrainState {
  CornModel model;
  Adam optimizer;
  int epoch = 0;  // completed epochs
  std::vector<EpochRecord> history;
};

TrainState InitTrainState(const ModelConfig& model_config, const TrainConfig& config);

struct TrainHooks {
  // Called after every completed epoch.
  std::function<void(const TrainState&, const EpochRecord&)> on_epoch;
  // Checkpoint destination used when config.checkpoint_every > 0.
  std::filesystem::path checkpoint_path;
  // Embedded as the checkpoint's "run" section.
  const nlohmann::json* run_echo = nullptr;
};

// Runs epochs state.epoch + 1 .. config.epochs. Epoch e consumes pairs
// [(e - 1) * P, e * P) of `pairs`, in order, so every mode with the same
// seed sees the same sequence and a resumed run continues where it stopped.
void Train(TrainState& state, const PairSynthesizer& pairs, const TrainConfig& config,
           const TrainHooks& hooks = {});

// Checkpoint holding everything needed to resume.
Checkpoint CaptureTrainState(TrainState& state, const TrainConfig& config,
                             const nlohmann::json* run_echo = nullptr);
void SaveTrainState(const std::filesystem::path& path, TrainState& state, const TrainConfig& config,
                    const nlohmann::json* run_echo = nullptr);
// Throws ConfigError if the checkpoint's model config differs from
// `model_config` or it was written by a different mode or target.
TrainState LoadTrainState(const std::filesystem::path& path, const ModelConfig& model_config,
                          const TrainConfig& config);

}  // namespace corn

#endif  // CORN_TRAINER_H_
