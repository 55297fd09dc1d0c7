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

#include "corn/trainer.h"

#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

#include "corn/error.h"
#include "corn/loss.h"

namespace corn {
namespace {

bool AllFinite(const Eigen::VectorXd& v) { return v.allFinite(); }

void CheckFinite(double loss, const char* head) {
  if (!std::isfinite(loss)) {
    throw NumericalError(std::string("non-finite ") + head + " loss");
  }
}

nlohmann::json OptionalJson(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

std::optional<double> OptionalFromJson(const nlohmann::json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

}  // namespace

std::string_view ToString(TrainMode mode) {
  switch (mode) {
    case TrainMode::kCorn: return "corn";
    case TrainMode::kFrOnly: return "fr_only";
    case TrainMode::kNrOnly: return "nr_only";
  }
  return "corn";
}

TrainMode ParseTrainMode(std::string_view name) {
  if (name == "corn") return TrainMode::kCorn;
  if (name == "fr_only") return TrainMode::kFrOnly;
  if (name == "nr_only") return TrainMode::kNrOnly;
  throw ConfigError("unknown training mode '" + std::string(name) + "'");
}

void TrainConfig::Validate() const {
  if (!(lr > 0.0)) throw ConfigError("train.lr must be > 0");
  if (batch_size <= 0) throw ConfigError("train.batch_size must be positive");
  if (epochs < 0) throw ConfigError("train.epochs must be >= 0");
  if (pairs_per_epoch < 0) throw ConfigError("train.pairs_per_epoch must be >= 0");
  if (!(beta > 0.0)) throw ConfigError("train.beta must be > 0");
  if (!(w_fr >= 0.0) || !(w_nr >= 0.0)) throw ConfigError("train loss weights must be >= 0");
  if (!(excerpt_s > 0.0)) throw ConfigError("train.excerpt_s must be > 0");
  if (checkpoint_every < 0) throw ConfigError("train.checkpoint_every must be >= 0");
}

void to_json(nlohmann::json& j, const TrainConfig& c) {
  j = nlohmann::json{{"mode", ToString(c.mode)},
                     {"target_metric", ToString(c.target_metric)},
                     {"lr", c.lr},
                     {"batch_size", c.batch_size},
                     {"epochs", c.epochs},
                     {"pairs_per_epoch", c.pairs_per_epoch},
                     {"beta", c.beta},
                     {"w_fr", c.w_fr},
                     {"w_nr", c.w_nr},
                     {"seed", c.seed},
                     {"excerpt_s", c.excerpt_s},
                     {"checkpoint_every", c.checkpoint_every}};
}

void to_json(nlohmann::json& j, const EpochRecord& r) {
  j = nlohmann::json{{"epoch", r.epoch},
                     {"loss_fr", OptionalJson(r.loss_fr)},
                     {"loss_nr", OptionalJson(r.loss_nr)},
                     {"loss_total", r.loss_total}};
}

void from_json(const nlohmann::json& j, EpochRecord& r) {
  r.epoch = j.at("epoch").get<int>();
  r.loss_fr = OptionalFromJson(j.at("loss_fr"));
  r.loss_nr = OptionalFromJson(j.at("loss_nr"));
  r.loss_total = j.at("loss_total").get<double>();
}

std::vector<Parameter*> TrainableParameters(CornModel& model, TrainMode mode) {
  ParameterList list = model.EncoderParameters();
  if (mode != TrainMode::kNrOnly) model.fr_head().Collect(list);
  if (mode != TrainMode::kFrOnly) model.nr_head().Collect(list);
  return list.params;
}

StepLosses ComputeGradients(CornModel& model, const std::vector<const TrainingPair*>& batch,
                            const TrainConfig& config) {
  if (batch.empty()) throw ContractError("empty training batch");
  model.ZeroGrad();
  const int n = static_cast<int>(batch.size());
  const bool use_fr = config.UsesFr();
  const bool use_nr = config.UsesNr();
  const double w_fr = config.EffectiveWFr();
  const double w_nr = config.EffectiveWNr();

  std::vector<const Waveform*> inputs;
  Eigen::VectorXd targets(n);
  for (int i = 0; i < n; ++i) {
    inputs.push_back(&batch[i]->degraded);
    targets[i] = batch[i]->target.value;
  }
  if (use_fr) {
    for (int i = 0; i < n; ++i) inputs.push_back(&batch[i]->reference);
  }

  const Matrix e = model.encoder().Forward(StackWaveforms(inputs));
  const int d = model.embed_dim();
  Matrix grad_e = Matrix::Zero(e.rows(), d);
  StepLosses losses;

  if (use_fr) {
    const Eigen::VectorXd f = model.fr_head().Forward(ConcatColumns(e.topRows(n), e.bottomRows(n)));
    Eigen::VectorXd g;
    const double loss = MeanSmoothedL1(f, targets, config.beta, &g);
    CheckFinite(loss, "FR");
    losses.fr = loss;
    losses.total += w_fr * loss;
    if (w_fr > 0.0) {
      const Matrix grad_in = model.fr_head().Backward(w_fr * g);
      grad_e.topRows(n) += grad_in.leftCols(d);
      grad_e.bottomRows(n) += grad_in.rightCols(d);
    }
  }
  if (use_nr) {
    const Eigen::VectorXd s = model.nr_head().Forward(e.topRows(n));
    Eigen::VectorXd g;
    const double loss = MeanSmoothedL1(s, targets, config.beta, &g);
    CheckFinite(loss, "NR");
    losses.nr = loss;
    losses.total += w_nr * loss;
    if (w_nr > 0.0) grad_e.topRows(n) += model.nr_head().Backward(w_nr * g);
  }
  model.encoder().Backward(grad_e);

  for (const Parameter* p : model.Parameters().params) {
    if (!AllFinite(p->grad)) throw NumericalError("non-finite gradient in " + p->name);
  }
  return losses;
}

StepLosses CoTrainStep(CornModel& model, Adam& optimizer,
                       const std::vector<const TrainingPair*>& batch, const TrainConfig& config) {
  const StepLosses losses = ComputeGradients(model, batch, config);
  optimizer.Step(TrainableParameters(model, config.mode));
  return losses;
}

TrainState InitTrainState(const ModelConfig& model_config, const TrainConfig& config) {
  config.Validate();
  return TrainState{CornModel(model_config, config.seed), Adam(AdamConfig{config.lr}), 0, {}};
}

void Train(TrainState& state, const PairSynthesizer& pairs, const TrainConfig& config,
           const TrainHooks& hooks) {
  config.Validate();
  if (pairs.metric().kind() != config.target_metric) {
    throw ConfigError("pair synthesizer scores " + std::string(ToString(pairs.metric().kind())) +
                      " but training targets " + std::string(ToString(config.target_metric)));
  }
  const int per_epoch = config.EffectivePairsPerEpoch();
  for (int epoch = state.epoch + 1; epoch <= config.epochs; ++epoch) {
    const std::uint64_t first = static_cast<std::uint64_t>(epoch - 1) * per_epoch;
    const std::vector<TrainingPair> data = pairs.MakeRange(first, per_epoch);
    double sum_fr = 0.0, sum_nr = 0.0, sum_total = 0.0;
    int steps = 0;
    for (int start = 0; start < per_epoch; start += config.batch_size) {
      const int end = std::min(per_epoch, start + config.batch_size);
      std::vector<const TrainingPair*> batch;
      for (int i = start; i < end; ++i) batch.push_back(&data[i]);
      StepLosses losses;
      try {
        losses = CoTrainStep(state.model, state.optimizer, batch, config);
      } catch (const NumericalError& e) {
        std::ostringstream msg;
        msg << e.what() << " at epoch " << epoch << ", pairs [" << first + start << ", "
            << first + end << ")";
        throw NumericalError(msg.str());
      }
      sum_fr += losses.fr.value_or(0.0);
      sum_nr += losses.nr.value_or(0.0);
      sum_total += losses.total;
      ++steps;
    }
    EpochRecord record;
    record.epoch = epoch;
    if (config.UsesFr()) record.loss_fr = sum_fr / steps;
    if (config.UsesNr()) record.loss_nr = sum_nr / steps;
    record.loss_total = sum_total / steps;
    state.history.push_back(record);
    state.epoch = epoch;
    if (hooks.on_epoch) hooks.on_epoch(state, record);
    if (config.checkpoint_every > 0 && !hooks.checkpoint_path.empty() &&
        (epoch % config.checkpoint_every == 0 || epoch == config.epochs)) {
      SaveTrainState(hooks.checkpoint_path, state, config, hooks.run_echo);
    }
  }
}

Checkpoint CaptureTrainState(TrainState& state, const TrainConfig& config,
                             const nlohmann::json* run_echo) {
  Checkpoint ckpt = CaptureCheckpoint(state.model, &state.optimizer);
  if (run_echo) ckpt.run = *run_echo;
  ckpt.state["epoch"] = state.epoch;
  ckpt.state["mode"] = ToString(config.mode);
  ckpt.state["target_metric"] = ToString(config.target_metric);
  nlohmann::json history = nlohmann::json::array();
  for (const EpochRecord& r : state.history) {
    nlohmann::json row = r;
    row["loss_total"] = r.loss_total;
    history.push_back(row);
  }
  ckpt.state["history"] = history;
  return ckpt;
}

void SaveTrainState(const std::filesystem::path& path, TrainState& state, const TrainConfig& config,
                    const nlohmann::json* run_echo) {
  WriteCheckpoint(path, CaptureTrainState(state, config, run_echo));
}

TrainState LoadTrainState(const std::filesystem::path& path, const ModelConfig& model_config,
                          const TrainConfig& config) {
  const Checkpoint ckpt = ReadCheckpoint(path);
  TrainState state = InitTrainState(model_config, config);
  RestoreModel(ckpt, state.model);
  if (ckpt.state.value("mode", "") != ToString(config.mode) ||
      ckpt.state.value("target_metric", "") != ToString(config.target_metric)) {
    throw ConfigError("checkpoint " + path.string() + " was trained with mode " +
                      ckpt.state.value("mode", "?") + " on " +
                      ckpt.state.value("target_metric", "?"));
  }
  RestoreOptimizer(ckpt, state.optimizer);
  state.epoch = ckpt.state.value("epoch", 0);
  for (const auto& row : ckpt.state.value("history", nlohmann::json::array())) {
    EpochRecord r = row.get<EpochRecord>();
    r.loss_total = row.value("loss_total", 0.0);
    state.history.push_back(r);
  }
  return state;
}

}  // namespace corn
