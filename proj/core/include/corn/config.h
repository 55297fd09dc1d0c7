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

// Run configuration: a JSON document with the sections seed, audio, data,
// degradation, model, train, eval and pesq. User files are merged onto the
// defaults; unknown keys and type mismatches are rejected. Individual keys
// can be overridden with dotted names ("train.lr=3e-4").

#ifndef CORN_CONFIG_H_
#define CORN_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "corn/evaluation.h"
#include "corn/metrics.h"
#include "corn/model.h"
#include "corn/pesq_adapter.h"
#include "corn/synthesis.h"
#include "corn/trainer.h"

namespace corn {

class RunConfig {
 public:
  RunConfig();

  static const nlohmann::json& Defaults();
  static RunConfig FromJson(const nlohmann::json& overrides);
  static RunConfig FromFile(const std::filesystem::path& path);

  // Merges `overrides` (same layout as the defaults). Throws ConfigError.
  void Merge(const nlohmann::json& overrides);
  // Sets one dotted key. `value` is parsed as JSON when possible and taken
  // as a string otherwise.
  void Set(std::string_view dotted_key, std::string_view value);
  bool HasKey(std::string_view dotted_key) const;

  const nlohmann::json& json() const { return doc_; }

  std::uint64_t seed() const;
  int sample_rate() const;
  double excerpt_s() const;
  std::string manifest_path() const;
  double holdout_fraction() const;
  // data.synthesis, forced to additive_only when the target metric is snr.
  SynthesisMode synthesis() const;
  DegradationSamplerConfig sampler() const;
  ModelConfig model() const;
  TrainConfig train() const;
  EvalConfig eval() const;
  PesqOptions pesq() const;

  // Validates every section; throws ConfigError.
  void Validate() const;

 private:
  nlohmann::json doc_;
};

// Target metric named by train.target_metric. PESQ uses `pesq` (created
// from the pesq section when null); throws ConfigError when PESQ is chosen
// but no command is configured.
TargetMetric MakeTargetMetric(const RunConfig& config, std::shared_ptr<PesqAdapter> pesq = nullptr);

}  // namespace corn

#endif  // CORN_CONFIG_H_
