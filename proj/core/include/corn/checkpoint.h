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

// Binary checkpoint container.
//
// Layout (little-endian):
//   8 bytes   magic "CORNCKPT"
//   uint32    format version
//   uint64    header length H
//   H bytes   JSON header: {"model": ModelConfig, "run": <config echo>,
//             "state": <trainer state>, "tensors": [{"name", "size"}...]}
//   float64   tensor payloads in header order

#ifndef CORN_CHECKPOINT_H_
#define CORN_CHECKPOINT_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "corn/model.h"
#include "corn/optimizer.h"

namespace corn {

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  ModelConfig model;
  nlohmann::json run = nlohmann::json::object();
  nlohmann::json state = nlohmann::json::object();
  std::map<std::string, Eigen::VectorXd> tensors;
};

// Throws IoError on I/O failure.
void WriteCheckpoint(const std::filesystem::path& path, const Checkpoint& checkpoint);
// Throws IoError or FormatError (bad magic, version, truncation).
Checkpoint ReadCheckpoint(const std::filesystem::path& path);

// Parameters, buffers and (optionally) Adam moments of `model`.
Checkpoint CaptureCheckpoint(CornModel& model, const Adam* optimizer = nullptr);

// Copies tensors into `model`. Throws ConfigError when the stored model
// config differs from model.config() or a tensor is missing or mis-sized.
void RestoreModel(const Checkpoint& checkpoint, CornModel& model);
void RestoreOptimizer(const Checkpoint& checkpoint, Adam& optimizer);

// Builds a model from the stored config and restores its tensors.
CornModel LoadModel(const Checkpoint& checkpoint);

}  // namespace corn

#endif  // CORN_CHECKPOINT_H_
