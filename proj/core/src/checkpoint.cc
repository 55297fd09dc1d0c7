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

#include "corn/checkpoint.h"

#include <bit>
#include <cstring>
#include <fstream>

#include "corn/error.h"

namespace corn {
namespace {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes little-endian");

constexpr char kMagic[8] = {'C', 'O', 'R', 'N', 'C', 'K', 'P', 'T'};
constexpr char kAdamM[] = "adam.m/";
constexpr char kAdamV[] = "adam.v/";
constexpr char kAdamStep[] = "adam_step";

template <typename T>
void WritePod(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T ReadPod(std::istream& in, const std::string& what) {
  T v{};
  if (!in.read(reinterpret_cast<char*>(&v), sizeof(T))) throw FormatError("truncated " + what);
  return v;
}

}  // namespace

void WriteCheckpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  nlohmann::json header;
  header["model"] = ckpt.model;
  header["run"] = ckpt.run;
  header["state"] = ckpt.state;
  header["tensors"] = nlohmann::json::array();
  for (const auto& [name, t] : ckpt.tensors) {
    header["tensors"].push_back({{"name", name}, {"size", t.size()}});
  }
  const std::string text = header.dump();

  // Write to a sibling file first so an interrupted save never clobbers the
  // previous checkpoint.
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out.write(kMagic, sizeof(kMagic));
    WritePod(out, kCheckpointVersion);
    WritePod(out, static_cast<std::uint64_t>(text.size()));
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    for (const auto& [name, t] : ckpt.tensors) {
      out.write(reinterpret_cast<const char*>(t.data()),
                static_cast<std::streamsize>(t.size() * sizeof(double)));
    }
    if (!out) throw IoError("failed writing " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move checkpoint into place at " + path.string() + ": " + ec.message());
}

Checkpoint ReadCheckpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint " + path.string());
  char magic[sizeof(kMagic)];
  if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw FormatError(path.string() + " is not a checkpoint");
  }
  const auto version = ReadPod<std::uint32_t>(in, "version");
  if (version != kCheckpointVersion) {
    throw FormatError("unsupported checkpoint version " + std::to_string(version));
  }
  const auto header_len = ReadPod<std::uint64_t>(in, "header length");
  if (header_len > (1ull << 30)) throw FormatError("implausible checkpoint header length");
  std::string text(header_len, '\0');
  if (!in.read(text.data(), static_cast<std::streamsize>(header_len))) {
    throw FormatError("truncated checkpoint header");
  }
  Checkpoint ckpt;
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(text);
    ckpt.model = header.at("model").get<ModelConfig>();
    ckpt.run = header.value("run", nlohmann::json::object());
    ckpt.state = header.value("state", nlohmann::json::object());
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("bad checkpoint header: " + std::string(e.what()));
  }
  for (const auto& entry : header.at("tensors")) {
    const std::string name = entry.at("name");
    const auto size = entry.at("size").get<Eigen::Index>();
    Eigen::VectorXd t(size);
    if (!in.read(reinterpret_cast<char*>(t.data()), static_cast<std::streamsize>(size * sizeof(double)))) {
      throw FormatError("truncated tensor " + name);
    }
    ckpt.tensors.emplace(name, std::move(t));
  }
  return ckpt;
}

Checkpoint CaptureCheckpoint(CornModel& model, const Adam* optimizer) {
  Checkpoint ckpt;
  ckpt.model = model.config();
  const ParameterList list = model.Parameters();
  for (const Parameter* p : list.params) ckpt.tensors[p->name] = p->value;
  for (const Buffer* b : list.buffers) ckpt.tensors[b->name] = b->value;
  if (optimizer) {
    for (const auto& [name, m] : optimizer->moments()) {
      ckpt.tensors[kAdamM + name] = m.m;
      ckpt.tensors[kAdamV + name] = m.v;
    }
    ckpt.state[kAdamStep] = optimizer->step_count();
  }
  return ckpt;
}

namespace {

void CopyTensor(const Checkpoint& ckpt, const std::string& name, Eigen::VectorXd& dst) {
  auto it = ckpt.tensors.find(name);
  if (it == ckpt.tensors.end()) throw ConfigError("checkpoint lacks tensor " + name);
  if (it->second.size() != dst.size()) {
    throw ConfigError("checkpoint tensor " + name + " has size " + std::to_string(it->second.size()) +
                      ", model expects " + std::to_string(dst.size()));
  }
  dst = it->second;
}

}  // namespace

void RestoreModel(const Checkpoint& ckpt, CornModel& model) {
  if (!(ckpt.model == model.config())) {
    throw ConfigError("checkpoint model config " + nlohmann::json(ckpt.model).dump() +
                      " does not match " + nlohmann::json(model.config()).dump());
  }
  const ParameterList list = model.Parameters();
  for (Parameter* p : list.params) CopyTensor(ckpt, p->name, p->value);
  for (Buffer* b : list.buffers) CopyTensor(ckpt, b->name, b->value);
}

void RestoreOptimizer(const Checkpoint& ckpt, Adam& optimizer) {
  optimizer.moments().clear();
  const std::string m_prefix = kAdamM;
  for (const auto& [name, t] : ckpt.tensors) {
    if (name.rfind(m_prefix, 0) != 0) continue;
    const std::string param = name.substr(m_prefix.size());
    auto v = ckpt.tensors.find(kAdamV + param);
    if (v == ckpt.tensors.end()) throw FormatError("checkpoint lacks second moment of " + param);
    optimizer.moments()[param] = Adam::Moments{t, v->second};
  }
  optimizer.set_step_count(ckpt.state.value(kAdamStep, std::int64_t{0}));
}

CornModel LoadModel(const Checkpoint& ckpt) {
  CornModel model(ckpt.model, 0);
  RestoreModel(ckpt, model);
  return model;
}

}  // namespace corn
