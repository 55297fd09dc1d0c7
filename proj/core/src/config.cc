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

#include "corn/config.h"

#include <fstream>
#include <sstream>

#include "corn/error.h"

namespace corn {
namespace {

nlohmann::json BuildDefaults() {
  const DegradationSamplerConfig s;
  const TrainConfig t;
  const EvalConfig e;
  nlohmann::json d;
  d["seed"] = 0;
  d["audio"] = {{"sample_rate", kWorkingSampleRate}, {"excerpt_s", t.excerpt_s}};
  d["data"] = {{"manifest", ""}, {"holdout_fraction", 0.2}, {"synthesis", "full"}};
  d["degradation"] = {{"level_min_db", s.level_min_db},
                      {"level_max_db", s.level_max_db},
                      {"clip_min", s.clip_min},
                      {"clip_max", s.clip_max},
                      {"mask_min_width_hz", s.mask_min_width_hz},
                      {"mask_max_width_hz", s.mask_max_width_hz},
                      {"mulaw_mu", s.mulaw_mu},
                      {"mulaw_levels", s.mulaw_levels},
                      {"reverb_prob", s.reverb_prob},
                      {"weight_additive", s.additive_weight},
                      {"weight_clip", s.clip_weight},
                      {"weight_freq_mask", s.freq_mask_weight},
                      {"weight_mulaw", s.mulaw_weight},
                      {"weight_gaussian", s.gaussian_weight}};
  d["model"] = ModelConfig{};
  d["train"] = {{"mode", ToString(t.mode)},
                {"target_metric", ToString(t.target_metric)},
                {"lr", t.lr},
                {"batch_size", t.batch_size},
                {"epochs", t.epochs},
                {"pairs_per_epoch", t.pairs_per_epoch},
                {"beta", t.beta},
                {"w_fr", t.w_fr},
                {"w_nr", t.w_nr},
                {"checkpoint_every", t.checkpoint_every}};
  d["eval"] = {{"test_pairs", e.test_pairs},
               {"unseen", e.unseen},
               {"content_pairs", e.content.pairs_per_group},
               {"content_level_min_db", e.content.level_min_db},
               {"content_level_max_db", e.content.level_max_db},
               {"small_shift_db", e.small_shift.level_db},
               {"small_shift_pairs", e.small_shift.pairs},
               {"retrieval_levels", e.retrieval.levels},
               {"retrieval_level_min_db", e.retrieval.level_min_db},
               {"retrieval_level_max_db", e.retrieval.level_max_db},
               {"retrieval_per_level", e.retrieval.per_level},
               {"retrieval_k", e.retrieval.k},
               {"retrieval_queries", e.retrieval.queries}};
  d["pesq"] = {{"command", ""}, {"cache", ""}};
  return d;
}

bool SameType(const nlohmann::json& def, const nlohmann::json& value) {
  if (def.is_number_integer()) return value.is_number_integer();
  if (def.is_number()) return value.is_number();
  if (def.is_array()) {
    if (!value.is_array()) return false;
    for (const auto& v : value) {
      if (!def.empty() && !SameType(def.front(), v)) return false;
    }
    return true;
  }
  return def.type() == value.type();
}

void MergeInto(nlohmann::json& doc, const nlohmann::json& defaults, const nlohmann::json& overrides,
               const std::string& prefix) {
  if (!overrides.is_object()) throw ConfigError("config section '" + prefix + "' must be an object");
  for (const auto& [key, value] : overrides.items()) {
    const std::string name = prefix.empty() ? key : prefix + "." + key;
    if (!defaults.contains(key)) throw ConfigError("unknown config key '" + name + "'");
    const nlohmann::json& def = defaults.at(key);
    if (def.is_object()) {
      MergeInto(doc[key], def, value, name);
    } else if (!SameType(def, value)) {
      throw ConfigError("config key '" + name + "' expects " + std::string(def.type_name()) +
                        ", got " + value.dump());
    } else {
      doc[key] = value;
    }
  }
}

template <typename T>
T Get(const nlohmann::json& doc, const char* section, const char* key) {
  return doc.at(section).at(key).get<T>();
}

}  // namespace

const nlohmann::json& RunConfig::Defaults() {
  static const nlohmann::json defaults = BuildDefaults();
  return defaults;
}

RunConfig::RunConfig() : doc_(Defaults()) {}

RunConfig RunConfig::FromJson(const nlohmann::json& overrides) {
  RunConfig c;
  c.Merge(overrides);
  return c;
}

RunConfig RunConfig::FromFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  try {
    return FromJson(nlohmann::json::parse(in, nullptr, true, true));
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("cannot parse " + path.string() + ": " + e.what());
  }
}

void RunConfig::Merge(const nlohmann::json& overrides) { MergeInto(doc_, Defaults(), overrides, ""); }

bool RunConfig::HasKey(std::string_view dotted_key) const {
  const nlohmann::json* node = &Defaults();
  std::stringstream ss{std::string(dotted_key)};
  std::string part;
  while (std::getline(ss, part, '.')) {
    if (!node->is_object() || !node->contains(part)) return false;
    node = &node->at(part);
  }
  return !node->is_object();
}

void RunConfig::Set(std::string_view dotted_key, std::string_view value) {
  if (!HasKey(dotted_key)) throw ConfigError("unknown config key '" + std::string(dotted_key) + "'");
  nlohmann::json parsed;
  try {
    parsed = nlohmann::json::parse(value);
  } catch (const nlohmann::json::parse_error&) {
    parsed = std::string(value);
  }
  // Build {"a": {"b": value}} and merge, so type checks apply uniformly.
  std::vector<std::string> parts;
  std::stringstream ss{std::string(dotted_key)};
  for (std::string part; std::getline(ss, part, '.');) parts.push_back(part);
  nlohmann::json patch = parsed;
  for (auto it = parts.rbegin(); it != parts.rend(); ++it) patch = nlohmann::json{{*it, patch}};
  // A string default given something that parsed as another type ("1e3",
  // "true") is still a string.
  const nlohmann::json* def = &Defaults();
  for (const auto& p : parts) def = &def->at(p);
  if (def->is_string() && !parsed.is_string()) {
    patch = std::string(value);
    for (auto it = parts.rbegin(); it != parts.rend(); ++it) patch = nlohmann::json{{*it, patch}};
  }
  Merge(patch);
}

std::uint64_t RunConfig::seed() const {
  if (!doc_.at("seed").is_number_integer() || doc_.at("seed").get<std::int64_t>() < 0) {
    throw ConfigError("seed must be a non-negative integer");
  }
  return doc_.at("seed").get<std::uint64_t>();
}

int RunConfig::sample_rate() const { return Get<int>(doc_, "audio", "sample_rate"); }
double RunConfig::excerpt_s() const { return Get<double>(doc_, "audio", "excerpt_s"); }
std::string RunConfig::manifest_path() const { return Get<std::string>(doc_, "data", "manifest"); }
double RunConfig::holdout_fraction() const { return Get<double>(doc_, "data", "holdout_fraction"); }

SynthesisMode RunConfig::synthesis() const {
  const SynthesisMode mode = ParseSynthesisMode(Get<std::string>(doc_, "data", "synthesis"));
  // SNR only labels linear (additive) degradations meaningfully.
  if (ParseMetricKind(Get<std::string>(doc_, "train", "target_metric")) == MetricKind::kSnr) {
    return SynthesisMode::kAdditiveOnly;
  }
  return mode;
}

DegradationSamplerConfig RunConfig::sampler() const {
  const auto& d = doc_.at("degradation");
  DegradationSamplerConfig s;
  s.level_min_db = d.at("level_min_db");
  s.level_max_db = d.at("level_max_db");
  s.clip_min = d.at("clip_min");
  s.clip_max = d.at("clip_max");
  s.mask_min_width_hz = d.at("mask_min_width_hz");
  s.mask_max_width_hz = d.at("mask_max_width_hz");
  s.mulaw_mu = d.at("mulaw_mu");
  s.mulaw_levels = d.at("mulaw_levels").get<std::vector<int>>();
  s.reverb_prob = d.at("reverb_prob");
  s.additive_weight = d.at("weight_additive");
  s.clip_weight = d.at("weight_clip");
  s.freq_mask_weight = d.at("weight_freq_mask");
  s.mulaw_weight = d.at("weight_mulaw");
  s.gaussian_weight = d.at("weight_gaussian");
  return s;
}

ModelConfig RunConfig::model() const { return doc_.at("model").get<ModelConfig>(); }

TrainConfig RunConfig::train() const {
  const auto& t = doc_.at("train");
  TrainConfig c;
  c.mode = ParseTrainMode(t.at("mode").get<std::string>());
  c.target_metric = ParseMetricKind(t.at("target_metric").get<std::string>());
  c.lr = t.at("lr");
  c.batch_size = t.at("batch_size");
  c.epochs = t.at("epochs");
  c.pairs_per_epoch = t.at("pairs_per_epoch");
  c.beta = t.at("beta");
  c.w_fr = t.at("w_fr");
  c.w_nr = t.at("w_nr");
  c.checkpoint_every = t.at("checkpoint_every");
  c.seed = seed();
  c.excerpt_s = excerpt_s();
  return c;
}

EvalConfig RunConfig::eval() const {
  const auto& e = doc_.at("eval");
  EvalConfig c;
  c.test_pairs = e.at("test_pairs");
  c.unseen = e.at("unseen");
  c.excerpt_s = excerpt_s();
  c.synthesis = synthesis();
  c.sampler = sampler();
  c.content.pairs_per_group = e.at("content_pairs");
  c.content.level_min_db = e.at("content_level_min_db");
  c.content.level_max_db = e.at("content_level_max_db");
  c.content.excerpt_s = c.excerpt_s;
  c.small_shift.level_db = e.at("small_shift_db");
  c.small_shift.pairs = e.at("small_shift_pairs");
  c.small_shift.excerpt_s = c.excerpt_s;
  c.retrieval.levels = e.at("retrieval_levels");
  c.retrieval.level_min_db = e.at("retrieval_level_min_db");
  c.retrieval.level_max_db = e.at("retrieval_level_max_db");
  c.retrieval.per_level = e.at("retrieval_per_level");
  c.retrieval.k = e.at("retrieval_k");
  c.retrieval.queries = e.at("retrieval_queries");
  c.retrieval.excerpt_s = c.excerpt_s;
  return c;
}

PesqOptions RunConfig::pesq() const {
  PesqOptions p;
  p.command = Get<std::string>(doc_, "pesq", "command");
  p.cache_path = Get<std::string>(doc_, "pesq", "cache");
  p.sample_rate = sample_rate();
  return p;
}

void RunConfig::Validate() const {
  seed();
  if (sample_rate() != kWorkingSampleRate) {
    throw ConfigError("audio.sample_rate must be " + std::to_string(kWorkingSampleRate));
  }
  if (!(excerpt_s() > 0.0)) throw ConfigError("audio.excerpt_s must be > 0");
  const double h = holdout_fraction();
  if (!(h >= 0.0 && h < 1.0)) throw ConfigError("data.holdout_fraction must lie in [0, 1)");
  synthesis();
  const DegradationSamplerConfig s = sampler();
  if (!(s.level_min_db <= s.level_max_db)) throw ConfigError("degradation level range is empty");
  if (!(s.clip_min > 0.0 && s.clip_min <= s.clip_max && s.clip_max <= 1.0)) {
    throw ConfigError("degradation clip range must satisfy 0 < clip_min <= clip_max <= 1");
  }
  if (!(s.mask_min_width_hz > 0.0 && s.mask_min_width_hz <= s.mask_max_width_hz)) {
    throw ConfigError("degradation mask width range is invalid");
  }
  if (!(s.mulaw_mu > 0.0) || s.mulaw_levels.empty()) throw ConfigError("degradation mu-law settings are invalid");
  for (int l : s.mulaw_levels) {
    if (l < 2) throw ConfigError("degradation.mulaw_levels entries must be >= 2");
  }
  if (!(s.reverb_prob >= 0.0 && s.reverb_prob <= 1.0)) throw ConfigError("degradation.reverb_prob must lie in [0, 1]");
  for (double w : {s.additive_weight, s.clip_weight, s.freq_mask_weight, s.mulaw_weight, s.gaussian_weight}) {
    if (!(w >= 0.0)) throw ConfigError("degradation weights must be >= 0");
  }
  model().Validate();
  train().Validate();
  const EvalConfig e = eval();
  if (e.test_pairs < 2 || e.content.pairs_per_group < 2 || e.small_shift.pairs < 1) {
    throw ConfigError("eval pair counts are too small");
  }
  if (e.retrieval.levels < 1 || e.retrieval.per_level < e.retrieval.k || e.retrieval.k < 1) {
    throw ConfigError("eval.retrieval_per_level must be >= eval.retrieval_k >= 1");
  }
}

TargetMetric MakeTargetMetric(const RunConfig& config, std::shared_ptr<PesqAdapter> pesq) {
  switch (config.train().target_metric) {
    case MetricKind::kSiSdr: return SiSdrMetric();
    case MetricKind::kSnr: return SnrMetric();
    case MetricKind::kPesq: {
      if (!pesq) pesq = std::make_shared<PesqAdapter>(config.pesq());
      if (!pesq->configured()) throw ConfigError("target_metric pesq needs pesq.command");
      return PesqMetric(std::move(pesq));
    }
  }
  throw ConfigError("unknown target metric");
}

}  // namespace corn
