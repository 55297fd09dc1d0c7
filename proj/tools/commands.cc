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

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <nlohmann/json.hpp>

#include "corn/checkpoint.h"
#include "corn/error.h"
#include "corn_cli.h"

namespace corn::cli {
namespace {

namespace fs = std::filesystem;

constexpr char kCheckpointFile[] = "checkpoint.bin";
constexpr char kCurveFile[] = "loss_curve.jsonl";
constexpr char kPairsFile[] = "pairs.jsonl";

std::string IndexName(int i) {
  std::ostringstream s;
  s << std::setw(6) << std::setfill('0') << i << ".wav";
  return s.str();
}

void EnsureDir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
}

std::ofstream OpenOut(const fs::path& path, std::ios::openmode mode = std::ios::trunc) {
  std::ofstream out(path, std::ios::out | mode);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  return out;
}

// Rounds to the float32 grid the WAV files store.
void RoundToFloat(Waveform& w) {
  for (double& v : w.samples) v = static_cast<double>(static_cast<float>(v));
}

MetricKind CheckpointMetric(const Checkpoint& ckpt) {
  return ParseMetricKind(ckpt.state.value("target_metric", "si_sdr"));
}

Waveform LoadInput(const fs::path& path) {
  if (!fs::exists(path)) throw IoError("no such audio file: " + path.string());
  return LoadAudio(path);
}

}  // namespace

Banks LoadBanks(const RunConfig& config) {
  const std::string path = config.manifest_path();
  if (path.empty()) throw ConfigError("data.manifest is not set");
  if (!fs::exists(path)) throw ConfigError("manifest not found: " + path);
  const ManifestSplit split = SplitManifest(ReadManifest(path), config.holdout_fraction());
  return Banks{SourceBank::Load(split.train, config.sample_rate()),
               SourceBank::Load(split.held_out, config.sample_rate())};
}

void CmdToyCorpus(const fs::path& out_dir, const ToyCorpusOptions& options) {
  EnsureDir(out_dir);
  GenerateToyCorpus(out_dir, options);
}

void CmdSynth(const RunConfig& config, const fs::path& out_dir, int count, bool held_out) {
  config.Validate();
  if (count < 0) throw ConfigError("pair count must be >= 0");
  const Banks banks = LoadBanks(config);
  const SourceBank& bank = held_out ? banks.held_out : banks.train;
  const TargetMetric metric = MakeTargetMetric(config);
  const PairSynthesizer pairs(bank, metric, config.synthesis(), config.sampler(), config.excerpt_s(),
                              config.seed(), held_out ? RngStream::kHeldOutPairs : RngStream::kTrainPairs);
  EnsureDir(out_dir / "degraded");
  EnsureDir(out_dir / "reference");
  std::ofstream manifest = OpenOut(out_dir / kPairsFile);
  manifest << nlohmann::json{{"config", config.json()},
                             {"split", held_out ? "held_out" : "train"},
                             {"count", count}}
                  .dump()
           << '\n';
  for (int i = 0; i < count; ++i) {
    TrainingPair pair = pairs.Make(static_cast<std::uint64_t>(i));
    RoundToFloat(pair.degraded);
    RoundToFloat(pair.reference);
    pair.target = metric(pair.degraded.samples, pair.reference.samples);
    const std::string name = IndexName(i);
    WriteWav(out_dir / "degraded" / name, pair.degraded, SampleFormat::kFloat32);
    WriteWav(out_dir / "reference" / name, pair.reference, SampleFormat::kFloat32);
    manifest << nlohmann::json{{"index", i},
                               {"degraded", "degraded/" + name},
                               {"reference", "reference/" + name},
                               {"target", pair.target.value},
                               {"metric", ToString(pair.target.kind)},
                               {"spec", pair.spec},
                               {"clean_id", pair.clean_id},
                               {"clean_offset_s", pair.clean_offset_s}}
                    .dump()
             << '\n';
  }
  if (!manifest) throw IoError("failed writing " + (out_dir / kPairsFile).string());
}

TrainState CmdTrain(const RunConfig& config, const fs::path& out_dir, bool resume, std::ostream* log) {
  config.Validate();
  const TrainConfig tc = config.train();
  const ModelConfig mc = config.model();
  const Banks banks = LoadBanks(config);
  const TargetMetric metric = MakeTargetMetric(config);
  const PairSynthesizer pairs(banks.train, metric, config.synthesis(), config.sampler(), tc.excerpt_s,
                              tc.seed, RngStream::kTrainPairs);
  EnsureDir(out_dir);
  const fs::path ckpt_path = out_dir / kCheckpointFile;
  const fs::path curve_path = out_dir / kCurveFile;

  TrainState state = resume && fs::exists(ckpt_path) ? LoadTrainState(ckpt_path, mc, tc)
                                                     : InitTrainState(mc, tc);
  {
    std::ofstream curve = OpenOut(curve_path);
    for (const EpochRecord& r : state.history) curve << nlohmann::json(r).dump() << '\n';
  }
  std::ofstream curve = OpenOut(curve_path, std::ios::app);
  const nlohmann::json echo = config.json();
  TrainHooks hooks;
  hooks.checkpoint_path = ckpt_path;
  hooks.run_echo = &echo;
  hooks.on_epoch = [&](const TrainState&, const EpochRecord& r) {
    curve << nlohmann::json(r).dump() << '\n';
    curve.flush();
    if (log && (r.epoch == 1 || r.epoch % 10 == 0 || r.epoch == tc.epochs)) {
      *log << "epoch " << r.epoch << "  loss " << r.loss_total << '\n';
    }
  };
  Train(state, pairs, tc, hooks);
  SaveTrainState(ckpt_path, state, tc, &echo);
  return state;
}

EvalReport CmdEval(const RunConfig& config, const fs::path& checkpoint, const fs::path& report_path) {
  config.Validate();
  const Checkpoint ckpt = ReadCheckpoint(checkpoint);
  const CornModel model = LoadModel(ckpt);
  const Banks banks = LoadBanks(config);
  AssertDisjointSources(banks.train, banks.held_out);

  RunConfig eval_config = config;
  eval_config.Set("train.target_metric", std::string(ToString(CheckpointMetric(ckpt))));
  const TargetMetric metric = MakeTargetMetric(eval_config);
  const CornQualityModel qm(model);
  EvalReport report = RunEvaluation(qm, banks.held_out, metric, config.eval(), config.seed());
  report.model_id = ckpt.state.value("mode", "unknown") + "@epoch" + std::to_string(ckpt.state.value("epoch", 0));
  report.dataset_id = config.manifest_path() + "#held_out";

  if (!report_path.empty()) {
    if (report_path.has_parent_path()) EnsureDir(report_path.parent_path());
    nlohmann::json doc = report;
    doc["config"] = config.json();
    doc["checkpoint_run"] = ckpt.run;
    std::ofstream out = OpenOut(report_path);
    out << doc.dump(2) << '\n';
    if (!out) throw IoError("failed writing " + report_path.string());
  }
  return report;
}

ScoreResult CmdScore(const fs::path& checkpoint, const fs::path& input,
                     const std::optional<fs::path>& reference) {
  const Checkpoint ckpt = ReadCheckpoint(checkpoint);
  const CornModel model = LoadModel(ckpt);
  const Waveform x = LoadInput(input);
  ScoreResult result;
  result.metric = CheckpointMetric(ckpt);
  if (reference) {
    result.branch = "fr";
    result.score = model.ScoreFr(x, LoadInput(*reference));
  } else {
    result.branch = "nr";
    result.score = model.ScoreNr(x);
  }
  return result;
}

void CmdEmbed(const fs::path& checkpoint, const std::vector<fs::path>& inputs, std::ostream& out) {
  const CornModel model = LoadModel(ReadCheckpoint(checkpoint));
  for (const fs::path& p : inputs) {
    const Eigen::VectorXd e = model.Embed(LoadInput(p));
    out << nlohmann::json{{"path", p.string()}, {"embedding", std::vector<double>(e.data(), e.data() + e.size())}}
               .dump()
        << '\n';
  }
}

std::vector<RetrievalHit> CmdRetrieve(const fs::path& checkpoint, const fs::path& query,
                                      const fs::path& index, int k) {
  if (k < 1) throw ConfigError("k must be >= 1");
  const CornModel model = LoadModel(ReadCheckpoint(checkpoint));
  const Eigen::VectorXd q = model.Embed(LoadInput(query));
  std::ifstream in(index);
  if (!in) throw IoError("cannot open index " + index.string());
  std::vector<RetrievalHit> hits;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto row = nlohmann::json::parse(line);
    const auto values = row.at("embedding").get<std::vector<double>>();
    if (static_cast<Eigen::Index>(values.size()) != q.size()) {
      throw FormatError("index embedding dimension differs from the model's");
    }
    const Eigen::Map<const Eigen::VectorXd> e(values.data(), q.size());
    hits.push_back({row.at("path").get<std::string>(), CosineSimilarity(q, e)});
  }
  std::stable_sort(hits.begin(), hits.end(),
                   [](const RetrievalHit& a, const RetrievalHit& b) { return a.similarity > b.similarity; });
  if (hits.size() > static_cast<std::size_t>(k)) hits.resize(k);
  return hits;
}

}  // namespace corn::cli
