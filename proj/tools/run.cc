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

#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "corn/error.h"
#include "corn_cli.h"

namespace corn::cli {
namespace {

// Options shared by the commands that take a run configuration.
struct ConfigFlags {
  std::string config_path;
  std::vector<std::string> sets;
  std::optional<std::string> mode;
  std::optional<int> epochs;
  std::optional<double> width_scale;
  std::optional<std::int64_t> seed;

  void Register(CLI::App* app) {
    app->add_option("-c,--config", config_path, "JSON config file merged onto the defaults");
    app->add_option("--set", sets, "Override a dotted key: --set train.lr=3e-4");
    app->add_option("--mode", mode, "Alias for train.mode (corn, fr_only, nr_only)");
    app->add_option("--epochs", epochs, "Alias for train.epochs");
    app->add_option("--width-scale", width_scale, "Alias for model.width_scale");
    app->add_option("--seed", seed, "Alias for seed");
    app->allow_extras();
  }

  // Builds the config: file, then --set, then --section.key extras, then aliases.
  RunConfig Build(const CLI::App* app) const {
    RunConfig config = config_path.empty() ? RunConfig() : RunConfig::FromFile(config_path);
    for (const std::string& s : sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + s + "'");
      config.Set(s.substr(0, eq), s.substr(eq + 1));
    }
    const std::vector<std::string> extras = app->remaining();
    for (std::size_t i = 0; i < extras.size(); ++i) {
      const std::string& tok = extras[i];
      if (tok.rfind("--", 0) != 0 || tok.find('.') == std::string::npos) {
        throw ConfigError("unrecognized argument '" + tok + "'");
      }
      const std::string body = tok.substr(2);
      const auto eq = body.find('=');
      if (eq != std::string::npos) {
        config.Set(body.substr(0, eq), body.substr(eq + 1));
      } else {
        if (i + 1 >= extras.size()) throw ConfigError("missing value for " + tok);
        config.Set(body, extras[++i]);
      }
    }
    if (mode) config.Set("train.mode", *mode);
    if (epochs) config.Set("train.epochs", std::to_string(*epochs));
    if (width_scale) config.Set("model.width_scale", nlohmann::json(*width_scale).dump());
    if (seed) config.Set("seed", std::to_string(*seed));
    config.Validate();
    return config;
  }
};

}  // namespace

int Run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Co-trained full- and no-reference speech quality assessment"};
  app.require_subcommand(1);

  // toy-corpus
  auto* toy = app.add_subcommand("toy-corpus", "Generate a synthetic clean/noise corpus with a manifest");
  std::string toy_out;
  ToyCorpusOptions toy_opts;
  toy->add_option("-o,--out", toy_out, "Output directory")->required();
  toy->add_option("--clean", toy_opts.n_clean, "Number of clean clips");
  toy->add_option("--noise", toy_opts.n_noise, "Number of noise clips");
  toy->add_option("--rir", toy_opts.n_rir, "Number of room impulse responses");
  toy->add_option("--seed", toy_opts.seed, "Generator seed");

  // synth
  auto* synth = app.add_subcommand("synth", "Materialize degraded/reference pairs with targets");
  ConfigFlags synth_flags;
  synth_flags.Register(synth);
  std::string synth_out;
  int synth_pairs = 100;
  bool synth_held_out = false;
  synth->add_option("-o,--out", synth_out, "Output directory")->required();
  synth->add_option("-n,--pairs", synth_pairs, "Number of pairs");
  synth->add_flag("--held-out", synth_held_out, "Draw from the held-out sources");

  // train
  auto* train = app.add_subcommand("train", "Train a model");
  ConfigFlags train_flags;
  train_flags.Register(train);
  std::string train_out;
  bool resume = false;
  train->add_option("-o,--out", train_out, "Run directory (checkpoint and loss curve)")->required();
  train->add_flag("--resume", resume, "Continue from the run directory's checkpoint");

  // eval
  auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint on the held-out sources");
  ConfigFlags eval_flags;
  eval_flags.Register(eval);
  std::string eval_ckpt, eval_report;
  eval->add_option("--checkpoint", eval_ckpt, "Checkpoint file")->required();
  eval->add_option("-o,--out", eval_report, "Report file (JSON)");

  // score
  auto* score = app.add_subcommand("score", "Score a recording (FR with --reference, NR without)");
  std::string score_ckpt, score_input, score_ref;
  score->add_option("--checkpoint", score_ckpt, "Checkpoint file")->required();
  score->add_option("input", score_input, "Recording to score")->required();
  score->add_option("-r,--reference", score_ref, "Clean reference recording");

  // embed
  auto* embed = app.add_subcommand("embed", "Print base-model embeddings as JSON lines");
  std::string embed_ckpt;
  std::vector<std::string> embed_inputs;
  embed->add_option("--checkpoint", embed_ckpt, "Checkpoint file")->required();
  embed->add_option("inputs", embed_inputs, "Audio files")->required();

  // retrieve
  auto* retrieve = app.add_subcommand("retrieve", "Nearest neighbours of a query in an embedding index");
  std::string ret_ckpt, ret_query, ret_index;
  int ret_k = 10;
  retrieve->add_option("--checkpoint", ret_ckpt, "Checkpoint file")->required();
  retrieve->add_option("--query", ret_query, "Query recording")->required();
  retrieve->add_option("--index", ret_index, "Output of `corn embed`")->required();
  retrieve->add_option("-k", ret_k, "Number of results");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*toy) {
      CmdToyCorpus(toy_out, toy_opts);
      out << "wrote " << toy_out << "/manifest.jsonl\n";
    } else if (*synth) {
      CmdSynth(synth_flags.Build(synth), synth_out, synth_pairs, synth_held_out);
      out << "wrote " << synth_pairs << " pairs to " << synth_out << '\n';
    } else if (*train) {
      const TrainState state = CmdTrain(train_flags.Build(train), train_out, resume, &out);
      out << "trained " << state.epoch << " epochs; checkpoint in " << train_out << '\n';
    } else if (*eval) {
      const EvalReport report = CmdEval(eval_flags.Build(eval), eval_ckpt, eval_report);
      out << nlohmann::json(report).dump(2) << '\n';
    } else if (*score) {
      const ScoreResult r = CmdScore(score_ckpt, score_input,
                                     score_ref.empty() ? std::nullopt : std::optional<std::filesystem::path>(score_ref));
      out << nlohmann::json{{"branch", r.branch}, {"metric", ToString(r.metric)}, {"score", r.score}}.dump() << '\n';
    } else if (*embed) {
      std::vector<std::filesystem::path> inputs(embed_inputs.begin(), embed_inputs.end());
      CmdEmbed(embed_ckpt, inputs, out);
    } else if (*retrieve) {
      for (const RetrievalHit& hit : CmdRetrieve(ret_ckpt, ret_query, ret_index, ret_k)) {
        out << nlohmann::json{{"path", hit.path}, {"similarity", hit.similarity}}.dump() << '\n';
      }
    }
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}

}  // namespace corn::cli
