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

#include <fstream>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "corn/audio.h"
#include "corn/metrics.h"
#include "corn_cli.h"
#include "test_util.h"

namespace corn::cli {
namespace {

using ::corn::testing::ReadFile;
using ::corn::testing::TempDir;
namespace fs = std::filesystem;

struct Invocation {
  int code = 0;
  std::string out;
  std::string err;
};

Invocation Corn(std::vector<std::string> args) {
  args.insert(args.begin(), "corn");
  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Invocation r;
  r.code = Run(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::vector<nlohmann::json> ReadJsonLines(const fs::path& path) {
  std::ifstream in(path);
  std::vector<nlohmann::json> rows;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty()) rows.push_back(nlohmann::json::parse(line));
  }
  return rows;
}

class CliTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = std::make_unique<TempDir>("cli");
    const Invocation toy = Corn({"toy-corpus", "-o", (dir_->path() / "corpus").string(), "--clean", "6",
                                 "--noise", "6", "--seed", "3"});
    ASSERT_EQ(toy.code, 0) << toy.err;
    const nlohmann::json config = {
        {"seed", 1},
        {"audio", {{"excerpt_s", 0.1}}},
        {"data", {{"manifest", (dir_->path() / "corpus" / "manifest.jsonl").string()},
                  {"holdout_fraction", 0.34},
                  {"synthesis", "additive_only"}}},
        {"model", {{"width_scale", 0.05}}},
        {"train", {{"batch_size", 4}, {"pairs_per_epoch", 8}, {"epochs", 2}, {"lr", 1e-3}}},
        {"eval", {{"test_pairs", 20},
                  {"content_pairs", 6},
                  {"small_shift_pairs", 4},
                  {"retrieval_per_level", 10},
                  {"retrieval_queries", 30}}}};
    std::ofstream(dir_->path() / "config.json") << config.dump(2);
  }
  static void TearDownTestSuite() { dir_.reset(); }

  static std::string Config() { return (dir_->path() / "config.json").string(); }
  static fs::path Root() { return dir_->path(); }

  static std::unique_ptr<TempDir> dir_;
};

std::unique_ptr<TempDir> CliTest::dir_;

TEST_F(CliTest, SynthWritesRecomputableTargets) {
  TempDir out("synth");
  const Invocation r = Corn({"synth", "-c", Config(), "-o", out.path().string(), "-n", "100"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = ReadJsonLines(out / "pairs.jsonl");
  ASSERT_EQ(rows.size(), 101u);
  EXPECT_EQ(rows[0].at("count"), 100);
  EXPECT_EQ(rows[0].at("split"), "train");
  EXPECT_EQ(rows[0].at("config").at("seed"), 1);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& row = rows[i];
    EXPECT_EQ(row.at("spec").at("kind"), "additive_noise");
    const Waveform x = LoadAudio(out / row.at("degraded").get<std::string>());
    const Waveform ref = LoadAudio(out / row.at("reference").get<std::string>());
    EXPECT_NEAR(SiSdr(x.samples, ref.samples).value, row.at("target").get<double>(), 1e-6);
    EXPECT_EQ(row.at("metric"), "si_sdr");
  }
}

TEST_F(CliTest, SynthIsDeterministic) {
  TempDir a("synth"), b("synth"), c("synth");
  ASSERT_EQ(Corn({"synth", "-c", Config(), "-o", a.path().string(), "-n", "10"}).code, 0);
  ASSERT_EQ(Corn({"synth", "-c", Config(), "-o", b.path().string(), "-n", "10"}).code, 0);
  ASSERT_EQ(Corn({"synth", "-c", Config(), "-o", c.path().string(), "-n", "10", "--seed", "2"}).code, 0);
  EXPECT_EQ(ReadFile(a / "pairs.jsonl"), ReadFile(b / "pairs.jsonl"));
  EXPECT_EQ(ReadFile(a / "degraded/000007.wav"), ReadFile(b / "degraded/000007.wav"));
  EXPECT_NE(ReadFile(a / "degraded/000007.wav"), ReadFile(c / "degraded/000007.wav"));
}

TEST_F(CliTest, SynthFullModeMixesKinds) {
  TempDir out("synth");
  ASSERT_EQ(Corn({"synth", "-c", Config(), "-o", out.path().string(), "-n", "40", "--set",
                  "data.synthesis=full", "--held-out"})
                .code,
            0);
  const auto rows = ReadJsonLines(out / "pairs.jsonl");
  EXPECT_EQ(rows[0].at("split"), "held_out");
  std::set<std::string> kinds;
  for (std::size_t i = 1; i < rows.size(); ++i) kinds.insert(rows[i].at("spec").at("kind").get<std::string>());
  EXPECT_GE(kinds.size(), 2u);
}

TEST_F(CliTest, TrainEvalScoreEmbedRetrieve) {
  TempDir run("train");
  const Invocation t = Corn({"train", "-c", Config(), "-o", run.path().string()});
  ASSERT_EQ(t.code, 0) << t.err;
  const auto curve = ReadJsonLines(run / "loss_curve.jsonl");
  ASSERT_EQ(curve.size(), 2u);
  EXPECT_EQ(curve[1].at("epoch"), 2);
  EXPECT_TRUE(curve[1].at("loss_fr").is_number());
  const std::string ckpt = (run / "checkpoint.bin").string();

  const fs::path report = run / "report.json";
  const Invocation e = Corn({"eval", "-c", Config(), "--checkpoint", ckpt, "-o", report.string()});
  ASSERT_EQ(e.code, 0) << e.err;
  const nlohmann::json rep = nlohmann::json::parse(ReadFile(report));
  for (const char* key : {"mse_fr", "mse_nr", "overlap_content", "mp_at_k", "config", "checkpoint_run"}) {
    EXPECT_TRUE(rep.contains(key)) << key;
  }
  EXPECT_EQ(rep.at("metadata").at("model_id"), "corn@epoch2");

  const std::string clip = (Root() / "corpus" / "clean" / "clean_0000.wav").string();
  const std::string noisy = (Root() / "corpus" / "noise" / "noise_0000.wav").string();
  const Invocation nr = Corn({"score", "--checkpoint", ckpt, noisy});
  ASSERT_EQ(nr.code, 0) << nr.err;
  EXPECT_EQ(nlohmann::json::parse(nr.out).at("branch"), "nr");
  const Invocation fr = Corn({"score", "--checkpoint", ckpt, noisy, "--reference", noisy});
  ASSERT_EQ(fr.code, 0) << fr.err;
  EXPECT_EQ(nlohmann::json::parse(fr.out).at("branch"), "fr");
  EXPECT_EQ(nlohmann::json::parse(fr.out).at("metric"), "si_sdr");

  const Invocation emb = Corn({"embed", "--checkpoint", ckpt, clip, noisy});
  ASSERT_EQ(emb.code, 0) << emb.err;
  std::ofstream(run / "index.jsonl") << emb.out;
  const Invocation ret = Corn({"retrieve", "--checkpoint", ckpt, "--query", noisy, "--index",
                               (run / "index.jsonl").string(), "-k", "1"});
  ASSERT_EQ(ret.code, 0) << ret.err;
  const nlohmann::json hit = nlohmann::json::parse(ret.out);
  EXPECT_EQ(hit.at("path"), noisy);
  EXPECT_NEAR(hit.at("similarity").get<double>(), 1.0, 1e-12);
}

TEST_F(CliTest, TrainAndEvalAreDeterministic) {
  TempDir a("train"), b("train");
  ASSERT_EQ(Corn({"train", "-c", Config(), "-o", a.path().string()}).code, 0);
  ASSERT_EQ(Corn({"train", "-c", Config(), "-o", b.path().string()}).code, 0);
  EXPECT_EQ(ReadFile(a / "loss_curve.jsonl"), ReadFile(b / "loss_curve.jsonl"));
  EXPECT_EQ(ReadFile(a / "checkpoint.bin"), ReadFile(b / "checkpoint.bin"));
  ASSERT_EQ(Corn({"eval", "-c", Config(), "--checkpoint", (a / "checkpoint.bin").string(), "-o",
                  (a / "r.json").string()})
                .code,
            0);
  ASSERT_EQ(Corn({"eval", "-c", Config(), "--checkpoint", (b / "checkpoint.bin").string(), "-o",
                  (b / "r.json").string()})
                .code,
            0);
  EXPECT_EQ(ReadFile(a / "r.json"), ReadFile(b / "r.json"));
}

TEST_F(CliTest, ResumeExtendsTheCurve) {
  TempDir full("train"), part("train");
  ASSERT_EQ(Corn({"train", "-c", Config(), "-o", full.path().string(), "--mode", "nr_only"}).code, 0);
  ASSERT_EQ(Corn({"train", "-c", Config(), "-o", part.path().string(), "--mode", "nr_only", "--epochs", "1"}).code, 0);
  ASSERT_EQ(Corn({"train", "-c", Config(), "-o", part.path().string(), "--mode", "nr_only", "--resume"}).code, 0);
  EXPECT_EQ(ReadFile(full / "loss_curve.jsonl"), ReadFile(part / "loss_curve.jsonl"));
  const auto curve = ReadJsonLines(full / "loss_curve.jsonl");
  EXPECT_TRUE(curve[0].at("loss_fr").is_null());
}

TEST_F(CliTest, ZeroEpochsGivesEmptyCurve) {
  TempDir run("train");
  ASSERT_EQ(Corn({"train", "-c", Config(), "-o", run.path().string(), "--train.epochs", "0"}).code, 0);
  EXPECT_TRUE(ReadJsonLines(run / "loss_curve.jsonl").empty());
  EXPECT_TRUE(fs::exists(run / "checkpoint.bin"));
}

TEST_F(CliTest, UsageErrorsExitWithOne) {
  TempDir out("err");
  EXPECT_EQ(Corn({"synth", "-o", out.path().string()}).code, kExitUsage);  // no manifest
  EXPECT_EQ(Corn({"synth", "-c", Config(), "-o", out.path().string(), "--set", "data.manifest=/nope.jsonl"}).code,
            kExitUsage);
  EXPECT_EQ(Corn({"train", "-c", Config(), "-o", out.path().string(), "--set", "train.bogus=1"}).code, kExitUsage);
  EXPECT_EQ(Corn({"train", "-c", Config(), "-o", out.path().string(), "--mode", "both"}).code, kExitUsage);
  EXPECT_EQ(Corn({"train", "-c", Config(), "-o", out.path().string(), "--stray"}).code, kExitUsage);
  EXPECT_EQ(Corn({"frobnicate"}).code, kExitUsage);
  EXPECT_EQ(Corn({}).code, kExitUsage);
  const Invocation missing_ckpt = Corn({"score", "--checkpoint", (out / "none.bin").string(), Config()});
  EXPECT_EQ(missing_ckpt.code, kExitRuntime);
  EXPECT_FALSE(missing_ckpt.err.empty());
}

}  // namespace
}  // namespace corn::cli
