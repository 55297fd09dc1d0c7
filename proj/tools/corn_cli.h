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

// Subcommands of the `corn` tool, callable in-process.

#ifndef CORN_TOOLS_CORN_CLI_H_
#define CORN_TOOLS_CORN_CLI_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "corn/config.h"
#include "corn/evaluation.h"
#include "corn/toy_corpus.h"

namespace corn::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitRuntime = 2,
  kExitNumerical = 3,
};

// Parses argv and dispatches; never throws. Messages go to `out`/`err`.
int Run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// Splits data.manifest into (train, held-out) banks.
struct Banks {
  SourceBank train;
  SourceBank held_out;
};
Banks LoadBanks(const RunConfig& config);

void CmdToyCorpus(const std::filesystem::path& out_dir, const ToyCorpusOptions& options);

// Materializes `count` pairs from the train (or held-out) split under
// out_dir: degraded/NNNNNN.wav, reference/NNNNNN.wav and pairs.jsonl. The
// first pairs.jsonl line is a header carrying the config echo. Stored
// targets are computed on the float32 samples actually written.
void CmdSynth(const RunConfig& config, const std::filesystem::path& out_dir, int count,
              bool held_out = false);

// Trains and writes out_dir/checkpoint.bin and out_dir/loss_curve.jsonl.
// With resume, continues from an existing out_dir/checkpoint.bin.
TrainState CmdTrain(const RunConfig& config, const std::filesystem::path& out_dir, bool resume = false,
                    std::ostream* log = nullptr);

// Evaluates on the held-out split and writes the report (with config echo)
// to report_path when it is non-empty.
EvalReport CmdEval(const RunConfig& config, const std::filesystem::path& checkpoint,
                   const std::filesystem::path& report_path);

struct ScoreResult {
  std::string branch;  // "fr" or "nr"
  MetricKind metric = MetricKind::kSiSdr;
  double score = 0.0;
};
ScoreResult CmdScore(const std::filesystem::path& checkpoint, const std::filesystem::path& input,
                     const std::optional<std::filesystem::path>& reference);

// One {"path", "embedding"} JSON line per input.
void CmdEmbed(const std::filesystem::path& checkpoint, const std::vector<std::filesystem::path>& inputs,
              std::ostream& out);

struct RetrievalHit {
  std::string path;
  double similarity = 0.0;
};
// Ranks the entries of an embedding index (CmdEmbed output) by cosine
// similarity to the query's embedding.
std::vector<RetrievalHit> CmdRetrieve(const std::filesystem::path& checkpoint,
                                      const std::filesystem::path& query,
                                      const std::filesystem::path& index, int k);

}  // namespace corn::cli

#endif  // CORN_TOOLS_CORN_CLI_H_
