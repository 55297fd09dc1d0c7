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

#include <vector>

#include <benchmark/benchmark.h>

#include "corn/degradations.h"
#include "corn/metrics.h"
#include "corn/model.h"
#include "corn/nn.h"
#include "corn/optimizer.h"
#include "corn/random.h"
#include "corn/synthesis.h"
#include "corn/toy_corpus.h"
#include "corn/trainer.h"

namespace corn {
namespace {

std::vector<double> Noise(std::size_t n, std::uint64_t seed, double scale = 0.1) {
  Rng rng(seed);
  std::vector<double> v(n);
  for (double& x : v) x = scale * StandardNormal(rng);
  return v;
}

// args: channels, length
void BM_Conv1dForward(benchmark::State& state) {
  const int channels = static_cast<int>(state.range(0));
  const int length = static_cast<int>(state.range(1));
  Rng rng(1);
  Conv1d conv("conv", channels, channels, 3, false, rng);
  FeatureMap x(8, channels, length);
  x.values() = Noise(x.size(), 2);
  for (auto _ : state) benchmark::DoNotOptimize(conv.Infer(x));
  state.SetItemsProcessed(state.iterations() * 8LL * channels * channels * 3 * length);
}
BENCHMARK(BM_Conv1dForward)->Args({26, 1000})->Args({51, 1000})->Args({128, 4000});

// args: width_scale x 100, excerpt samples
void BM_EncoderEmbed(benchmark::State& state) {
  ModelConfig mc;
  mc.width_scale = static_cast<double>(state.range(0)) / 100.0;
  const CornModel model(mc, 3);
  std::vector<Waveform> waves(8);
  std::vector<const Waveform*> batch;
  for (int i = 0; i < 8; ++i) {
    waves[i].samples = Noise(static_cast<std::size_t>(state.range(1)), 10 + i);
    batch.push_back(&waves[i]);
  }
  for (auto _ : state) benchmark::DoNotOptimize(model.Embed(batch));
  state.SetItemsProcessed(state.iterations() * 8);
}
BENCHMARK(BM_EncoderEmbed)->Args({10, 4000})->Args({10, 48000})->Unit(benchmark::kMillisecond);

void BM_SiSdr(benchmark::State& state) {
  const auto r = Noise(static_cast<std::size_t>(state.range(0)), 4);
  const auto x = Noise(static_cast<std::size_t>(state.range(0)), 5);
  for (auto _ : state) benchmark::DoNotOptimize(SiSdr(x, r));
  state.SetBytesProcessed(state.iterations() * state.range(0) * 2 * sizeof(double));
}
BENCHMARK(BM_SiSdr)->Arg(4000)->Arg(48000);

void BM_FreqMask(benchmark::State& state) {
  Waveform x;
  x.samples = Noise(static_cast<std::size_t>(state.range(0)), 6);
  for (auto _ : state) benchmark::DoNotOptimize(ApplyFreqMask(x, 800.0, 1600.0));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_FreqMask)->Arg(4000)->Arg(48000);

void BM_Reverb(benchmark::State& state) {
  Rng rng(7);
  Waveform x;
  x.samples = Noise(static_cast<std::size_t>(state.range(0)), 8);
  const Waveform rir = SynthesizeToyRir(rng, kWorkingSampleRate);
  for (auto _ : state) benchmark::DoNotOptimize(ApplyReverb(x, rir));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Reverb)->Arg(4000)->Arg(48000);

// One co-training step (forward, backward, Adam) on a batch of toy pairs.
// args: batch size
void BM_CoTrainStep(benchmark::State& state) {
  Rng rng(9);
  SourceBank bank;
  for (int i = 0; i < 3; ++i) {
    bank.Add(SourceKind::kClean, "clean_" + std::to_string(i), SynthesizeToySpeech(rng, 1.0, kWorkingSampleRate));
    bank.Add(SourceKind::kNoise, "noise_" + std::to_string(i), SynthesizeToyNoise(rng, 1.0, kWorkingSampleRate));
  }
  const PairSynthesizer synth(bank, SiSdrMetric(), SynthesisMode::kAdditiveOnly, {}, 0.25, 1);
  const auto pairs = synth.MakeRange(0, static_cast<std::size_t>(state.range(0)));
  std::vector<const TrainingPair*> ptrs;
  for (const auto& p : pairs) ptrs.push_back(&p);
  ModelConfig mc;
  mc.width_scale = 0.1;
  CornModel model(mc, 2);
  TrainConfig tc;
  tc.lr = 1e-3;
  Adam adam(AdamConfig{tc.lr});
  for (auto _ : state) benchmark::DoNotOptimize(CoTrainStep(model, adam, ptrs, tc));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_CoTrainStep)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace corn

// The packaged benchmark_main archive is LTO bytecode from another compiler
// release, so the entry point is defined here.
BENCHMARK_MAIN();
