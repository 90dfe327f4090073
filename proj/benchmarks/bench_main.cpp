/* Copyright 2026 The Storylens Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include <random>
#include <string>
#include <vector>

#include "benchmark/benchmark.h"
#include "storylens/corpus.hpp"
#include "storylens/fidelity.hpp"
#include "storylens/reward.hpp"
#include "storylens/satisfaction.hpp"

namespace {

using namespace storylens;

std::string sample_chapter(int sentences) {
  std::string text;
  for (int i = 0; i < sentences; ++i)
    text += "Mr. Holmes examined the evidence carefully before he spoke again. ";
  return text;
}

void BM_SegmentSentences(benchmark::State& state) {
  const std::string text = sample_chapter(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto sentences = corpus::segment_sentences(text);
    benchmark::DoNotOptimize(sentences);
  }
  state.SetBytesProcessed(state.iterations() * static_cast<int64_t>(text.size()));
}
BENCHMARK(BM_SegmentSentences)->Arg(16)->Arg(128)->Arg(1024);

void BM_GreedyAssign(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  std::vector<std::vector<double>> sim(n, std::vector<double>(n));
  for (auto& row : sim)
    for (auto& v : row) v = uniform(rng);
  for (auto _ : state) {
    auto assignment = fidelity::greedy_assign(sim);
    benchmark::DoNotOptimize(assignment);
  }
}
BENCHMARK(BM_GreedyAssign)->Arg(8)->Arg(32)->Arg(128);

std::vector<satisfaction::TrainingPair> synthetic_pairs(std::size_t count,
                                                        std::size_t dim) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<satisfaction::TrainingPair> pairs;
  const pairs::Difficulty bins[] = {pairs::Difficulty::Easy, pairs::Difficulty::Medium,
                                    pairs::Difficulty::Hard};
  for (std::size_t i = 0; i < count; ++i) {
    satisfaction::TrainingPair p;
    p.difficulty = bins[i % 3];
    p.winner.values.resize(dim);
    p.loser.values.resize(dim);
    for (auto& v : p.winner.values) v = normal(rng);
    for (auto& v : p.loser.values) v = normal(rng);
    pairs.push_back(std::move(p));
  }
  return pairs;
}

void BM_TrainEpochs(benchmark::State& state) {
  const auto pairs = synthetic_pairs(static_cast<std::size_t>(state.range(0)), 32);
  satisfaction::TrainingConfig config;
  config.epochs_per_phase = 1;
  config.hidden = 16;
  config.step_size = 0.1;
  for (auto _ : state) {
    auto result = satisfaction::train(pairs, config);
    benchmark::DoNotOptimize(result);
  }
}
BENCHMARK(BM_TrainEpochs)->Arg(300)->Arg(1200)->Unit(benchmark::kMillisecond);

void BM_GroupAdvantages(benchmark::State& state) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> uniform(-5.0, 5.0);
  std::vector<double> rewards(static_cast<std::size_t>(state.range(0)));
  for (auto& r : rewards) r = uniform(rng);
  for (auto _ : state) {
    auto a = reward::group_advantages(rewards);
    benchmark::DoNotOptimize(a);
  }
}
BENCHMARK(BM_GroupAdvantages)->Arg(8)->Arg(64)->Arg(512);

}  // namespace

BENCHMARK_MAIN();
