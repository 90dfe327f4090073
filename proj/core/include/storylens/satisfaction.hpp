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

#ifndef STORYLENS_SATISFACTION_HPP_
#define STORYLENS_SATISFACTION_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "storylens/corpus.hpp"
#include "storylens/pairs.hpp"
#include "storylens/providers.hpp"

namespace storylens::satisfaction {

// Pair features for (profile embedding e_p, rewrite embedding e_y):
// [e_p ; e_y ; e_p*e_y ; |e_p - e_y|], dimension 4d.
struct FeatureVector {
  std::vector<double> values;
};

FeatureVector build_features(const providers::EmbeddingVector& e_p,
                             const providers::EmbeddingVector& e_y);

// One-hidden-layer ReLU scorer: s = head_w . relu(W x + b) + head_b.
struct ScorerParameters {
  std::size_t input_dim = 0;  // 4d
  std::size_t hidden = 0;     // h
  std::vector<double> w;      // h x input_dim, row-major
  std::vector<double> b;      // h
  std::vector<double> head_w;  // h
  double head_b = 0.0;
  std::string version = "1";

  static ScorerParameters zeros(std::size_t input_dim, std::size_t hidden);
  static ScorerParameters random_init(std::size_t input_dim, std::size_t hidden,
                                      std::uint64_t seed);

  void save(const std::filesystem::path& path) const;
  static ScorerParameters load(const std::filesystem::path& path);
};

double score(const ScorerParameters& params, const FeatureVector& features);

// softplus(-(s_w - s_l)), overflow-safe.
double pair_loss(double s_w, double s_l);

struct Gradient {
  std::vector<double> w;
  std::vector<double> b;
  std::vector<double> head_w;
  double head_b = 0.0;
};

// Exact analytic gradient of pair_loss(score(winner), score(loser)) with
// respect to every parameter.
Gradient gradient(const ScorerParameters& params, const FeatureVector& winner,
                  const FeatureVector& loser);

struct TrainingConfig {
  double step_size = 1e-3;  // <= 1
  int epochs_per_phase = 10;
  std::size_t hidden = 64;
  std::uint64_t seed = 0;
  std::size_t batch_size = 32;
};

struct TrainingPair {
  pairs::Difficulty difficulty = pairs::Difficulty::Hard;
  FeatureVector winner;
  FeatureVector loser;
};

struct LogEntry {
  int phase = 1;
  int epoch = 0;
  std::string difficulty;  // batch difficulty bin
  double mean_loss = 0.0;
};

struct TrainResult {
  ScorerParameters params;
  // Snapshot taken between the phases; phase 2 must leave w and b of the
  // final parameters bit-identical to this.
  ScorerParameters params_after_phase1;
  std::vector<LogEntry> log;
};

// Two-phase training. Phase 1 runs epochs over Easy, then Medium, then Hard
// pairs, updating all parameters. Phase 2 freezes the hidden layer and
// updates only the head on Hard pairs. Deterministic given (pairs, config).
TrainResult train(const std::vector<TrainingPair>& training_pairs,
                  const TrainingConfig& config);

// "plot: ...\ncharacters: ...\nlanguage: ...\nworldview: ...\ntheme: ..."
std::string profile_embedding_text(const corpus::PreferenceProfile& profile);

double satisfaction_score(const ScorerParameters& params, providers::Provider& provider,
                          const std::string& embed_model,
                          const corpus::PreferenceProfile& profile,
                          const std::string& rewrite_text);

struct MethodStats {
  double win_rate = 0.0;
  double top1_rate = 0.0;
};

// score_matrix[m][i] = S_sat of method m on instance i (complete matrix).
// Per instance, each unordered method pair awards 1 win to the higher scorer
// (0.5 each on ties); a tied maximum splits top-1 credit 1/k.
std::vector<MethodStats> win_rate_top1(const std::vector<std::vector<double>>& score_matrix);

}  // namespace storylens::satisfaction

#endif  // STORYLENS_SATISFACTION_HPP_
