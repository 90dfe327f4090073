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

#include "storylens/satisfaction.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>

#include "json.hpp"

namespace storylens::satisfaction {

using nlohmann::json;

FeatureVector build_features(const providers::EmbeddingVector& e_p,
                             const providers::EmbeddingVector& e_y) {
  if (e_p.dimension() != e_y.dimension())
    throw PreconditionError("build_features: dimension mismatch");
  const std::size_t d = e_p.dimension();
  FeatureVector f;
  f.values.resize(4 * d);
  for (std::size_t i = 0; i < d; ++i) {
    f.values[i] = e_p.values[i];
    f.values[d + i] = e_y.values[i];
    f.values[2 * d + i] = e_p.values[i] * e_y.values[i];
    f.values[3 * d + i] = std::abs(e_p.values[i] - e_y.values[i]);
  }
  return f;
}

ScorerParameters ScorerParameters::zeros(std::size_t input_dim, std::size_t hidden) {
  ScorerParameters p;
  p.input_dim = input_dim;
  p.hidden = hidden;
  p.w.assign(hidden * input_dim, 0.0);
  p.b.assign(hidden, 0.0);
  p.head_w.assign(hidden, 0.0);
  return p;
}

ScorerParameters ScorerParameters::random_init(std::size_t input_dim, std::size_t hidden,
                                               std::uint64_t seed) {
  ScorerParameters p = zeros(input_dim, hidden);
  std::mt19937_64 rng(seed);
  const double scale = 1.0 / std::sqrt(static_cast<double>(input_dim));
  std::uniform_real_distribution<double> uni(-scale, scale);
  for (auto& x : p.w) x = uni(rng);
  for (auto& x : p.head_w) x = uni(rng);
  return p;
}

void ScorerParameters::save(const std::filesystem::path& path) const {
  json j = {{"version", version},    {"dim", input_dim}, {"hidden", hidden},
            {"W", w},                {"b", b},           {"head_w", head_w},
            {"head_b", head_b},      {"feature_layout", "cat-prod-absdiff"}};
  std::ofstream out(path);
  if (!out) throw Error("cannot write scorer to " + path.string());
  out << j.dump();
}

ScorerParameters ScorerParameters::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scorer file " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const std::exception& e) {
    throw ConfigError("scorer file " + path.string() + ": " + e.what());
  }
  if (j.value("feature_layout", "") != "cat-prod-absdiff")
    throw ConfigError("scorer file " + path.string() + ": unsupported feature layout");
  ScorerParameters p;
  p.version = j.value("version", "1");
  p.input_dim = j.at("dim").get<std::size_t>();
  p.hidden = j.at("hidden").get<std::size_t>();
  p.w = j.at("W").get<std::vector<double>>();
  p.b = j.at("b").get<std::vector<double>>();
  p.head_w = j.at("head_w").get<std::vector<double>>();
  p.head_b = j.at("head_b").get<double>();
  if (p.w.size() != p.hidden * p.input_dim || p.b.size() != p.hidden ||
      p.head_w.size() != p.hidden)
    throw ValidationError("scorer file " + path.string() + ": inconsistent shapes");
  return p;
}

namespace {

struct Forward {
  std::vector<double> pre;  // W x + b
  std::vector<double> act;  // relu(pre)
  double s = 0.0;
};

Forward forward(const ScorerParameters& p, const FeatureVector& x) {
  if (x.values.size() != p.input_dim)
    throw PreconditionError("score: feature dimension " + std::to_string(x.values.size()) +
                            " != " + std::to_string(p.input_dim));
  Forward f;
  f.pre.resize(p.hidden);
  f.act.resize(p.hidden);
  for (std::size_t i = 0; i < p.hidden; ++i) {
    double acc = p.b[i];
    const double* row = &p.w[i * p.input_dim];
    for (std::size_t j = 0; j < p.input_dim; ++j) acc += row[j] * x.values[j];
    f.pre[i] = acc;
    f.act[i] = acc > 0.0 ? acc : 0.0;
    f.s += p.head_w[i] * f.act[i];
  }
  f.s += p.head_b;
  if (!std::isfinite(f.s)) throw Error("score: non-finite output");
  return f;
}

// d(pair_loss)/d(margin) at margin m, i.e. -sigmoid(-m), overflow-safe.
double loss_slope(double margin) {
  if (margin > 0.0) {
    const double e = std::exp(-margin);
    return -e / (1.0 + e);
  }
  return -1.0 / (1.0 + std::exp(margin));
}

// Accumulates sign * slope * ds/dparam into g for one side of the pair.
void accumulate(const ScorerParameters& p, const FeatureVector& x, const Forward& f,
                double coeff, Gradient& g) {
  for (std::size_t i = 0; i < p.hidden; ++i) {
    g.head_w[i] += coeff * f.act[i];
    if (f.pre[i] > 0.0) {
      const double gi = coeff * p.head_w[i];
      g.b[i] += gi;
      double* row = &g.w[i * p.input_dim];
      for (std::size_t j = 0; j < p.input_dim; ++j) row[j] += gi * x.values[j];
    }
  }
  g.head_b += coeff;
}

Gradient zero_gradient(const ScorerParameters& p) {
  Gradient g;
  g.w.assign(p.w.size(), 0.0);
  g.b.assign(p.b.size(), 0.0);
  g.head_w.assign(p.head_w.size(), 0.0);
  g.head_b = 0.0;
  return g;
}

}  // namespace

double score(const ScorerParameters& params, const FeatureVector& features) {
  return forward(params, features).s;
}

double pair_loss(double s_w, double s_l) {
  if (!std::isfinite(s_w) || !std::isfinite(s_l))
    throw PreconditionError("pair_loss: non-finite score");
  const double margin = s_w - s_l;
  // softplus(-m) = log(1 + exp(-m)), stable on both sides.
  if (margin > 0.0) return std::log1p(std::exp(-margin));
  return -margin + std::log1p(std::exp(margin));
}

Gradient gradient(const ScorerParameters& params, const FeatureVector& winner,
                  const FeatureVector& loser) {
  const Forward fw = forward(params, winner);
  const Forward fl = forward(params, loser);
  const double slope = loss_slope(fw.s - fl.s);
  Gradient g = zero_gradient(params);
  accumulate(params, winner, fw, slope, g);
  accumulate(params, loser, fl, -slope, g);
  return g;
}

namespace {

void apply_step(ScorerParameters& p, const Gradient& g, double step, bool head_only) {
  if (!head_only) {
    for (std::size_t i = 0; i < p.w.size(); ++i) p.w[i] -= step * g.w[i];
    for (std::size_t i = 0; i < p.b.size(); ++i) p.b[i] -= step * g.b[i];
  }
  for (std::size_t i = 0; i < p.head_w.size(); ++i) p.head_w[i] -= step * g.head_w[i];
  p.head_b -= step * g.head_b;
}

double run_epoch(ScorerParameters& params, const std::vector<const TrainingPair*>& bin,
                 const TrainingConfig& config, std::mt19937_64& rng, bool head_only) {
  std::vector<std::size_t> order(bin.size());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);

  double total_loss = 0.0;
  std::size_t count = 0;
  for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
    const std::size_t end = std::min(order.size(), start + config.batch_size);
    Gradient batch = zero_gradient(params);
    for (std::size_t k = start; k < end; ++k) {
      const TrainingPair& pair = *bin[order[k]];
      const double loss =
          pair_loss(score(params, pair.winner), score(params, pair.loser));
      if (!std::isfinite(loss))
        throw Error("train: non-finite loss at pair " + std::to_string(order[k]));
      total_loss += loss;
      ++count;
      const Gradient g = gradient(params, pair.winner, pair.loser);
      for (std::size_t i = 0; i < batch.w.size(); ++i) batch.w[i] += g.w[i];
      for (std::size_t i = 0; i < batch.b.size(); ++i) batch.b[i] += g.b[i];
      for (std::size_t i = 0; i < batch.head_w.size(); ++i) batch.head_w[i] += g.head_w[i];
      batch.head_b += g.head_b;
    }
    const double inv = 1.0 / static_cast<double>(end - start);
    for (auto& x : batch.w) x *= inv;
    for (auto& x : batch.b) x *= inv;
    for (auto& x : batch.head_w) x *= inv;
    batch.head_b *= inv;
    apply_step(params, batch, config.step_size, head_only);
  }
  return count ? total_loss / static_cast<double>(count) : 0.0;
}

}  // namespace

TrainResult train(const std::vector<TrainingPair>& training_pairs,
                  const TrainingConfig& config) {
  if (training_pairs.empty()) throw PreconditionError("train: no training pairs");
  if (config.step_size <= 0.0 || config.step_size > 1.0)
    throw ConfigError("train: step_size must be in (0, 1]");
  if (config.batch_size == 0) throw ConfigError("train: batch_size must be positive");

  const std::size_t input_dim = training_pairs.front().winner.values.size();
  for (const auto& p : training_pairs)
    if (p.winner.values.size() != input_dim || p.loser.values.size() != input_dim)
      throw PreconditionError("train: inconsistent feature dimensions");

  std::map<pairs::Difficulty, std::vector<const TrainingPair*>> bins;
  for (const auto& p : training_pairs) bins[p.difficulty].push_back(&p);

  const pairs::Difficulty schedule[] = {pairs::Difficulty::Easy, pairs::Difficulty::Medium,
                                        pairs::Difficulty::Hard};
  if (config.epochs_per_phase > 0) {
    for (auto d : schedule)
      if (bins[d].empty())
        throw PreconditionError("train: difficulty bin '" + pairs::to_string(d) +
                                "' is empty; phase-1 scheduling needs all three bins");
  }

  TrainResult result;
  result.params = ScorerParameters::random_init(input_dim, config.hidden, config.seed);
  std::mt19937_64 rng(config.seed ^ 0x9e3779b97f4a7c15ULL);

  // Phase 1: easy-to-hard curriculum over all parameters.
  for (auto difficulty : schedule) {
    for (int epoch = 1; epoch <= config.epochs_per_phase; ++epoch) {
      const double mean_loss =
          run_epoch(result.params, bins[difficulty], config, rng, /*head_only=*/false);
      result.log.push_back({1, epoch, pairs::to_string(difficulty), mean_loss});
    }
  }
  result.params_after_phase1 = result.params;
  // Phase 2: hidden layer frozen, head refined on hard pairs.
  for (int epoch = 1; epoch <= config.epochs_per_phase; ++epoch) {
    const double mean_loss =
        run_epoch(result.params, bins[pairs::Difficulty::Hard], config, rng,
                  /*head_only=*/true);
    result.log.push_back({2, epoch, "hard", mean_loss});
  }
  return result;
}

std::string profile_embedding_text(const corpus::PreferenceProfile& profile) {
  return "plot: " + profile.plot + "\ncharacters: " + profile.characters +
         "\nlanguage: " + profile.language + "\nworldview: " + profile.worldview +
         "\ntheme: " + profile.theme;
}

double satisfaction_score(const ScorerParameters& params, providers::Provider& provider,
                          const std::string& embed_model,
                          const corpus::PreferenceProfile& profile,
                          const std::string& rewrite_text) {
  const auto e_p = provider.embed(embed_model, profile_embedding_text(profile));
  const auto e_y = provider.embed(embed_model, rewrite_text);
  return score(params, build_features(e_p, e_y));
}

std::vector<MethodStats> win_rate_top1(const std::vector<std::vector<double>>& score_matrix) {
  const std::size_t methods = score_matrix.size();
  if (methods == 0) throw PreconditionError("win_rate_top1: empty matrix");
  const std::size_t instances = score_matrix.front().size();
  if (instances == 0) throw PreconditionError("win_rate_top1: no instances");
  for (const auto& row : score_matrix)
    if (row.size() != instances)
      throw PreconditionError("win_rate_top1: incomplete score matrix");

  std::vector<double> wins(methods, 0.0), top1(methods, 0.0);
  for (std::size_t i = 0; i < instances; ++i) {
    for (std::size_t a = 0; a < methods; ++a) {
      for (std::size_t b = a + 1; b < methods; ++b) {
        if (score_matrix[a][i] > score_matrix[b][i]) {
          wins[a] += 1.0;
        } else if (score_matrix[a][i] < score_matrix[b][i]) {
          wins[b] += 1.0;
        } else {
          wins[a] += 0.5;
          wins[b] += 0.5;
        }
      }
    }
    double best = score_matrix[0][i];
    for (std::size_t m = 1; m < methods; ++m) best = std::max(best, score_matrix[m][i]);
    std::size_t tied = 0;
    for (std::size_t m = 0; m < methods; ++m)
      if (score_matrix[m][i] == best) ++tied;
    for (std::size_t m = 0; m < methods; ++m)
      if (score_matrix[m][i] == best) top1[m] += 1.0 / static_cast<double>(tied);
  }

  std::vector<MethodStats> stats(methods);
  const double denom =
      methods > 1 ? static_cast<double>((methods - 1) * instances) : 1.0;
  for (std::size_t m = 0; m < methods; ++m) {
    stats[m].win_rate = wins[m] / denom;
    stats[m].top1_rate = top1[m] / static_cast<double>(instances);
  }
  return stats;
}

}  // namespace storylens::satisfaction
