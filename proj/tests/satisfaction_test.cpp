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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>

#include "doctest.h"
#include "storylens/satisfaction.hpp"
#include "test_util.hpp"

using namespace storylens;
using namespace storylens::satisfaction;

namespace {

FeatureVector fv(std::vector<double> values) { return FeatureVector{std::move(values)}; }

ScorerParameters random_params(std::size_t input_dim, std::size_t hidden,
                               std::uint64_t seed) {
  return ScorerParameters::random_init(input_dim, hidden, seed);
}

double param_loss(const ScorerParameters& p, const FeatureVector& w, const FeatureVector& l) {
  return pair_loss(score(p, w), score(p, l));
}

}  // namespace

TEST_CASE("build_features layout") {
  CHECK(build_features({{1, 0}}, {{1, 0}}).values ==
        std::vector<double>{1, 0, 1, 0, 1, 0, 0, 0});
  CHECK(build_features({{1, 0}}, {{0, 1}}).values ==
        std::vector<double>{1, 0, 0, 1, 0, 0, 1, 1});
  CHECK(build_features({{2, -1}}, {{1, 3}}).values ==
        std::vector<double>{2, -1, 1, 3, 2, -3, 1, 4});
  CHECK_THROWS_AS(build_features({{1, 0}}, {{1, 0, 0}}), PreconditionError);
}

TEST_CASE("score: zero params, constructed case, determinism") {
  const auto zeros = ScorerParameters::zeros(8, 4);
  CHECK(score(zeros, fv({1, 2, 3, 4, 5, 6, 7, 8})) == 0.0);

  // One hidden unit wired to pass through x0 (for x0 >= 0).
  ScorerParameters pass = ScorerParameters::zeros(4, 1);
  pass.w[0] = 1.0;
  pass.head_w[0] = 1.0;
  CHECK(score(pass, fv({2.5, 9, 9, 9})) == doctest::Approx(2.5).epsilon(1e-12));

  const auto params = random_params(8, 16, 99);
  const auto x = fv({0.1, -0.2, 0.3, -0.4, 0.5, -0.6, 0.7, -0.8});
  CHECK(score(params, x) == score(params, x));
}

TEST_CASE("random_init is seed-deterministic and seed-sensitive") {
  const auto a = random_params(8, 4, 7);
  const auto b = random_params(8, 4, 7);
  const auto c = random_params(8, 4, 8);
  CHECK(a.w == b.w);
  CHECK(a.head_w == b.head_w);
  CHECK(a.w != c.w);
}

TEST_CASE("pair_loss values") {
  CHECK(pair_loss(1.0, 1.0) == doctest::Approx(std::log(2.0)).epsilon(1e-9));
  CHECK(pair_loss(10.0, 0.0) == doctest::Approx(4.5398899e-5).epsilon(1e-6));
  CHECK(pair_loss(0.0, 2.0) == doctest::Approx(2.1269280).epsilon(1e-6));
  // Overflow safety at extreme margins.
  CHECK(pair_loss(-1000.0, 0.0) == doctest::Approx(1000.0).epsilon(1e-9));
  CHECK(pair_loss(1000.0, 0.0) == 0.0);
  CHECK(std::isfinite(pair_loss(-1e8, 1e8)));
}

TEST_CASE("loss identity and monotonicity") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> uniform(-5.0, 5.0);
  for (int trial = 0; trial < 200; ++trial) {
    const double a = uniform(rng), b = uniform(rng);
    CHECK(pair_loss(a, b) + pair_loss(b, a) >= 2.0 * std::log(2.0) - 1e-12);
    CHECK(pair_loss(a, b) > pair_loss(a + 0.1, b));  // strictly decreasing in margin
  }
  CHECK(pair_loss(3.0, 3.0) + pair_loss(3.0, 3.0) ==
        doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("gradient: identical features cancel; saturation") {
  const auto params = random_params(8, 8, 3);
  const auto x = fv({1, -1, 0.5, 2, -0.3, 0.7, 1.1, -2});
  const auto g = gradient(params, x, x);
  for (double v : g.w) CHECK(v == doctest::Approx(0.0).epsilon(1e-15));
  for (double v : g.head_w) CHECK(v == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(g.head_b == doctest::Approx(0.0).epsilon(1e-15));

  // Huge positive margin: sigma(-margin) vanishes, gradient norm < 1e-6.
  ScorerParameters big = ScorerParameters::zeros(2, 1);
  big.w = {1.0, 0.0};
  big.head_w = {100.0};
  const auto sat = gradient(big, fv({1.0, 0.0}), fv({0.0, 0.0}));
  double norm = 0.0;
  for (double v : sat.w) norm += v * v;
  for (double v : sat.b) norm += v * v;
  for (double v : sat.head_w) norm += v * v;
  norm += sat.head_b * sat.head_b;
  CHECK(std::sqrt(norm) < 1e-6);
}

TEST_CASE("gradient matches central finite differences on 100 random draws") {
  std::mt19937_64 rng(23);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double h = 1e-5;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t dim = 4 + 4 * (rng() % 3);  // 4, 8, 12
    const std::size_t hidden = 2 + rng() % 6;
    auto params = random_params(dim, hidden, rng());
    // Shift biases off zero so ReLU kinks rarely sit exactly at the
    // evaluation point of the finite difference.
    for (auto& v : params.b) v += 0.1 * normal(rng);
    FeatureVector w, l;
    w.values.resize(dim);
    l.values.resize(dim);
    for (auto& v : w.values) v = normal(rng);
    for (auto& v : l.values) v = normal(rng);

    const auto g = gradient(params, w, l);
    auto check = [&](double analytic, double* slot) {
      const double orig = *slot;
      *slot = orig + h;
      const double up = param_loss(params, w, l);
      *slot = orig - h;
      const double down = param_loss(params, w, l);
      *slot = orig;
      const double numeric = (up - down) / (2.0 * h);
      const double scale = std::max({1.0, std::abs(analytic), std::abs(numeric)});
      CHECK(std::abs(analytic - numeric) / scale < 1e-4);
    };
    for (std::size_t i = 0; i < params.w.size(); ++i) check(g.w[i], &params.w[i]);
    for (std::size_t i = 0; i < params.b.size(); ++i) check(g.b[i], &params.b[i]);
    for (std::size_t i = 0; i < params.head_w.size(); ++i)
      check(g.head_w[i], &params.head_w[i]);
    check(g.head_b, &params.head_b);
  }
}

TEST_CASE("train: zero epochs leaves parameters at their seeded init") {
  std::vector<TrainingPair> pairs;
  for (auto d : {pairs::Difficulty::Easy, pairs::Difficulty::Medium, pairs::Difficulty::Hard})
    pairs.push_back({d, fv({1, 0, 0, 0, 0, 0, 0, 0}), fv({0, 0, 0, 0, 0, 0, 0, 0})});
  TrainingConfig config;
  config.epochs_per_phase = 0;
  config.hidden = 4;
  config.seed = 5;
  const auto result = train(pairs, config);
  const auto init = ScorerParameters::random_init(8, 4, 5);
  CHECK(result.params.w == init.w);
  CHECK(result.params.b == init.b);
  CHECK(result.params.head_w == init.head_w);
  CHECK(result.params.head_b == init.head_b);
  CHECK(result.log.empty());
}

TEST_CASE("train: phase-1 schedule is Easy then Medium then Hard; phase 2 head-only") {
  std::mt19937_64 rng(31);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<TrainingPair> pairs;
  for (int i = 0; i < 12; ++i) {
    FeatureVector w, l;
    w.values.resize(8);
    l.values.resize(8);
    for (auto& v : w.values) v = normal(rng);
    for (auto& v : l.values) v = normal(rng);
    const auto d = i % 3 == 0   ? pairs::Difficulty::Easy
                   : i % 3 == 1 ? pairs::Difficulty::Medium
                                : pairs::Difficulty::Hard;
    pairs.push_back({d, w, l});
  }
  TrainingConfig config;
  config.hidden = 4;
  config.epochs_per_phase = 3;
  const auto result = train(pairs, config);

  int last_stage = 0;  // 0=easy, 1=medium, 2=hard
  bool saw_phase2 = false;
  for (const auto& entry : result.log) {
    if (entry.phase == 1) {
      CHECK(!saw_phase2);
      const int stage = entry.difficulty == "easy" ? 0 : entry.difficulty == "medium" ? 1 : 2;
      CHECK(stage >= last_stage);
      last_stage = stage;
      CHECK(entry.mean_loss >= 0.0);
    } else {
      saw_phase2 = true;
      CHECK(entry.difficulty == "hard");
    }
  }
  CHECK(last_stage == 2);
  CHECK(saw_phase2);

  // Phase-2 freeze: hidden parameters are bit-identical across phase 2.
  CHECK(result.params.w == result.params_after_phase1.w);
  CHECK(result.params.b == result.params_after_phase1.b);

  // Same inputs give identical parameters on a rerun.
  const auto full = train(pairs, config);
  CHECK(full.params.w == result.params.w);
  CHECK(full.params.b == result.params.b);
}

TEST_CASE("train requires all three bins when epochs > 0") {
  std::vector<TrainingPair> pairs = {
      {pairs::Difficulty::Easy, fv({1, 0, 0, 0}), fv({0, 0, 0, 0})},
      {pairs::Difficulty::Hard, fv({1, 0, 0, 0}), fv({0, 0, 0, 0})}};
  TrainingConfig config;
  config.hidden = 2;
  CHECK_THROWS_AS(train(pairs, config), PreconditionError);
}

TEST_CASE("seeded determinism of full training") {
  std::mt19937_64 rng(41);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<TrainingPair> pairs;
  for (int i = 0; i < 30; ++i) {
    FeatureVector w, l;
    w.values.resize(8);
    l.values.resize(8);
    for (auto& v : w.values) v = normal(rng);
    for (auto& v : l.values) v = normal(rng);
    pairs.push_back({static_cast<pairs::Difficulty>(i % 3), w, l});
  }
  TrainingConfig config;
  config.hidden = 8;
  config.seed = 77;
  const auto a = train(pairs, config);
  const auto b = train(pairs, config);
  CHECK(a.params.w == b.params.w);
  CHECK(a.params.b == b.params.b);
  CHECK(a.params.head_w == b.params.head_w);
  CHECK(a.params.head_b == b.params.head_b);
}

TEST_CASE("parameter save/load round-trip and layout check") {
  test_util::TempDir dir;
  const auto params = random_params(8, 4, 11);
  const auto path = dir.path() / "scorer.json";
  params.save(path);
  const auto loaded = ScorerParameters::load(path);
  CHECK(loaded.input_dim == params.input_dim);
  CHECK(loaded.hidden == params.hidden);
  CHECK(loaded.w == params.w);
  CHECK(loaded.b == params.b);
  CHECK(loaded.head_w == params.head_w);
  CHECK(loaded.head_b == params.head_b);

  const auto bad = dir.write("bad.json",
                             R"({"version":"1","dim":4,"hidden":1,"W":[0,0,0,0],"b":[0],)"
                             R"("head_w":[0],"head_b":0,"feature_layout":"other"})");
  CHECK_THROWS_AS(ScorerParameters::load(bad), ConfigError);

  const auto misshapen = dir.write("misshapen.json",
                                   R"({"version":"1","dim":4,"hidden":2,"W":[0,0,0,0],)"
                                   R"("b":[0,0],"head_w":[0,0],"head_b":0,)"
                                   R"("feature_layout":"cat-prod-absdiff"})");
  CHECK_THROWS_AS(ScorerParameters::load(misshapen), ValidationError);
}

TEST_CASE("profile_embedding_text order") {
  corpus::PreferenceProfile p;
  p.plot = "P";
  p.characters = "C";
  p.language = "L";
  p.worldview = "W";
  p.theme = "T";
  CHECK(profile_embedding_text(p) ==
        "plot: P\ncharacters: C\nlanguage: L\nworldview: W\ntheme: T");
}

TEST_CASE("satisfaction_score with scripted embeddings") {
  providers::ScriptedProvider provider;
  corpus::PreferenceProfile profile;
  profile.plot = "heists";
  provider.add_embedding(profile_embedding_text(profile), {1.0, 0.0});
  provider.add_embedding("the rewrite", {0.0, 1.0});

  const auto zeros = ScorerParameters::zeros(8, 4);
  CHECK(satisfaction_score(zeros, provider, "m", profile, "the rewrite") == 0.0);

  // A scorer keyed to the rewrite-embedding slot orders rewrites by their
  // second coordinate.
  ScorerParameters planted = ScorerParameters::zeros(8, 1);
  planted.w[3] = 1.0;  // e_y[1] lives at feature index 3
  planted.head_w[0] = 1.0;
  provider.add_embedding("better", {0.0, 0.9});
  provider.add_embedding("worse", {0.0, 0.2});
  const double s_better = satisfaction_score(planted, provider, "m", profile, "better");
  const double s_worse = satisfaction_score(planted, provider, "m", profile, "worse");
  CHECK(s_better > s_worse);
  CHECK(satisfaction_score(planted, provider, "m", profile, "better") == s_better);
}

TEST_CASE("win_rate_top1 examples") {
  SUBCASE("dominant method") {
    const auto stats = win_rate_top1({{1, 1}, {0, 0}});
    REQUIRE(stats.size() == 2);
    CHECK(stats[0].win_rate == 1.0);
    CHECK(stats[0].top1_rate == 1.0);
    CHECK(stats[1].win_rate == 0.0);
    CHECK(stats[1].top1_rate == 0.0);
  }
  SUBCASE("symmetric split") {
    const auto stats = win_rate_top1({{1, 0}, {0, 1}});
    CHECK(stats[0].win_rate == 0.5);
    CHECK(stats[0].top1_rate == 0.5);
    CHECK(stats[1].win_rate == 0.5);
    CHECK(stats[1].top1_rate == 0.5);
  }
  SUBCASE("3 methods, 1 instance, [3,2,1]") {
    const auto stats = win_rate_top1({{3}, {2}, {1}});
    CHECK(stats[0].win_rate == 1.0);
    CHECK(stats[1].win_rate == 0.5);
    CHECK(stats[2].win_rate == 0.0);
    CHECK(stats[0].top1_rate == 1.0);
    CHECK(stats[1].top1_rate == 0.0);
    CHECK(stats[2].top1_rate == 0.0);
  }
  SUBCASE("tie splitting") {
    const auto stats = win_rate_top1({{1}, {1}});
    CHECK(stats[0].win_rate == 0.5);
    CHECK(stats[1].win_rate == 0.5);
    CHECK(stats[0].top1_rate == 0.5);  // 1/k credit for k=2 tied maxima
    CHECK(stats[1].top1_rate == 0.5);
  }
  SUBCASE("incomplete matrix is an error") {
    CHECK_THROWS_AS(win_rate_top1({{1, 2}, {1}}), PreconditionError);
    CHECK_THROWS_AS(win_rate_top1({}), PreconditionError);
  }
}

TEST_CASE("per-instance top-1 credit sums to 1 over methods") {
  std::mt19937_64 rng(53);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t methods = 2 + rng() % 4;
    const std::size_t instances = 1 + rng() % 5;
    std::vector<std::vector<double>> matrix(methods, std::vector<double>(instances));
    for (auto& row : matrix)
      for (auto& v : row) v = static_cast<double>(rng() % 3);  // force ties sometimes
    const auto stats = win_rate_top1(matrix);
    double top1_sum = 0.0, win_sum = 0.0;
    for (const auto& s : stats) {
      top1_sum += s.top1_rate;
      win_sum += s.win_rate;
    }
    CHECK(top1_sum == doctest::Approx(1.0).epsilon(1e-9));
    // Each of the M(M-1)/2 matchups hands out exactly one win, so win rates
    // over M methods sum to M/2.
    CHECK(win_sum == doctest::Approx(methods / 2.0).epsilon(1e-9));
  }
}
