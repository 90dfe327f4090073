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
#include <algorithm>
#include <random>

#include "doctest.h"
#include "storylens/coherence.hpp"
#include "test_util.hpp"

using namespace storylens;
using namespace storylens::coherence;

namespace {

const prompts::PromptRegistry& registry() {
  static const prompts::PromptRegistry r = prompts::PromptRegistry::defaults();
  return r;
}

}  // namespace

TEST_CASE("default taxonomy is valid with eight unique tags") {
  const auto taxonomy = ErrorTaxonomy::defaults();
  CHECK(taxonomy.tags.size() == 8);
  CHECK_NOTHROW(taxonomy.validate());
  CHECK(taxonomy.contains("inconsistency"));
  CHECK(taxonomy.contains("duplication"));
  CHECK(!taxonomy.contains("bogus_tag"));
}

TEST_CASE("taxonomy validation rejects wrong cardinality and duplicates") {
  ErrorTaxonomy t = ErrorTaxonomy::defaults();
  t.tags.pop_back();
  CHECK_THROWS_AS(t.validate(), ValidationError);
  t = ErrorTaxonomy::defaults();
  t.tags[1].name = t.tags[0].name;
  CHECK_THROWS_AS(t.validate(), ValidationError);
}

TEST_CASE("taxonomy round-trips through a config file") {
  test_util::TempDir dir;
  std::string body = R"({"tags":[)";
  for (int i = 0; i < 8; ++i) {
    if (i) body += ",";
    body += R"({"name":"tag)" + std::to_string(i) + R"(","definition":"d"})";
  }
  body += "]}";
  const auto taxonomy = ErrorTaxonomy::from_file(dir.write("taxonomy.json", body));
  CHECK(taxonomy.tags.size() == 8);
  CHECK(taxonomy.contains("tag3"));
}

TEST_CASE("detect_sentence_errors parses judge replies") {
  const auto taxonomy = ErrorTaxonomy::defaults();
  SUBCASE("'none' gives empty list") {
    providers::ScriptedProvider provider;
    provider.add_response("", "none", providers::ScriptedProvider::Match::Any);
    const auto d = detect_sentence_errors(provider, registry(), "A sentence.", taxonomy);
    CHECK(d.tags.empty());
    CHECK(d.warnings == 0);
  }
  SUBCASE("comma list parses in order") {
    providers::ScriptedProvider provider;
    provider.add_response("", "inconsistency, duplication",
                          providers::ScriptedProvider::Match::Any);
    const auto d = detect_sentence_errors(provider, registry(), "A sentence.", taxonomy);
    CHECK(d.tags == std::vector<std::string>{"inconsistency", "duplication"});
  }
  SUBCASE("unknown tags dropped with a warning") {
    providers::ScriptedProvider provider;
    provider.add_response("", "inconsistency, bogus_tag",
                          providers::ScriptedProvider::Match::Any);
    const auto d = detect_sentence_errors(provider, registry(), "A sentence.", taxonomy);
    CHECK(d.tags == std::vector<std::string>{"inconsistency"});
    CHECK(d.warnings == 1);
  }
}

TEST_CASE("score_coherence examples") {
  auto judged = [](const std::vector<std::vector<std::string>>& tag_lists) {
    std::vector<JudgedSentence> out;
    for (const auto& tags : tag_lists) out.push_back({"s", tags});
    return out;
  };
  SUBCASE("10 sentences, 9 tag-free") {
    std::vector<std::vector<std::string>> lists(10);
    lists[4] = {"duplication"};
    const auto r = score_coherence(judged(lists));
    CHECK(r.n_total == 10);
    CHECK(r.n_error_free == 9);
    CHECK(r.score == doctest::Approx(0.9).epsilon(1e-12));
  }
  SUBCASE("all tag-free") {
    CHECK(score_coherence(judged({{}, {}, {}})).score == 1.0);
  }
  SUBCASE("[[],[x],[x,y]] gives 1/3") {
    const auto r = score_coherence(judged({{}, {"salience"}, {"salience", "duplication"}}));
    CHECK(r.score == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  }
  SUBCASE("empty input is an error") {
    CHECK_THROWS_WITH_AS(score_coherence({}), doctest::Contains("no sentences"),
                         PreconditionError);
  }
}

TEST_CASE("C is permutation-invariant and drops by exactly 1/n per new error") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 2 + rng() % 10;
    std::vector<JudgedSentence> judged(n);
    for (auto& s : judged) {
      s.sentence = "s";
      if (rng() % 2) s.tags = {"duplication"};
    }
    const double before = score_coherence(judged).score;
    auto shuffled = judged;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    CHECK(score_coherence(shuffled).score == doctest::Approx(before).epsilon(1e-12));

    auto clean = std::find_if(judged.begin(), judged.end(),
                              [](const JudgedSentence& s) { return s.tags.empty(); });
    if (clean != judged.end()) {
      clean->tags = {"inconsistency"};
      CHECK(score_coherence(judged).score ==
            doctest::Approx(before - 1.0 / static_cast<double>(n)).epsilon(1e-12));
    }
  }
}

TEST_CASE("evaluate_coherence: one detection call per sentence") {
  providers::ScriptedProvider provider;
  provider.add_response("The duplicate line.", "duplication",
                        providers::ScriptedProvider::Match::Contains);
  provider.add_response("", "none", providers::ScriptedProvider::Match::Any);
  const auto taxonomy = ErrorTaxonomy::defaults();
  const auto report = evaluate_coherence(provider, registry(),
                                         "He walked in. The duplicate line. She left.",
                                         taxonomy);
  CHECK(provider.chat_calls() == 3);
  CHECK(report.n_total == 3);
  CHECK(report.n_error_free == 2);
  CHECK(report.score == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  REQUIRE(report.per_sentence.size() == 3);
  CHECK(report.per_sentence[1].tags == std::vector<std::string>{"duplication"});
}
