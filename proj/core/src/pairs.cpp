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

#include "storylens/pairs.hpp"

#include <algorithm>

#include "json.hpp"

namespace storylens::pairs {

std::string to_string(Difficulty d) {
  switch (d) {
    case Difficulty::Easy: return "easy";
    case Difficulty::Medium: return "medium";
    case Difficulty::Hard: return "hard";
  }
  return "hard";
}

Difficulty difficulty_from_string(const std::string& s) {
  if (s == "easy") return Difficulty::Easy;
  if (s == "medium") return Difficulty::Medium;
  if (s == "hard") return Difficulty::Hard;
  throw ValidationError("unknown difficulty '" + s + "'");
}

PairScheme scheme_from_string(const std::string& s) {
  if (s == "consecutive") return PairScheme::Consecutive;
  if (s == "all_pairs") return PairScheme::AllPairs;
  throw ConfigError("unknown pair scheme '" + s + "'");
}

Difficulty bin_difficulty(int rank_gap) {
  if (rank_gap < 1) throw PreconditionError("bin_difficulty: rank_gap must be >= 1");
  if (rank_gap >= 3) return Difficulty::Easy;
  if (rank_gap == 2) return Difficulty::Medium;
  return Difficulty::Hard;
}

std::vector<PairwiseComparison> build_pairs(const corpus::RankedCandidateSet& set,
                                            PairScheme scheme) {
  if (set.candidates.size() < 2)
    throw ValidationError("build_pairs: nothing to pair (n < 2)");
  for (const auto& c : set.candidates)
    if (!c.rank)
      throw ValidationError("build_pairs: candidate '" + c.candidate_id + "' has no rank");

  // Output order is (winner rank, loser rank) regardless of storage order.
  std::vector<corpus::RewriteCandidate> cs = set.candidates;
  std::sort(cs.begin(), cs.end(),
            [](const auto& a, const auto& b) { return *a.rank < *b.rank; });

  std::vector<PairwiseComparison> out;
  auto emit = [&](std::size_t wi, std::size_t li) {
    const int gap = *cs[li].rank - *cs[wi].rank;
    out.push_back({set.profile_id, cs[wi].candidate_id, cs[li].candidate_id, gap,
                   bin_difficulty(gap)});
  };
  if (scheme == PairScheme::Consecutive) {
    for (std::size_t i = 0; i + 1 < cs.size(); ++i) emit(i, i + 1);
  } else {
    for (std::size_t i = 0; i < cs.size(); ++i)
      for (std::size_t j = i + 1; j < cs.size(); ++j) emit(i, j);
  }
  return out;
}

std::string serialize_pair(const PairwiseComparison& p) {
  nlohmann::json j = {{"profile_id", p.profile_id},
                      {"winner_id", p.winner_id},
                      {"loser_id", p.loser_id},
                      {"rank_gap", p.rank_gap},
                      {"difficulty", to_string(p.difficulty)}};
  return j.dump();
}

}  // namespace storylens::pairs
