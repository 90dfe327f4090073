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

#ifndef STORYLENS_PAIRS_HPP_
#define STORYLENS_PAIRS_HPP_

#include <string>
#include <vector>

#include "storylens/corpus.hpp"

namespace storylens::pairs {

enum class Difficulty { Easy, Medium, Hard };
enum class PairScheme { Consecutive, AllPairs };

std::string to_string(Difficulty d);
Difficulty difficulty_from_string(const std::string& s);
PairScheme scheme_from_string(const std::string& s);

struct PairwiseComparison {
  std::string profile_id;
  std::string winner_id;  // numerically smaller rank = better
  std::string loser_id;
  int rank_gap = 1;  // loser.rank - winner.rank >= 1
  Difficulty difficulty = Difficulty::Hard;
};

// gap >= 3 -> Easy; gap == 2 -> Medium; gap == 1 -> Hard.
Difficulty bin_difficulty(int rank_gap);

// Consecutive: n-1 pairs with gap 1. AllPairs: n(n-1)/2 pairs. Output ordered
// by (winner rank, loser rank). Throws when the set has fewer than 2
// candidates.
std::vector<PairwiseComparison> build_pairs(const corpus::RankedCandidateSet& set,
                                            PairScheme scheme);

std::string serialize_pair(const PairwiseComparison& p);  // pairs.jsonl line

}  // namespace storylens::pairs

#endif  // STORYLENS_PAIRS_HPP_
