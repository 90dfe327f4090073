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

#ifndef STORYLENS_CORPUS_HPP_
#define STORYLENS_CORPUS_HPP_

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "storylens/common.hpp"

namespace storylens::corpus {

enum class Genre { Historical, Romance, SciFi, Adventure, Horror, Humor, Detective };

Genre genre_from_string(const std::string& name);
std::string to_string(Genre g);

struct Character {
  std::string name;
  std::string description;
};

struct Relation {
  std::string source;
  std::string target;
  std::string relation;
};

// Structured narrative context of the preceding storyline (c).
struct StructuredContext {
  std::string background;
  std::vector<Character> characters;
  std::vector<std::string> events;
  std::vector<Relation> relations;

  // Relations whose source or target names no known character.
  std::vector<std::string> dangling_relation_names() const;
};

// One chapter: original text (x) plus its structured context (c).
struct StoryUnit {
  std::string book_id;
  std::string chapter_id;
  Genre genre = Genre::Historical;
  std::string original_text;
  StructuredContext context;
};

// Five-dimensional reader preference record (p).
struct PreferenceProfile {
  std::string profile_id;
  std::string plot;
  std::string characters;
  std::string language;
  std::string worldview;
  std::string theme;
};

struct RewriteCandidate {
  std::string candidate_id;
  std::string book_id;
  std::string chapter_id;
  std::string profile_id;
  std::string text;
  std::optional<int> rank;  // 1 = best
};

struct RankedCandidateSet {
  std::string book_id;
  std::string chapter_id;
  std::string profile_id;
  std::vector<RewriteCandidate> candidates;  // ranks contiguous 1..n
};

std::vector<StoryUnit> load_units(const std::filesystem::path& path);
std::vector<PreferenceProfile> load_profiles(const std::filesystem::path& path);
std::vector<RewriteCandidate> load_candidates(const std::filesystem::path& path);

// Groups candidates by (book_id, chapter_id, profile_id) and validates that
// every group carries distinct contiguous ranks 1..n.
std::vector<RankedCandidateSet> group_ranked_sets(
    const std::vector<RewriteCandidate>& candidates);

std::string serialize_unit(const StoryUnit& u);
std::string serialize_profile(const PreferenceProfile& p);
std::string serialize_candidate(const RewriteCandidate& c);

// Compact single-line JSON used both in prompts and in stage-2 claim checks.
std::string compact_context_json(const StructuredContext& c);
std::string compact_metadata_json(const StoryUnit& u);
std::string compact_profile_json(const PreferenceProfile& p);

enum class PromptTemplate { Sft, Grpo, Baseline, Rag };

struct RetrievedExample {
  std::string instruction;
  std::string original;
  std::string rewrite;
};

std::string render_prompt(PromptTemplate tpl, const StoryUnit& unit,
                          const PreferenceProfile& profile,
                          const std::vector<RetrievedExample>& extras = {});

// Splits on terminal punctuation (. ! ?), optionally followed by closing
// quotes/brackets, when followed by whitespace and an uppercase letter or end
// of text. A fixed abbreviation list (Mr., Mrs., Dr., St., vs., e.g., i.e.)
// suppresses splits. Segments are trimmed; together they cover every
// non-whitespace character of the input in order.
std::vector<std::string> segment_sentences(const std::string& text);

// Number of maximal non-whitespace runs.
std::size_t word_count(const std::string& text);

}  // namespace storylens::corpus

#endif  // STORYLENS_CORPUS_HPP_
