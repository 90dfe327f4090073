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

#include "storylens/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"

namespace storylens::corpus {

using nlohmann::json;

namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && is_space(s[b])) ++b;
  while (e > b && is_space(s[e - 1])) --e;
  return s.substr(b, e - b);
}

[[noreturn]] void parse_fail(const std::filesystem::path& path, std::size_t line_no,
                             const std::string& what) {
  throw ParseError(path.string() + ":" + std::to_string(line_no) + ": " + what);
}

// Calls fn(line_json, line_no) for each non-blank line.
template <typename Fn>
void for_each_record(const std::filesystem::path& path, Fn&& fn) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      parse_fail(path, line_no, e.what());
    }
    if (!j.is_object()) parse_fail(path, line_no, "record is not a JSON object");
    fn(j, line_no);
  }
}

std::string require_string(const json& j, const char* field, const std::string& record_id) {
  if (!j.contains(field) || !j[field].is_string())
    throw ValidationError("record '" + record_id + "': missing or non-string field '" +
                          field + "'");
  return j[field].get<std::string>();
}

std::string optional_string(const json& j, const char* field) {
  if (j.contains(field) && j[field].is_string()) return j[field].get<std::string>();
  return {};
}

}  // namespace

Genre genre_from_string(const std::string& name) {
  if (name == "Historical") return Genre::Historical;
  if (name == "Romance") return Genre::Romance;
  if (name == "SciFi") return Genre::SciFi;
  if (name == "Adventure") return Genre::Adventure;
  if (name == "Horror") return Genre::Horror;
  if (name == "Humor") return Genre::Humor;
  if (name == "Detective") return Genre::Detective;
  throw ValidationError("unknown genre '" + name + "'");
}

std::string to_string(Genre g) {
  switch (g) {
    case Genre::Historical: return "Historical";
    case Genre::Romance: return "Romance";
    case Genre::SciFi: return "SciFi";
    case Genre::Adventure: return "Adventure";
    case Genre::Horror: return "Horror";
    case Genre::Humor: return "Humor";
    case Genre::Detective: return "Detective";
  }
  throw ValidationError("invalid genre value");
}

std::vector<std::string> StructuredContext::dangling_relation_names() const {
  std::set<std::string> known;
  for (const auto& c : characters) known.insert(c.name);
  std::vector<std::string> dangling;
  for (const auto& r : relations) {
    if (!known.count(r.source)) dangling.push_back(r.source);
    if (!known.count(r.target)) dangling.push_back(r.target);
  }
  return dangling;
}

namespace {

StructuredContext parse_context(const json& j, const std::string& record_id) {
  StructuredContext ctx;
  ctx.background = optional_string(j, "background");
  if (j.contains("characters")) {
    for (const auto& c : j["characters"]) {
      ctx.characters.push_back({optional_string(c, "name"), optional_string(c, "description")});
    }
  }
  if (j.contains("events")) {
    for (const auto& e : j["events"]) {
      if (!e.is_string())
        throw ValidationError("record '" + record_id + "': non-string event");
      ctx.events.push_back(e.get<std::string>());
    }
  }
  if (j.contains("relations")) {
    for (const auto& r : j["relations"]) {
      ctx.relations.push_back({optional_string(r, "source"), optional_string(r, "target"),
                               optional_string(r, "relation")});
    }
  }
  return ctx;
}

}  // namespace

std::vector<StoryUnit> load_units(const std::filesystem::path& path) {
  std::vector<StoryUnit> units;
  std::set<std::pair<std::string, std::string>> seen;
  for_each_record(path, [&](const json& j, std::size_t) {
    StoryUnit u;
    u.book_id = require_string(j, "book_id", "<unit>");
    const std::string rid = u.book_id;
    u.chapter_id = require_string(j, "chapter_id", rid);
    u.genre = genre_from_string(require_string(j, "genre", rid));
    u.original_text = require_string(j, "original_text", rid);
    if (trim(u.original_text).empty())
      throw ValidationError("record '" + rid + "/" + u.chapter_id +
                            "': field 'original_text' is empty");
    if (!seen.insert({u.book_id, u.chapter_id}).second)
      throw ValidationError("record '" + rid + "/" + u.chapter_id +
                            "': duplicate chapter_id within book");
    if (j.contains("context")) u.context = parse_context(j["context"], rid);
    units.push_back(std::move(u));
  });
  return units;
}

std::vector<PreferenceProfile> load_profiles(const std::filesystem::path& path) {
  std::vector<PreferenceProfile> profiles;
  for_each_record(path, [&](const json& j, std::size_t) {
    PreferenceProfile p;
    p.profile_id = require_string(j, "profile_id", "<profile>");
    p.plot = optional_string(j, "plot");
    p.characters = optional_string(j, "characters");
    p.language = optional_string(j, "language");
    p.worldview = optional_string(j, "worldview");
    p.theme = optional_string(j, "theme");
    if (p.plot.empty() && p.characters.empty() && p.language.empty() &&
        p.worldview.empty() && p.theme.empty())
      throw ValidationError("record '" + p.profile_id +
                            "': all five preference dimensions are empty");
    profiles.push_back(std::move(p));
  });
  return profiles;
}

std::vector<RewriteCandidate> load_candidates(const std::filesystem::path& path) {
  std::vector<RewriteCandidate> candidates;
  for_each_record(path, [&](const json& j, std::size_t) {
    RewriteCandidate c;
    c.candidate_id = require_string(j, "candidate_id", "<candidate>");
    const std::string rid = c.candidate_id;
    c.book_id = require_string(j, "book_id", rid);
    c.chapter_id = require_string(j, "chapter_id", rid);
    c.profile_id = require_string(j, "profile_id", rid);
    c.text = require_string(j, "text", rid);
    if (trim(c.text).empty())
      throw ValidationError("record '" + rid + "': field 'text' is empty");
    if (j.contains("rank") && !j["rank"].is_null()) {
      if (!j["rank"].is_number_integer())
        throw ValidationError("record '" + rid + "': field 'rank' is not an integer");
      int r = j["rank"].get<int>();
      if (r < 1) throw ValidationError("record '" + rid + "': field 'rank' must be >= 1");
      c.rank = r;
    }
    candidates.push_back(std::move(c));
  });
  return candidates;
}

std::vector<RankedCandidateSet> group_ranked_sets(
    const std::vector<RewriteCandidate>& candidates) {
  std::map<std::tuple<std::string, std::string, std::string>, RankedCandidateSet> groups;
  for (const auto& c : candidates) {
    auto& g = groups[{c.book_id, c.chapter_id, c.profile_id}];
    g.book_id = c.book_id;
    g.chapter_id = c.chapter_id;
    g.profile_id = c.profile_id;
    g.candidates.push_back(c);
  }
  std::vector<RankedCandidateSet> sets;
  for (auto& [key, g] : groups) {
    std::set<int> ranks;
    for (const auto& c : g.candidates) {
      if (!c.rank)
        throw ValidationError("candidate '" + c.candidate_id + "': missing rank in ranked set");
      if (!ranks.insert(*c.rank).second)
        throw ValidationError("set " + g.book_id + "/" + g.chapter_id + "/" + g.profile_id +
                              ": ranks not distinct");
    }
    const int n = static_cast<int>(g.candidates.size());
    if (*ranks.begin() != 1 || *ranks.rbegin() != n)
      throw ValidationError("set " + g.book_id + "/" + g.chapter_id + "/" + g.profile_id +
                            ": ranks not contiguous 1.." + std::to_string(n));
    std::sort(g.candidates.begin(), g.candidates.end(),
              [](const auto& a, const auto& b) { return *a.rank < *b.rank; });
    sets.push_back(std::move(g));
  }
  return sets;
}

namespace {

json context_to_json(const StructuredContext& c) {
  json chars = json::array();
  for (const auto& ch : c.characters)
    chars.push_back({{"name", ch.name}, {"description", ch.description}});
  json rels = json::array();
  for (const auto& r : c.relations)
    rels.push_back({{"source", r.source}, {"target", r.target}, {"relation", r.relation}});
  return {{"background", c.background},
          {"characters", chars},
          {"events", c.events},
          {"relations", rels}};
}

}  // namespace

std::string serialize_unit(const StoryUnit& u) {
  json j = {{"book_id", u.book_id},
            {"chapter_id", u.chapter_id},
            {"genre", to_string(u.genre)},
            {"original_text", u.original_text},
            {"context", context_to_json(u.context)}};
  return j.dump();
}

std::string serialize_profile(const PreferenceProfile& p) {
  json j = {{"profile_id", p.profile_id}, {"plot", p.plot},       {"characters", p.characters},
            {"language", p.language},    {"worldview", p.worldview}, {"theme", p.theme}};
  return j.dump();
}

std::string serialize_candidate(const RewriteCandidate& c) {
  json j = {{"candidate_id", c.candidate_id},
            {"book_id", c.book_id},
            {"chapter_id", c.chapter_id},
            {"profile_id", c.profile_id},
            {"text", c.text}};
  if (c.rank) j["rank"] = *c.rank;
  return j.dump();
}

std::string compact_context_json(const StructuredContext& c) {
  return context_to_json(c).dump();
}

std::string compact_metadata_json(const StoryUnit& u) {
  json j = {{"book_id", u.book_id}, {"chapter_id", u.chapter_id}, {"genre", to_string(u.genre)}};
  return j.dump();
}

std::string compact_profile_json(const PreferenceProfile& p) {
  json j = {{"plot", p.plot},
            {"characters", p.characters},
            {"language", p.language},
            {"worldview", p.worldview},
            {"theme", p.theme}};
  return j.dump();
}

std::string render_prompt(PromptTemplate tpl, const StoryUnit& unit,
                          const PreferenceProfile& profile,
                          const std::vector<RetrievedExample>& extras) {
  if (tpl == PromptTemplate::Rag && extras.empty())
    throw PreconditionError("rag template requires at least one retrieved example");

  std::ostringstream out;
  out << "You are a literary rewriting assistant. Preserve the main plot events, "
         "causal structure, and chapter continuity of the source chapter. Keep "
         "characters consistent with the structured context and adapt the rewrite to "
         "the reader preference profile. Continuity overrides preferences; clarity "
         "overrides stylistic excess. Output English only.\n";
  if (tpl == PromptTemplate::Grpo) {
    out << "Do not introduce new major characters, locations, events, or facts unless "
           "they are strongly implied by the source chapter and continuity context. "
           "Keep the rewrite roughly similar in length to the source chapter.\n";
  }
  out << "\nRewrite the source chapter for the target reader.\n";
  if (tpl == PromptTemplate::Rag) {
    out << "--- Reference Examples (Combine these styles) ---\n";
    for (const auto& ex : extras) {
      out << "[Instruction]: " << ex.instruction << "\n"
          << "[Original]: " << ex.original << "\n"
          << "[Rewrite]: " << ex.rewrite << "\n";
    }
    out << "--- End of Reference Examples ---\n";
  }
  out << "Metadata: " << compact_metadata_json(unit) << "\n"
      << "Structured context: " << compact_context_json(unit.context) << "\n"
      << "Reader preference profile: " << compact_profile_json(profile) << "\n"
      << "Source chapter: " << unit.original_text << "\n"
      << "Return only the rewritten chapter text.";
  return out.str();
}

namespace {

const std::vector<std::string>& abbreviations() {
  static const std::vector<std::string> kAbbrevs = {"Mr.",  "Mrs.", "Dr.", "St.",
                                                    "vs.",  "e.g.", "i.e."};
  return kAbbrevs;
}

bool is_closing_mark(const std::string& text, std::size_t pos, std::size_t* width) {
  const char c = text[pos];
  if (c == '"' || c == '\'' || c == ')' || c == ']') {
    *width = 1;
    return true;
  }
  // UTF-8 right double (U+201D) and right single (U+2019) quotes.
  if (pos + 2 < text.size() && static_cast<unsigned char>(text[pos]) == 0xE2 &&
      static_cast<unsigned char>(text[pos + 1]) == 0x80) {
    const unsigned char b = static_cast<unsigned char>(text[pos + 2]);
    if (b == 0x9D || b == 0x99) {
      *width = 3;
      return true;
    }
  }
  return false;
}

bool token_is_abbreviation(const std::string& text, std::size_t dot_pos,
                           std::size_t seg_start) {
  std::size_t ts = dot_pos;
  while (ts > seg_start && !is_space(text[ts - 1])) --ts;
  const std::string token = text.substr(ts, dot_pos - ts + 1);
  for (const auto& ab : abbreviations()) {
    if (token == ab) return true;
    // "(e.g." and similar: abbreviation preceded by punctuation.
    if (token.size() > ab.size() && token.compare(token.size() - ab.size(), ab.size(), ab) == 0 &&
        !std::isalnum(static_cast<unsigned char>(token[token.size() - ab.size() - 1])))
      return true;
  }
  return false;
}

}  // namespace

std::vector<std::string> segment_sentences(const std::string& text) {
  std::vector<std::string> segments;
  const std::size_t n = text.size();
  std::size_t i = 0;
  while (i < n && is_space(text[i])) ++i;
  std::size_t seg_start = i;

  while (i < n) {
    const char c = text[i];
    if (c == '.' || c == '!' || c == '?') {
      std::size_t end = i + 1;
      std::size_t width = 0;
      while (end < n && is_closing_mark(text, end, &width)) end += width;

      bool boundary = false;
      if (end >= n) {
        boundary = true;
      } else if (is_space(text[end])) {
        std::size_t j = end;
        while (j < n && is_space(text[j])) ++j;
        boundary = (j >= n) || std::isupper(static_cast<unsigned char>(text[j])) != 0;
      }
      if (boundary && c == '.' && token_is_abbreviation(text, i, seg_start))
        boundary = false;

      if (boundary) {
        segments.push_back(text.substr(seg_start, end - seg_start));
        i = end;
        while (i < n && is_space(text[i])) ++i;
        seg_start = i;
        continue;
      }
    }
    ++i;
  }
  if (seg_start < n) {
    std::size_t e = n;
    while (e > seg_start && is_space(text[e - 1])) --e;
    if (e > seg_start) segments.push_back(text.substr(seg_start, e - seg_start));
  }
  return segments;
}

std::size_t word_count(const std::string& text) {
  std::size_t count = 0;
  bool in_word = false;
  for (char c : text) {
    if (is_space(c)) {
      in_word = false;
    } else if (!in_word) {
      in_word = true;
      ++count;
    }
  }
  return count;
}

}  // namespace storylens::corpus
