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

#include "storylens/coherence.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "storylens/corpus.hpp"

namespace storylens::coherence {

using nlohmann::json;

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

}  // namespace

bool ErrorTaxonomy::contains(const std::string& name) const {
  return std::any_of(tags.begin(), tags.end(),
                     [&](const ErrorTag& t) { return t.name == name; });
}

ErrorTaxonomy ErrorTaxonomy::defaults() {
  // Placeholder names pending operator review against the cited taxonomy; the
  // scorer only relies on cardinality and subset semantics.
  ErrorTaxonomy t;
  t.tags = {
      {"entity_omission", "An entity is referenced without having been introduced."},
      {"event_omission", "An event is referenced without having been established."},
      {"causal_omission", "A causal link needed to follow the sentence is missing."},
      {"salience", "The sentence adds trivial detail that obscures the narrative."},
      {"discontinuity", "The sentence does not follow from its surroundings."},
      {"duplication", "The sentence repeats earlier content."},
      {"inconsistency", "The sentence conflicts with earlier content."},
      {"language", "The sentence is ungrammatical or unintelligible."},
  };
  return t;
}

ErrorTaxonomy ErrorTaxonomy::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open taxonomy " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const std::exception& e) {
    throw ConfigError("taxonomy " + path.string() + ": " + e.what());
  }
  ErrorTaxonomy t;
  for (const auto& tag : j.at("tags"))
    t.tags.push_back({tag.at("name").get<std::string>(), tag.value("definition", "")});
  t.validate();
  return t;
}

void ErrorTaxonomy::validate() const {
  if (tags.size() != 8)
    throw ValidationError("taxonomy must have exactly 8 error types, got " +
                          std::to_string(tags.size()));
  std::set<std::string> names;
  for (const auto& t : tags)
    if (!names.insert(t.name).second)
      throw ValidationError("taxonomy: duplicate error type '" + t.name + "'");
}

Detection detect_sentence_errors(providers::Provider& provider,
                                 const prompts::PromptRegistry& registry,
                                 const std::string& sentence,
                                 const ErrorTaxonomy& taxonomy) {
  if (sentence.empty()) throw PreconditionError("detect_sentence_errors: empty sentence");
  taxonomy.validate();

  std::ostringstream tax;
  for (const auto& t : taxonomy.tags) tax << t.name << ": " << t.definition << "\n";

  providers::ChatRequest req;
  req.system = registry.get("coherence_detect").system;
  req.user = registry.render("coherence_detect",
                             {{"taxonomy", tax.str()}, {"sentence", sentence}});

  for (int attempt = 0; attempt < 2; ++attempt) {
    const std::string reply = trim(provider.chat(req));
    if (reply.empty()) continue;
    if (lower(reply) == "none") return {};
    Detection detection;
    bool any_token = false;
    std::istringstream parts(reply);
    std::string token;
    while (std::getline(parts, token, ',')) {
      token = trim(token);
      if (token.empty()) continue;
      any_token = true;
      if (taxonomy.contains(token))
        detection.tags.push_back(token);
      else
        ++detection.warnings;
    }
    if (!any_token) continue;
    if (detection.tags.empty() && detection.warnings == 0) continue;
    if (!detection.tags.empty() || detection.warnings > 0) return detection;
  }
  throw JudgeError("detect_sentence_errors: unparseable judge reply after reprompt");
}

CoherenceReport score_coherence(const std::vector<JudgedSentence>& judged) {
  if (judged.empty()) throw PreconditionError("score_coherence: no sentences");
  CoherenceReport report;
  report.per_sentence = judged;
  report.n_total = judged.size();
  for (const auto& s : judged)
    if (s.tags.empty()) ++report.n_error_free;
  report.score = static_cast<double>(report.n_error_free) / static_cast<double>(report.n_total);
  return report;
}

CoherenceReport evaluate_coherence(providers::Provider& provider,
                                   const prompts::PromptRegistry& registry,
                                   const std::string& rewrite_text,
                                   const ErrorTaxonomy& taxonomy) {
  const auto sentences = corpus::segment_sentences(rewrite_text);
  std::vector<JudgedSentence> judged;
  judged.reserve(sentences.size());
  for (const auto& sentence : sentences) {
    auto detection = detect_sentence_errors(provider, registry, sentence, taxonomy);
    judged.push_back({sentence, std::move(detection.tags)});
  }
  return score_coherence(judged);
}

}  // namespace storylens::coherence
