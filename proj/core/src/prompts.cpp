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

#include "storylens/prompts.hpp"

#include <fstream>

#include "json.hpp"

namespace storylens::prompts {

using nlohmann::json;

PromptRegistry PromptRegistry::defaults() {
  PromptRegistry r;
  r.version_ = "default-1";
  r.set("svo_extract",
        {"You extract narrative events as subject-verb-object triplets.",
         "Extract every Subject-Verb-Object event triplet from the text below. Reply with "
         "one triplet per line as: subject | verb | object. Reply 'none' if there are no "
         "events.\nText:\n{text}"});
  r.set("nekg_extract",
        {"You extract entity knowledge from narrative text.",
         "Extract narrative entity knowledge entries from the text below. Reply with one "
         "entry per line as: entity | attribute_or_relation | value. Reply 'none' if there "
         "are no entries.\nText:\n{text}"});
  r.set("svo_arbitrate",
        {"You arbitrate whether a narrative event is faithfully preserved.",
         "Original event: {original}\nRewritten event: {rewrite}\nIs the original event "
         "faithfully preserved in the rewritten event? Reply with exactly one word: pass "
         "or fail."});
  r.set("nekg_judge",
        {"You judge whether an entity knowledge entry is preserved in a rewrite.",
         "Entry: {entry}\nRewritten text:\n{text}\nIs this entry preserved in the rewritten "
         "text? Reply with exactly one word: preserved or lost."});
  r.set("claim_extract",
        {"You extract atomic factual claims from narrative text.",
         "Extract the atomic claims made by the text below. Reply with one claim per line, "
         "optionally prefixed by a kind tag such as [Event] or [State]. Reply 'none' if "
         "there are no claims.\nText:\n{text}"});
  r.set("claim_judge_local",
        {"You judge claims against a source text.",
         "Claim: {claim}\nSource text:\n{text}\nIs the claim supported by the source text, "
         "contradicted by it, or simply not covered? Reply with exactly one word: "
         "supported, contradiction, or unsupported."});
  r.set("claim_judge_global",
        {"You judge claims against a structured narrative context.",
         "Claim: {claim}\nStructured context: {context}\nIs the claim consistent with this "
         "narrative context (a plausible expansion), or does it conflict with it? Reply "
         "with exactly one word: consistent or conflict."});
  r.set("coherence_detect",
        {"You detect coherence errors in single sentences.",
         "Error types:\n{taxonomy}\nSentence: {sentence}\nList the error types present in "
         "the sentence as a comma-separated list of type names, or reply 'none'."});
  return r;
}

PromptRegistry PromptRegistry::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open prompt registry " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const std::exception& e) {
    throw ConfigError("prompt registry " + path.string() + ": " + e.what());
  }
  PromptRegistry r = defaults();
  if (j.contains("version")) r.version_ = j["version"].get<std::string>();
  if (j.contains("prompts")) {
    for (auto& [name, p] : j["prompts"].items())
      r.set(name, {p.value("system", ""), p.at("user").get<std::string>()});
  }
  return r;
}

const PromptPair& PromptRegistry::get(const std::string& name) const {
  auto it = prompts_.find(name);
  if (it == prompts_.end()) throw ConfigError("unknown prompt '" + name + "'");
  return it->second;
}

void PromptRegistry::set(const std::string& name, PromptPair pair) {
  prompts_[name] = std::move(pair);
}

std::string PromptRegistry::render(const std::string& name,
                                   const std::map<std::string, std::string>& values) const {
  std::string out = get(name).user;
  for (const auto& [key, value] : values) {
    const std::string slot = "{" + key + "}";
    std::size_t pos = 0;
    while ((pos = out.find(slot, pos)) != std::string::npos) {
      out.replace(pos, slot.size(), value);
      pos += value.size();
    }
  }
  return out;
}

}  // namespace storylens::prompts
