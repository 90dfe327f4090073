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

#ifndef STORYLENS_COHERENCE_HPP_
#define STORYLENS_COHERENCE_HPP_

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "storylens/prompts.hpp"
#include "storylens/providers.hpp"

namespace storylens::coherence {

struct ErrorTag {
  std::string name;
  std::string definition;
};

// Exactly eight named error types; content is operator configuration.
struct ErrorTaxonomy {
  std::vector<ErrorTag> tags;

  bool contains(const std::string& name) const;
  static ErrorTaxonomy defaults();
  static ErrorTaxonomy from_file(const std::filesystem::path& path);
  void validate() const;  // throws unless 8 unique names
};

struct JudgedSentence {
  std::string sentence;
  std::vector<std::string> tags;  // empty = error-free
};

struct CoherenceReport {
  std::size_t n_total = 0;
  std::size_t n_error_free = 0;
  double score = 0.0;  // n_error_free / n_total
  std::vector<JudgedSentence> per_sentence;
};

struct Detection {
  std::vector<std::string> tags;
  std::size_t warnings = 0;  // unknown tags dropped
};

// One judge call per sentence. Reply is "none" or a comma-separated subset of
// taxonomy tag names; unknown tags are dropped with a warning.
Detection detect_sentence_errors(providers::Provider& provider,
                                 const prompts::PromptRegistry& registry,
                                 const std::string& sentence,
                                 const ErrorTaxonomy& taxonomy);

CoherenceReport score_coherence(const std::vector<JudgedSentence>& judged);

// Segments with corpus::segment_sentences and judges each sentence.
CoherenceReport evaluate_coherence(providers::Provider& provider,
                                   const prompts::PromptRegistry& registry,
                                   const std::string& rewrite_text,
                                   const ErrorTaxonomy& taxonomy);

}  // namespace storylens::coherence

#endif  // STORYLENS_COHERENCE_HPP_
