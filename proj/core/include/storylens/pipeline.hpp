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

#ifndef STORYLENS_PIPELINE_HPP_
#define STORYLENS_PIPELINE_HPP_

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "storylens/coherence.hpp"
#include "storylens/corpus.hpp"
#include "storylens/fidelity.hpp"
#include "storylens/prompts.hpp"
#include "storylens/providers.hpp"
#include "storylens/satisfaction.hpp"

namespace storylens::pipeline {

struct MetricValue {
  std::optional<double> value;
  std::string error;  // non-empty when this metric failed for the row

  bool failed() const { return !value.has_value(); }
};

struct CandidateRow {
  std::string candidate_id;
  std::map<std::string, MetricValue> metrics;  // keyed by metric column name
};

struct Aggregate {
  std::optional<double> mean;  // absent when every row failed
  std::size_t n = 0;
  std::string note;
};

struct Provenance {
  std::string provider_id;
  std::string scorer_version;
  std::string prompt_registry_version;
  std::string config_hash;
  std::string timestamp;
};

struct EvaluationReport {
  std::vector<CandidateRow> rows;
  std::map<std::string, Aggregate> aggregates;
  Provenance provenance;
};

struct EvaluateOptions {
  std::vector<corpus::StoryUnit> units;
  std::vector<corpus::PreferenceProfile> profiles;
  std::vector<corpus::RewriteCandidate> candidates;
  std::set<std::string> metrics{"fidelity", "coherence", "satisfaction"};
  std::shared_ptr<providers::Provider> provider;
  std::optional<satisfaction::ScorerParameters> scorer;
  std::string embed_model;
  prompts::PromptRegistry registry = prompts::PromptRegistry::defaults();
  coherence::ErrorTaxonomy taxonomy = coherence::ErrorTaxonomy::defaults();
  unsigned jobs = 0;  // 0 = hardware concurrency
  std::uint64_t seed = 0;
  bool deterministic = false;  // normalize timestamps
  std::string config_description;  // hashed into provenance
};

// Fans (unit, candidate) pairs out to a bounded worker pool; result order
// follows input order regardless of completion order. Metric failures are
// recorded per row, never aborting the batch.
EvaluationReport run_evaluate(const EvaluateOptions& options);

Aggregate aggregate_column(const std::vector<CandidateRow>& rows, const std::string& metric);

std::string report_to_json(const EvaluationReport& report);
std::string report_to_csv(const EvaluationReport& report);
// Markdown table with Local Fid. / Global Fid. / Coh. / Sat. columns.
std::string report_to_markdown(const EvaluationReport& report);
std::string render_markdown_from_json(const std::string& report_json);

bool any_failure(const EvaluationReport& report);

}  // namespace storylens::pipeline

#endif  // STORYLENS_PIPELINE_HPP_
