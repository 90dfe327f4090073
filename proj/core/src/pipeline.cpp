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

#include "storylens/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <ctime>
#include <iomanip>
#include <sstream>
#include <thread>

#include "json.hpp"

namespace storylens::pipeline {

using nlohmann::json;

namespace {

const std::vector<std::string>& metric_columns() {
  static const std::vector<std::string> kColumns = {"f_local", "f_global", "coherence",
                                                    "s_sat"};
  return kColumns;
}

std::string utc_now_iso8601() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

CandidateRow evaluate_candidate(const EvaluateOptions& options,
                                const corpus::RewriteCandidate& candidate) {
  CandidateRow row;
  row.candidate_id = candidate.candidate_id;

  const corpus::StoryUnit* unit = nullptr;
  for (const auto& u : options.units)
    if (u.book_id == candidate.book_id && u.chapter_id == candidate.chapter_id) unit = &u;
  const corpus::PreferenceProfile* profile = nullptr;
  for (const auto& p : options.profiles)
    if (p.profile_id == candidate.profile_id) profile = &p;

  auto fail_all = [&](const std::string& reason) {
    if (options.metrics.count("fidelity")) {
      row.metrics["f_local"] = {std::nullopt, reason};
      row.metrics["f_global"] = {std::nullopt, reason};
    }
    if (options.metrics.count("coherence")) row.metrics["coherence"] = {std::nullopt, reason};
    if (options.metrics.count("satisfaction")) row.metrics["s_sat"] = {std::nullopt, reason};
  };
  if (!unit) {
    fail_all("no unit for " + candidate.book_id + "/" + candidate.chapter_id);
    return row;
  }

  if (options.metrics.count("fidelity")) {
    try {
      const auto local = fidelity::local_fidelity(*options.provider, options.registry,
                                                  unit->original_text, candidate.text);
      row.metrics["f_local"] = {local.f_local, ""};
    } catch (const std::exception& e) {
      row.metrics["f_local"] = {std::nullopt, e.what()};
    }
    try {
      const auto global =
          fidelity::global_fidelity(*options.provider, options.registry, unit->original_text,
                                    candidate.text, unit->context);
      row.metrics["f_global"] = {global.f_global, ""};
    } catch (const std::exception& e) {
      row.metrics["f_global"] = {std::nullopt, e.what()};
    }
  }
  if (options.metrics.count("coherence")) {
    try {
      const auto report = coherence::evaluate_coherence(*options.provider, options.registry,
                                                        candidate.text, options.taxonomy);
      row.metrics["coherence"] = {report.score, ""};
    } catch (const std::exception& e) {
      row.metrics["coherence"] = {std::nullopt, e.what()};
    }
  }
  if (options.metrics.count("satisfaction")) {
    try {
      if (!profile) throw ConfigError("no profile '" + candidate.profile_id + "'");
      if (!options.scorer) throw ConfigError("scorer not loaded");
      const double s = satisfaction::satisfaction_score(
          *options.scorer, *options.provider, options.embed_model, *profile, candidate.text);
      row.metrics["s_sat"] = {s, ""};
    } catch (const std::exception& e) {
      row.metrics["s_sat"] = {std::nullopt, e.what()};
    }
  }
  return row;
}

}  // namespace

Aggregate aggregate_column(const std::vector<CandidateRow>& rows, const std::string& metric) {
  Aggregate agg;
  double sum = 0.0;
  bool metric_present = false;
  for (const auto& row : rows) {
    auto it = row.metrics.find(metric);
    if (it == row.metrics.end()) continue;
    metric_present = true;
    if (it->second.value) {
      sum += *it->second.value;
      ++agg.n;
    }
  }
  if (!metric_present) {
    agg.note = "metric not evaluated";
  } else if (agg.n == 0) {
    agg.note = "all rows failed for this column";
  } else {
    agg.mean = sum / static_cast<double>(agg.n);
  }
  return agg;
}

EvaluationReport run_evaluate(const EvaluateOptions& options) {
  if (!options.provider) throw ConfigError("run_evaluate: no provider");

  EvaluationReport report;
  report.rows.resize(options.candidates.size());

  unsigned jobs = options.jobs ? options.jobs : std::thread::hardware_concurrency();
  if (jobs == 0) jobs = 1;
  jobs = std::min<unsigned>(jobs, std::max<std::size_t>(options.candidates.size(), 1));

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= options.candidates.size()) return;
      report.rows[i] = evaluate_candidate(options, options.candidates[i]);
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 0; t + 1 < jobs; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  for (const auto& metric : metric_columns()) {
    const Aggregate agg = aggregate_column(report.rows, metric);
    if (agg.note != "metric not evaluated") report.aggregates[metric] = agg;
  }

  report.provenance.provider_id = options.provider->id();
  report.provenance.scorer_version = options.scorer ? options.scorer->version : "none";
  report.provenance.prompt_registry_version = options.registry.version();
  std::string metric_list;
  for (const auto& m : options.metrics) metric_list += m + ",";
  report.provenance.config_hash =
      sha256_hex(options.config_description + "|" + metric_list + "|" +
                 std::to_string(options.seed) + "|" + report.provenance.provider_id + "|" +
                 report.provenance.scorer_version + "|" +
                 report.provenance.prompt_registry_version);
  report.provenance.timestamp =
      options.deterministic ? "1970-01-01T00:00:00Z" : utc_now_iso8601();
  return report;
}

bool any_failure(const EvaluationReport& report) {
  for (const auto& row : report.rows)
    for (const auto& [metric, value] : row.metrics)
      if (value.failed()) return true;
  return false;
}

namespace {

json report_json(const EvaluationReport& report) {
  json rows = json::array();
  for (const auto& row : report.rows) {
    json r = {{"candidate_id", row.candidate_id}};
    for (const auto& [metric, value] : row.metrics) {
      if (value.value)
        r[metric] = *value.value;
      else
        r[metric + "_error"] = value.error;
    }
    rows.push_back(std::move(r));
  }
  json aggregates = json::object();
  for (const auto& [metric, agg] : report.aggregates) {
    json a = {{"n", agg.n}};
    if (agg.mean)
      a["mean"] = *agg.mean;
    else
      a["note"] = agg.note;
    aggregates[metric] = std::move(a);
  }
  return {{"per_candidate", rows},
          {"aggregates", aggregates},
          {"provenance",
           {{"provider_id", report.provenance.provider_id},
            {"scorer_version", report.provenance.scorer_version},
            {"prompt_registry_version", report.provenance.prompt_registry_version},
            {"config_hash", report.provenance.config_hash},
            {"timestamp", report.provenance.timestamp}}}};
}

std::string format_cell(const json& row, const char* metric) {
  if (!row.contains(metric)) return "";
  std::ostringstream out;
  out << std::fixed << std::setprecision(4) << row[metric].get<double>();
  return out.str();
}

std::string markdown_from(const json& j) {
  std::ostringstream out;
  out << "| Candidate | Local Fid. | Global Fid. | Coh. | Sat. |\n"
      << "|---|---|---|---|---|\n";
  for (const auto& row : j.at("per_candidate")) {
    out << "| " << row.at("candidate_id").get<std::string>() << " | "
        << format_cell(row, "f_local") << " | " << format_cell(row, "f_global") << " | "
        << format_cell(row, "coherence") << " | " << format_cell(row, "s_sat") << " |\n";
  }
  const auto& aggregates = j.at("aggregates");
  auto mean_cell = [&](const char* metric) -> std::string {
    if (!aggregates.contains(metric) || !aggregates[metric].contains("mean")) return "";
    std::ostringstream cell;
    cell << std::fixed << std::setprecision(4) << aggregates[metric]["mean"].get<double>();
    return cell.str();
  };
  out << "| **Mean** | " << mean_cell("f_local") << " | " << mean_cell("f_global") << " | "
      << mean_cell("coherence") << " | " << mean_cell("s_sat") << " |\n";
  return out.str();
}

}  // namespace

std::string report_to_json(const EvaluationReport& report) {
  return report_json(report).dump(2) + "\n";
}

std::string report_to_csv(const EvaluationReport& report) {
  std::ostringstream out;
  out << "candidate_id,f_local,f_global,coherence,s_sat\n";
  const json j = report_json(report);
  for (const auto& row : j.at("per_candidate")) {
    out << row.at("candidate_id").get<std::string>() << "," << format_cell(row, "f_local")
        << "," << format_cell(row, "f_global") << "," << format_cell(row, "coherence") << ","
        << format_cell(row, "s_sat") << "\n";
  }
  return out.str();
}

std::string report_to_markdown(const EvaluationReport& report) {
  return markdown_from(report_json(report));
}

std::string render_markdown_from_json(const std::string& report_json_text) {
  json j;
  try {
    j = json::parse(report_json_text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("report JSON: ") + e.what());
  }
  return markdown_from(j);
}

}  // namespace storylens::pipeline
