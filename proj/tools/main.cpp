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

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "storylens/pipeline.hpp"
#include "storylens/service.hpp"

namespace {

using namespace storylens;
using nlohmann::json;

void write_file(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path);
  out << content;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::set<std::string> parse_metrics(const std::string& csv) {
  std::set<std::string> metrics;
  std::istringstream in(csv);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    if (item != "fidelity" && item != "coherence" && item != "satisfaction")
      throw ConfigError("unknown metric '" + item + "'");
    metrics.insert(item);
  }
  if (metrics.empty()) throw ConfigError("no metrics selected");
  return metrics;
}

std::shared_ptr<providers::Provider> open_provider(const std::string& config_path,
                                                   const std::string& cache_dir) {
  auto provider = providers::provider_from_config_file(config_path);
  if (!cache_dir.empty())
    provider = std::make_shared<providers::CachingProvider>(provider, cache_dir);
  return provider;
}

// Embeds ranked sets into satisfaction training pairs.
std::vector<satisfaction::TrainingPair> pairs_to_training(
    const std::vector<corpus::RankedCandidateSet>& sets,
    const std::vector<corpus::PreferenceProfile>& profiles, providers::Provider& provider,
    const std::string& embed_model, pairs::PairScheme scheme) {
  std::vector<satisfaction::TrainingPair> training;
  for (const auto& set : sets) {
    const corpus::PreferenceProfile* profile = nullptr;
    for (const auto& p : profiles)
      if (p.profile_id == set.profile_id) profile = &p;
    if (!profile) throw ConfigError("no profile '" + set.profile_id + "' for ranked set");
    const auto e_p =
        provider.embed(embed_model, satisfaction::profile_embedding_text(*profile));

    std::map<std::string, const corpus::RewriteCandidate*> by_id;
    for (const auto& c : set.candidates) by_id[c.candidate_id] = &c;

    for (const auto& pair : pairs::build_pairs(set, scheme)) {
      const auto e_w = provider.embed(embed_model, by_id.at(pair.winner_id)->text);
      const auto e_l = provider.embed(embed_model, by_id.at(pair.loser_id)->text);
      training.push_back({pair.difficulty, satisfaction::build_features(e_p, e_w),
                          satisfaction::build_features(e_p, e_l)});
    }
  }
  return training;
}

int cmd_evaluate(const std::string& units_path, const std::string& profiles_path,
                 const std::string& candidates_path, const std::string& metrics_csv,
                 const std::string& provider_path, const std::string& scorer_path,
                 const std::string& cache_dir, const std::string& out_path,
                 const std::string& format, unsigned jobs, std::uint64_t seed, bool strict,
                 bool deterministic) {
  pipeline::EvaluateOptions options;
  options.units = corpus::load_units(units_path);
  options.profiles = corpus::load_profiles(profiles_path);
  options.candidates = corpus::load_candidates(candidates_path);
  options.metrics = parse_metrics(metrics_csv);
  options.provider = open_provider(provider_path, cache_dir);
  if (!scorer_path.empty())
    options.scorer = satisfaction::ScorerParameters::load(scorer_path);
  options.jobs = jobs;
  options.seed = seed;
  options.deterministic = deterministic;
  options.config_description = metrics_csv + "|" + format;

  const auto report = pipeline::run_evaluate(options);
  std::string content;
  if (format == "json")
    content = pipeline::report_to_json(report);
  else if (format == "csv")
    content = pipeline::report_to_csv(report);
  else if (format == "md")
    content = pipeline::report_to_markdown(report);
  else
    throw ConfigError("unknown format '" + format + "'");
  write_file(out_path, content);

  if (strict && pipeline::any_failure(report)) return 1;
  return 0;
}

int cmd_pairs_build(const std::string& candidates_path, const std::string& scheme_name,
                    const std::string& out_path) {
  const auto candidates = corpus::load_candidates(candidates_path);
  const auto sets = corpus::group_ranked_sets(candidates);
  const auto scheme = pairs::scheme_from_string(scheme_name);
  std::ostringstream out;
  for (const auto& set : sets)
    for (const auto& pair : pairs::build_pairs(set, scheme))
      out << pairs::serialize_pair(pair) << "\n";
  write_file(out_path, out.str());
  return 0;
}

int cmd_train(const std::string& candidates_path, const std::string& profiles_path,
              const std::string& provider_path, const std::string& cache_dir,
              const std::string& scheme_name, const satisfaction::TrainingConfig& config,
              const std::string& out_path, const std::string& log_path) {
  const auto provider = open_provider(provider_path, cache_dir);
  const auto profiles = corpus::load_profiles(profiles_path);
  const auto sets = corpus::group_ranked_sets(corpus::load_candidates(candidates_path));
  const auto training = pairs_to_training(sets, profiles, *provider, "",
                                          pairs::scheme_from_string(scheme_name));
  const auto result = satisfaction::train(training, config);
  result.params.save(out_path);
  if (!log_path.empty()) {
    std::ostringstream log;
    for (const auto& e : result.log)
      log << json{{"phase", e.phase},
                  {"epoch", e.epoch},
                  {"difficulty", e.difficulty},
                  {"mean_loss", e.mean_loss}}
                 .dump()
          << "\n";
    write_file(log_path, log.str());
  }
  std::cerr << "trained on " << training.size() << " pairs; model written to " << out_path
            << "\n";
  return 0;
}

int cmd_score(const std::string& scorer_path, const std::string& provider_path,
              const std::string& cache_dir, const std::string& profiles_path,
              const std::string& candidates_path, const std::string& out_path) {
  const auto provider = open_provider(provider_path, cache_dir);
  const auto scorer = satisfaction::ScorerParameters::load(scorer_path);
  const auto profiles = corpus::load_profiles(profiles_path);
  const auto candidates = corpus::load_candidates(candidates_path);
  std::ostringstream out;
  for (const auto& c : candidates) {
    const corpus::PreferenceProfile* profile = nullptr;
    for (const auto& p : profiles)
      if (p.profile_id == c.profile_id) profile = &p;
    if (!profile) throw ConfigError("no profile '" + c.profile_id + "'");
    const double s = satisfaction::satisfaction_score(scorer, *provider, "", *profile, c.text);
    out << json{{"candidate_id", c.candidate_id}, {"profile_id", c.profile_id}, {"s_sat", s}}
               .dump()
        << "\n";
  }
  write_file(out_path, out.str());
  return 0;
}

int cmd_compare(const std::string& scores_path, const std::string& out_path) {
  json j;
  try {
    j = json::parse(read_file(scores_path));
  } catch (const json::exception& e) {
    throw ConfigError("scores file: " + std::string(e.what()));
  }
  const auto methods = j.at("methods").get<std::vector<std::string>>();
  const auto matrix = j.at("scores").get<std::vector<std::vector<double>>>();
  if (methods.size() != matrix.size())
    throw ConfigError("scores file: methods/scores length mismatch");
  const auto stats = satisfaction::win_rate_top1(matrix);
  json out = json::array();
  for (std::size_t m = 0; m < methods.size(); ++m)
    out.push_back({{"method", methods[m]},
                   {"win_rate", stats[m].win_rate},
                   {"top1_rate", stats[m].top1_rate}});
  write_file(out_path, out.dump(2) + "\n");
  return 0;
}

int cmd_serve(int port, const std::string& scorer_path, const std::string& provider_path,
              const std::string& cache_dir) {
  auto provider = open_provider(provider_path, cache_dir);
  reward::RewardService service(provider, "");
  service.load_scorer(satisfaction::ScorerParameters::load(scorer_path));
  std::cerr << "serving rewards on port " << port << "\n";
  return service.serve("0.0.0.0", port);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Evaluation and reward harness for preference-aligned story rewriting"};
  app.require_subcommand(1);

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "Score candidates on the selected metrics");
  std::string units_path, profiles_path, candidates_path, provider_path, scorer_path;
  std::string cache_dir, out_path, format = "json";
  std::string metrics_csv = "fidelity,coherence,satisfaction";
  unsigned jobs = 0;
  std::uint64_t seed = 0;
  bool strict = false, deterministic = false;
  evaluate->add_option("--units", units_path)->required();
  evaluate->add_option("--profiles", profiles_path)->required();
  evaluate->add_option("--candidates", candidates_path)->required();
  evaluate->add_option("--metrics", metrics_csv, "comma list of fidelity,coherence,satisfaction");
  evaluate->add_option("--provider", provider_path)->required();
  evaluate->add_option("--scorer", scorer_path);
  evaluate->add_option("--cache", cache_dir);
  evaluate->add_option("--out", out_path);
  evaluate->add_option("--format", format)->check(CLI::IsMember({"json", "csv", "md"}));
  evaluate->add_option("--jobs", jobs);
  evaluate->add_option("--seed", seed);
  evaluate->add_flag("--strict", strict);
  evaluate->add_flag("--deterministic", deterministic);

  // pairs build
  auto* pairs_cmd = app.add_subcommand("pairs", "Pairwise comparison construction");
  auto* pairs_build = pairs_cmd->add_subcommand("build", "Build comparisons from ranked sets");
  std::string pb_candidates, pb_scheme = "all_pairs", pb_out;
  pairs_build->add_option("--candidates", pb_candidates)->required();
  pairs_build->add_option("--scheme", pb_scheme)->check(CLI::IsMember({"consecutive", "all_pairs"}));
  pairs_build->add_option("--out", pb_out);

  // eval-model train/score/compare
  auto* eval_model = app.add_subcommand("eval-model", "Satisfaction scorer lifecycle");
  auto* train = eval_model->add_subcommand("train", "Train the satisfaction scorer");
  std::string tr_candidates, tr_profiles, tr_provider, tr_cache, tr_scheme = "all_pairs";
  std::string tr_out = "scorer.json", tr_log;
  storylens::satisfaction::TrainingConfig tr_config;
  train->add_option("--candidates", tr_candidates)->required();
  train->add_option("--profiles", tr_profiles)->required();
  train->add_option("--provider", tr_provider)->required();
  train->add_option("--cache", tr_cache);
  train->add_option("--scheme", tr_scheme)->check(CLI::IsMember({"consecutive", "all_pairs"}));
  train->add_option("--step-size", tr_config.step_size);
  train->add_option("--epochs", tr_config.epochs_per_phase, "epochs per difficulty stage");
  train->add_option("--hidden", tr_config.hidden);
  train->add_option("--batch-size", tr_config.batch_size);
  train->add_option("--seed", tr_config.seed);
  train->add_option("--out", tr_out);
  train->add_option("--log", tr_log);

  auto* score = eval_model->add_subcommand("score", "Score candidates with a trained scorer");
  std::string sc_scorer, sc_provider, sc_cache, sc_profiles, sc_candidates, sc_out;
  score->add_option("--scorer", sc_scorer)->required();
  score->add_option("--provider", sc_provider)->required();
  score->add_option("--cache", sc_cache);
  score->add_option("--profiles", sc_profiles)->required();
  score->add_option("--candidates", sc_candidates)->required();
  score->add_option("--out", sc_out);

  auto* compare = eval_model->add_subcommand("compare", "Win-rate / top-1 over a score matrix");
  std::string cp_scores, cp_out;
  compare->add_option("--scores", cp_scores)->required();
  compare->add_option("--out", cp_out);

  // serve
  auto* serve = app.add_subcommand("serve", "Serve the GRPO reward over HTTP");
  int port = 8080;
  std::string sv_scorer, sv_provider, sv_cache;
  serve->add_option("--port", port)->required();
  serve->add_option("--scorer", sv_scorer)->required();
  serve->add_option("--provider", sv_provider)->required();
  serve->add_option("--cache", sv_cache);

  // report render
  auto* report = app.add_subcommand("report", "Report post-processing");
  auto* render = report->add_subcommand("render", "Render a JSON report as a markdown table");
  std::string rr_in, rr_out;
  render->add_option("--in", rr_in)->required();
  render->add_option("--out", rr_out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? 0 : 2;
  }

  try {
    if (*evaluate)
      return cmd_evaluate(units_path, profiles_path, candidates_path, metrics_csv,
                          provider_path, scorer_path, cache_dir, out_path, format, jobs, seed,
                          strict, deterministic);
    if (*pairs_build) return cmd_pairs_build(pb_candidates, pb_scheme, pb_out);
    if (*train)
      return cmd_train(tr_candidates, tr_profiles, tr_provider, tr_cache, tr_scheme, tr_config,
                       tr_out, tr_log);
    if (*score)
      return cmd_score(sc_scorer, sc_provider, sc_cache, sc_profiles, sc_candidates, sc_out);
    if (*compare) return cmd_compare(cp_scores, cp_out);
    if (*serve) return cmd_serve(port, sv_scorer, sv_provider, sv_cache);
    if (*render) {
      write_file(rr_out, storylens::pipeline::render_markdown_from_json(read_file(rr_in)));
      return 0;
    }
    std::cerr << "no subcommand selected\n";
    return 2;
  } catch (const storylens::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const storylens::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const storylens::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
