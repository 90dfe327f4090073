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

#include "storylens/service.hpp"

#include "httplib.h"
#include "json.hpp"

namespace storylens::reward {

using nlohmann::json;

namespace {

corpus::PreferenceProfile profile_from_json(const json& j) {
  corpus::PreferenceProfile p;
  p.profile_id = j.value("profile_id", "");
  p.plot = j.value("plot", "");
  p.characters = j.value("characters", "");
  p.language = j.value("language", "");
  p.worldview = j.value("worldview", "");
  p.theme = j.value("theme", "");
  return p;
}

json breakdown_to_json(const RewardBreakdown& b) {
  return {{"r_rm", b.r_rm},
          {"length_ratio", b.length_ratio},
          {"r_length", b.r_length},
          {"r_total", b.r_total}};
}

void reply_error(httplib::Response& res, int status, const std::string& reason) {
  res.status = status;
  res.set_content(json{{"error", reason}}.dump(), "application/json");
}

}  // namespace

RewardService::RewardService(std::shared_ptr<providers::Provider> provider,
                             std::string embed_model)
    : provider_(std::move(provider)), embed_model_(std::move(embed_model)) {}

void RewardService::load_scorer(satisfaction::ScorerParameters params) {
  scorer_ = std::move(params);
}

const std::string& RewardService::scorer_version() const {
  static const std::string kNone = "none";
  return scorer_ ? scorer_->version : kNone;
}

RewardBreakdown RewardService::compute(const corpus::PreferenceProfile& profile,
                                       const std::string& original_text,
                                       const std::string& rewrite_text) const {
  if (!scorer_) throw ServiceError("scorer not loaded");
  RewardBreakdown b;
  b.r_rm = satisfaction::satisfaction_score(*scorer_, *provider_, embed_model_, profile,
                                            rewrite_text);
  auto [rho, r_length] = length_penalty(original_text, rewrite_text);
  b.length_ratio = rho;
  b.r_length = r_length;
  b.r_total = composite_reward(b.r_rm, b.r_length);
  return b;
}

RewardService::GroupResult RewardService::compute_group(
    const corpus::PreferenceProfile& profile, const std::string& original_text,
    const std::vector<std::string>& rewrites) const {
  GroupResult result;
  result.items.reserve(rewrites.size());
  std::vector<double> totals;
  totals.reserve(rewrites.size());
  for (const auto& rewrite : rewrites) {
    result.items.push_back(compute(profile, original_text, rewrite));
    totals.push_back(result.items.back().r_total);
  }
  result.advantages = group_advantages(totals);
  return result;
}

void RewardService::attach(httplib::Server& server) const {
  server.Get("/v1/health", [this](const httplib::Request&, httplib::Response& res) {
    res.set_content(json{{"status", "ok"}, {"scorer_version", scorer_version()}}.dump(),
                    "application/json");
  });

  server.Post("/v1/reward", [this](const httplib::Request& req, httplib::Response& res) {
    json body;
    try {
      body = json::parse(req.body);
    } catch (const json::exception& e) {
      reply_error(res, 400, std::string("invalid JSON body: ") + e.what());
      return;
    }
    try {
      const auto breakdown = compute(profile_from_json(body.at("profile")),
                                     body.at("original_text").get<std::string>(),
                                     body.at("rewrite_text").get<std::string>());
      res.set_content(breakdown_to_json(breakdown).dump(), "application/json");
    } catch (const json::exception& e) {
      reply_error(res, 400, std::string("missing field: ") + e.what());
    } catch (const PreconditionError& e) {
      reply_error(res, 400, e.what());
    } catch (const Error& e) {
      reply_error(res, 500, e.what());
    }
  });

  server.Post("/v1/reward/group", [this](const httplib::Request& req, httplib::Response& res) {
    json body;
    try {
      body = json::parse(req.body);
    } catch (const json::exception& e) {
      reply_error(res, 400, std::string("invalid JSON body: ") + e.what());
      return;
    }
    try {
      const auto result = compute_group(profile_from_json(body.at("profile")),
                                        body.at("original_text").get<std::string>(),
                                        body.at("rewrites").get<std::vector<std::string>>());
      json items = json::array();
      for (const auto& b : result.items) items.push_back(breakdown_to_json(b));
      res.set_content(json{{"items", items}, {"advantages", result.advantages}}.dump(),
                      "application/json");
    } catch (const json::exception& e) {
      reply_error(res, 400, std::string("missing field: ") + e.what());
    } catch (const PreconditionError& e) {
      reply_error(res, 400, e.what());
    } catch (const Error& e) {
      reply_error(res, 500, e.what());
    }
  });
}

int RewardService::serve(const std::string& host, int port) const {
  httplib::Server server;
  attach(server);
  return server.listen(host, port) ? 0 : 1;
}

}  // namespace storylens::reward
