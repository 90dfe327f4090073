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

#ifndef STORYLENS_SERVICE_HPP_
#define STORYLENS_SERVICE_HPP_

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "storylens/reward.hpp"

namespace httplib {
class Server;
}

namespace storylens::reward {

class ServiceError : public Error {
 public:
  using Error::Error;
};

// GRPO-facing reward endpoint. The scorer is loaded once and read-only
// thereafter; per-request computation is independent.
class RewardService {
 public:
  RewardService(std::shared_ptr<providers::Provider> provider, std::string embed_model);

  void load_scorer(satisfaction::ScorerParameters params);
  bool scorer_loaded() const { return scorer_.has_value(); }
  const std::string& scorer_version() const;

  // Throws ServiceError("scorer not loaded") without a scorer.
  RewardBreakdown compute(const corpus::PreferenceProfile& profile,
                          const std::string& original_text,
                          const std::string& rewrite_text) const;

  struct GroupResult {
    std::vector<RewardBreakdown> items;
    std::vector<double> advantages;
  };
  GroupResult compute_group(const corpus::PreferenceProfile& profile,
                            const std::string& original_text,
                            const std::vector<std::string>& rewrites) const;

  // Registers POST /v1/reward, POST /v1/reward/group, GET /v1/health.
  void attach(httplib::Server& server) const;

  // Blocking serve loop.
  int serve(const std::string& host, int port) const;

 private:
  std::shared_ptr<providers::Provider> provider_;
  std::string embed_model_;
  std::optional<satisfaction::ScorerParameters> scorer_;
};

}  // namespace storylens::reward

#endif  // STORYLENS_SERVICE_HPP_
