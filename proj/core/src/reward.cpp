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

#include "storylens/reward.hpp"

#include <cmath>

namespace storylens::reward {

std::pair<double, double> length_penalty(const std::string& original_text,
                                         const std::string& rewrite_text) {
  const std::size_t original_words = corpus::word_count(original_text);
  if (original_words == 0) throw PreconditionError("length_penalty: empty original text");
  const double rho = static_cast<double>(corpus::word_count(rewrite_text)) /
                     static_cast<double>(original_words);
  const double deviation = std::max({0.0, kBandLow - rho, rho - kBandHigh});
  double penalty;
  if (deviation <= kHuberDelta)
    penalty = deviation * deviation / (2.0 * kHuberDelta);
  else
    penalty = deviation - kHuberDelta / 2.0;
  return {rho, -penalty};
}

double composite_reward(double r_rm, double r_length) {
  if (!std::isfinite(r_rm) || !std::isfinite(r_length))
    throw PreconditionError("composite_reward: non-finite input");
  return r_rm + kLengthWeight * r_length;
}

std::vector<double> group_advantages(const std::vector<double>& rewards) {
  if (rewards.size() < 2)
    throw PreconditionError("group_advantages: group size must be >= 2");

  double mean = 0.0;
  for (double r : rewards) mean += r;
  mean /= static_cast<double>(rewards.size());

  double var = 0.0;
  bool all_equal = true;
  for (double r : rewards) {
    var += (r - mean) * (r - mean);
    if (r != rewards.front()) all_equal = false;
  }
  if (all_equal) return std::vector<double>(rewards.size(), 0.0);

  const double std_pop = std::sqrt(var / static_cast<double>(rewards.size()));
  const double denom = std_pop + 1e-8;
  std::vector<double> advantages(rewards.size());
  for (std::size_t i = 0; i < rewards.size(); ++i) advantages[i] = (rewards[i] - mean) / denom;
  return advantages;
}

}  // namespace storylens::reward
