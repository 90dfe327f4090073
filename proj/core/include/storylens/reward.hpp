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

#ifndef STORYLENS_REWARD_HPP_
#define STORYLENS_REWARD_HPP_

#include <string>
#include <utility>
#include <vector>

#include "storylens/corpus.hpp"
#include "storylens/providers.hpp"
#include "storylens/satisfaction.hpp"

namespace storylens::reward {

inline constexpr double kLengthWeight = 0.15;
inline constexpr double kBandLow = 0.7;
inline constexpr double kBandHigh = 1.3;
inline constexpr double kHuberDelta = 0.3;

struct RewardBreakdown {
  double r_rm = 0.0;
  double length_ratio = 0.0;  // rho
  double r_length = 0.0;      // <= 0; 0 iff rho in [0.7, 1.3]
  double r_total = 0.0;       // r_rm + 0.15 * r_length
};

// rho = words(rewrite)/words(original); deviation d = max(0, 0.7-rho,
// rho-1.3); r_length = -H(d) with H quadratic for d <= delta, linear beyond.
std::pair<double, double> length_penalty(const std::string& original_text,
                                         const std::string& rewrite_text);

double composite_reward(double r_rm, double r_length);

// A_i = (r_i - mean) / (std_pop + 1e-8); constant groups map to all zeros.
std::vector<double> group_advantages(const std::vector<double>& rewards);

}  // namespace storylens::reward

#endif  // STORYLENS_REWARD_HPP_
