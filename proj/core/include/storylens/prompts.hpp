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

#ifndef STORYLENS_PROMPTS_HPP_
#define STORYLENS_PROMPTS_HPP_

#include <filesystem>
#include <map>
#include <string>

#include "storylens/common.hpp"

namespace storylens::prompts {

struct PromptPair {
  std::string system;
  std::string user;  // with {placeholder} slots
};

// Versioned registry of judge prompts, keyed by metric name. Exact wording is
// configuration: a registry can be loaded from JSON and its version is
// recorded in report provenance.
class PromptRegistry {
 public:
  static PromptRegistry defaults();
  static PromptRegistry from_file(const std::filesystem::path& path);

  const PromptPair& get(const std::string& name) const;
  void set(const std::string& name, PromptPair pair);
  const std::string& version() const { return version_; }

  // Replaces every "{key}" in the user template with values[key].
  std::string render(const std::string& name,
                     const std::map<std::string, std::string>& values) const;

 private:
  std::map<std::string, PromptPair> prompts_;
  std::string version_ = "default-1";
};

}  // namespace storylens::prompts

#endif  // STORYLENS_PROMPTS_HPP_
