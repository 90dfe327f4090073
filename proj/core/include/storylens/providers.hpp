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

#ifndef STORYLENS_PROVIDERS_HPP_
#define STORYLENS_PROVIDERS_HPP_

#include <atomic>
#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "storylens/common.hpp"

namespace storylens::providers {

struct ChatRequest {
  std::string model_id;
  std::string system;
  std::string user;          // must be non-empty
  double temperature = 0.0;  // [0, 2]
  int max_output = 2048;     // > 0
};

// Canonical serialization used for cache keys and scripted hash matching.
std::string chat_cache_key(const ChatRequest& req);
std::string embed_cache_key(const std::string& model_id, const std::string& text);

struct EmbeddingVector {
  std::vector<double> values;

  std::size_t dimension() const { return values.size(); }
};

// dot(u,v)/(|u||v|), clamped to [-1,1]. Throws on dimension mismatch or a
// zero vector.
double cosine(const EmbeddingVector& u, const EmbeddingVector& v);

struct ProviderConfig {
  std::string endpoint;  // e.g. "http://localhost:8089"
  std::string api_key_env = "STORYLENS_API_KEY";
  std::string chat_model;
  std::string embed_model;
  int max_retries = 3;  // <= 10
  std::chrono::milliseconds backoff_base{200};
  std::optional<std::filesystem::path> cache_dir;
};

class Provider {
 public:
  virtual ~Provider() = default;
  virtual std::string chat(const ChatRequest& req) = 0;
  virtual EmbeddingVector embed(const std::string& model_id, const std::string& text) = 0;
  virtual std::string id() const = 0;
};

// Deterministic test double. Chat replies come from a registered script;
// embeddings default to a seeded hash projection onto the unit sphere so
// distinct texts get stable, distinct vectors. Performs no network I/O.
class ScriptedProvider : public Provider {
 public:
  enum class Match { Exact, Hash, Contains, Any };

  ScriptedProvider() = default;

  // Script file: JSONL of {"match": <key-hash or literal user text>,
  // "response": <text>} with optional "mode": "exact"|"hash"|"contains"|"any".
  static std::shared_ptr<ScriptedProvider> from_file(const std::filesystem::path& path);

  void add_response(const std::string& match, const std::string& response,
                    Match mode = Match::Exact);
  void add_embedding(const std::string& text, std::vector<double> vector);

  std::string chat(const ChatRequest& req) override;
  EmbeddingVector embed(const std::string& model_id, const std::string& text) override;
  std::string id() const override { return "scripted"; }

  std::size_t chat_calls() const { return chat_calls_.load(); }
  std::size_t embed_calls() const { return embed_calls_.load(); }
  std::size_t transport_calls() const { return 0; }

  static EmbeddingVector hash_projection(const std::string& model_id,
                                         const std::string& text,
                                         std::size_t dimension = 64);

 private:
  struct Entry {
    std::string match;
    std::string response;
    Match mode;
  };
  std::vector<Entry> entries_;
  std::map<std::string, std::vector<double>> embeddings_;
  std::atomic<std::size_t> chat_calls_{0};
  std::atomic<std::size_t> embed_calls_{0};
  mutable std::mutex mu_;
};

// Chat-completion / embedding client over the common JSON wire shape.
// Retries transient failures with exponential backoff.
class HttpProvider : public Provider {
 public:
  explicit HttpProvider(ProviderConfig config);

  std::string chat(const ChatRequest& req) override;
  EmbeddingVector embed(const std::string& model_id, const std::string& text) override;
  std::string id() const override;

 private:
  std::string post_with_retry(const std::string& path, const std::string& body);
  ProviderConfig config_;
};

// Content-addressed file cache in front of any provider. Writers use
// write-then-rename so concurrent readers never observe partial entries.
class CachingProvider : public Provider {
 public:
  CachingProvider(std::shared_ptr<Provider> inner, std::filesystem::path cache_dir);

  std::string chat(const ChatRequest& req) override;
  EmbeddingVector embed(const std::string& model_id, const std::string& text) override;
  std::string id() const override { return inner_->id() + "+cache"; }

  std::size_t hits() const { return hits_.load(); }

 private:
  std::optional<std::string> read_entry(const std::string& key) const;
  void write_entry(const std::string& key, const std::string& value) const;

  std::shared_ptr<Provider> inner_;
  std::filesystem::path cache_dir_;
  std::atomic<std::size_t> hits_{0};
};

// Builds a provider from a JSON config file:
//   {"type":"scripted","script":<path>?,"cache_dir":<path>?}
//   {"type":"http","endpoint":...,"chat_model":...,"embed_model":...,
//    "api_key_env":?,"max_retries":?,"backoff_ms":?,"cache_dir":?}
std::shared_ptr<Provider> provider_from_config_file(const std::filesystem::path& path);

}  // namespace storylens::providers

#endif  // STORYLENS_PROVIDERS_HPP_
