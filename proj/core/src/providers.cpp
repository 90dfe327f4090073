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

#include "storylens/providers.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>
#include <thread>

#include "httplib.h"
#include "json.hpp"

namespace storylens {

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw Error("sha256 digest failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xF]);
  }
  return out;
}

}  // namespace storylens

namespace storylens::providers {

using nlohmann::json;

std::string chat_cache_key(const ChatRequest& req) {
  json j = {{"kind", "chat"},
            {"model_id", req.model_id},
            {"system", req.system},
            {"user", req.user},
            {"temperature", req.temperature},
            {"max_output", req.max_output}};
  return sha256_hex(j.dump());
}

std::string embed_cache_key(const std::string& model_id, const std::string& text) {
  json j = {{"kind", "embed"}, {"model_id", model_id}, {"text", text}};
  return sha256_hex(j.dump());
}

double cosine(const EmbeddingVector& u, const EmbeddingVector& v) {
  if (u.dimension() != v.dimension())
    throw PreconditionError("cosine: dimension mismatch (" + std::to_string(u.dimension()) +
                            " vs " + std::to_string(v.dimension()) + ")");
  double dot = 0.0, nu = 0.0, nv = 0.0;
  for (std::size_t i = 0; i < u.values.size(); ++i) {
    dot += u.values[i] * v.values[i];
    nu += u.values[i] * u.values[i];
    nv += v.values[i] * v.values[i];
  }
  if (nu == 0.0 || nv == 0.0) throw PreconditionError("cosine: zero vector");
  const double c = dot / (std::sqrt(nu) * std::sqrt(nv));
  return std::min(1.0, std::max(-1.0, c));
}

namespace {

void validate_request(const ChatRequest& req) {
  if (req.user.empty()) throw PreconditionError("chat request: empty user message");
  if (req.temperature < 0.0 || req.temperature > 2.0)
    throw PreconditionError("chat request: temperature outside [0, 2]");
  if (req.max_output <= 0) throw PreconditionError("chat request: max_output must be positive");
}

}  // namespace

// ---------------------------------------------------------------------------
// ScriptedProvider

std::shared_ptr<ScriptedProvider> ScriptedProvider::from_file(
    const std::filesystem::path& path) {
  auto provider = std::make_shared<ScriptedProvider>();
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open script file " + path.string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw ParseError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
    if (j.contains("embed")) {
      provider->add_embedding(j["embed"].get<std::string>(),
                              j["vector"].get<std::vector<double>>());
      continue;
    }
    Match mode = Match::Exact;
    const std::string m = j.value("mode", "exact");
    if (m == "hash") mode = Match::Hash;
    else if (m == "contains") mode = Match::Contains;
    else if (m == "any") mode = Match::Any;
    else if (m != "exact")
      throw ParseError(path.string() + ":" + std::to_string(line_no) + ": unknown mode '" + m + "'");
    provider->add_response(j.at("match").get<std::string>(),
                           j.at("response").get<std::string>(), mode);
  }
  return provider;
}

void ScriptedProvider::add_response(const std::string& match, const std::string& response,
                                    Match mode) {
  std::lock_guard<std::mutex> lock(mu_);
  entries_.push_back({match, response, mode});
}

void ScriptedProvider::add_embedding(const std::string& text, std::vector<double> vector) {
  std::lock_guard<std::mutex> lock(mu_);
  embeddings_[text] = std::move(vector);
}

std::string ScriptedProvider::chat(const ChatRequest& req) {
  validate_request(req);
  ++chat_calls_;
  std::lock_guard<std::mutex> lock(mu_);
  const std::string key = chat_cache_key(req);
  for (const auto& e : entries_)
    if (e.mode == Match::Exact && e.match == req.user) return e.response;
  for (const auto& e : entries_)
    if (e.mode == Match::Hash && e.match == key) return e.response;
  for (const auto& e : entries_)
    if (e.mode == Match::Contains && req.user.find(e.match) != std::string::npos)
      return e.response;
  for (const auto& e : entries_)
    if (e.mode == Match::Any) return e.response;
  throw ConfigError("scripted provider: no response registered for request (key " + key + ")");
}

EmbeddingVector ScriptedProvider::embed(const std::string& model_id, const std::string& text) {
  if (text.empty()) throw PreconditionError("embed: empty text");
  ++embed_calls_;
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = embeddings_.find(text);
    if (it != embeddings_.end()) return EmbeddingVector{it->second};
  }
  return hash_projection(model_id, text);
}

EmbeddingVector ScriptedProvider::hash_projection(const std::string& model_id,
                                                  const std::string& text,
                                                  std::size_t dimension) {
  // Seed from the content hash so vectors are stable across platforms.
  const std::string hex = sha256_hex(model_id + "\x1f" + text);
  std::uint64_t seed = 0;
  for (int i = 0; i < 16; ++i) seed = seed * 16 + (hex[i] <= '9' ? hex[i] - '0' : hex[i] - 'a' + 10);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  EmbeddingVector v;
  v.values.resize(dimension);
  double norm = 0.0;
  for (auto& x : v.values) {
    x = normal(rng);
    norm += x * x;
  }
  norm = std::sqrt(norm);
  for (auto& x : v.values) x /= norm;
  return v;
}

// ---------------------------------------------------------------------------
// HttpProvider

HttpProvider::HttpProvider(ProviderConfig config) : config_(std::move(config)) {
  if (config_.max_retries < 0 || config_.max_retries > 10)
    throw ConfigError("max_retries must be in [0, 10]");
  if (config_.endpoint.empty()) throw ConfigError("http provider: endpoint is required");
}

std::string HttpProvider::id() const {
  return "http:" + config_.endpoint + ":" + config_.chat_model + "/" + config_.embed_model;
}

std::string HttpProvider::post_with_retry(const std::string& path, const std::string& body) {
  const char* key = nullptr;
  if (!config_.api_key_env.empty()) key = std::getenv(config_.api_key_env.c_str());

  std::string last_error;
  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    if (attempt > 0) {
      const auto delay = config_.backoff_base * (1 << (attempt - 1));
      std::this_thread::sleep_for(delay);
    }
    httplib::Client client(config_.endpoint);
    client.set_connection_timeout(10, 0);
    client.set_read_timeout(120, 0);
    httplib::Headers headers;
    if (key) headers.emplace("Authorization", std::string("Bearer ") + key);
    auto res = client.Post(path, headers, body, "application/json");
    if (!res) {
      last_error = "connection failed (" + httplib::to_string(res.error()) + ")";
      continue;
    }
    if (res->status >= 200 && res->status < 300) return res->body;
    last_error = "HTTP " + std::to_string(res->status) + ": " + res->body;
    // 4xx other than 429 will not succeed on retry.
    if (res->status >= 400 && res->status < 500 && res->status != 429)
      throw TransportError(path + ": " + last_error);
  }
  throw TransportError(path + ": retries exhausted: " + last_error);
}

std::string HttpProvider::chat(const ChatRequest& req) {
  validate_request(req);
  json messages = json::array();
  if (!req.system.empty()) messages.push_back({{"role", "system"}, {"content", req.system}});
  messages.push_back({{"role", "user"}, {"content", req.user}});
  json body = {{"model", req.model_id.empty() ? config_.chat_model : req.model_id},
               {"messages", messages},
               {"temperature", req.temperature},
               {"max_tokens", req.max_output}};
  const std::string reply = post_with_retry("/v1/chat/completions", body.dump());
  try {
    json j = json::parse(reply);
    return j.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const json::exception& e) {
    throw TransportError(std::string("malformed chat completion response: ") + e.what());
  }
}

EmbeddingVector HttpProvider::embed(const std::string& model_id, const std::string& text) {
  if (text.empty()) throw PreconditionError("embed: empty text");
  json body = {{"model", model_id.empty() ? config_.embed_model : model_id}, {"input", text}};
  const std::string reply = post_with_retry("/v1/embeddings", body.dump());
  try {
    json j = json::parse(reply);
    return EmbeddingVector{j.at("data").at(0).at("embedding").get<std::vector<double>>()};
  } catch (const json::exception& e) {
    throw TransportError(std::string("malformed embedding response: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// CachingProvider

CachingProvider::CachingProvider(std::shared_ptr<Provider> inner,
                                 std::filesystem::path cache_dir)
    : inner_(std::move(inner)), cache_dir_(std::move(cache_dir)) {
  std::filesystem::create_directories(cache_dir_);
}

std::optional<std::string> CachingProvider::read_entry(const std::string& key) const {
  const auto path = cache_dir_ / (key + ".txt");
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void CachingProvider::write_entry(const std::string& key, const std::string& value) const {
  const auto path = cache_dir_ / (key + ".txt");
  const auto tmp = cache_dir_ / (key + ".tmp." + std::to_string(
      std::hash<std::thread::id>{}(std::this_thread::get_id())));
  {
    std::ofstream out(tmp, std::ios::binary);
    out << value;
  }
  std::filesystem::rename(tmp, path);
}

std::string CachingProvider::chat(const ChatRequest& req) {
  const std::string key = chat_cache_key(req);
  if (auto cached = read_entry(key)) {
    ++hits_;
    return *cached;
  }
  const std::string reply = inner_->chat(req);
  write_entry(key, reply);
  return reply;
}

EmbeddingVector CachingProvider::embed(const std::string& model_id, const std::string& text) {
  const std::string key = embed_cache_key(model_id, text);
  if (auto cached = read_entry(key)) {
    ++hits_;
    return EmbeddingVector{json::parse(*cached).get<std::vector<double>>()};
  }
  EmbeddingVector v = inner_->embed(model_id, text);
  write_entry(key, json(v.values).dump());
  return v;
}

// ---------------------------------------------------------------------------

std::shared_ptr<Provider> provider_from_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open provider config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("provider config " + path.string() + ": " + e.what());
  }
  const std::string type = j.value("type", "");
  std::shared_ptr<Provider> provider;
  if (type == "scripted") {
    if (j.contains("script"))
      provider = ScriptedProvider::from_file(j["script"].get<std::string>());
    else
      provider = std::make_shared<ScriptedProvider>();
  } else if (type == "http") {
    ProviderConfig config;
    config.endpoint = j.value("endpoint", "");
    config.api_key_env = j.value("api_key_env", std::string("STORYLENS_API_KEY"));
    config.chat_model = j.value("chat_model", "");
    config.embed_model = j.value("embed_model", "");
    config.max_retries = j.value("max_retries", 3);
    config.backoff_base = std::chrono::milliseconds(j.value("backoff_ms", 200));
    provider = std::make_shared<HttpProvider>(config);
  } else {
    throw ConfigError("provider config: unknown type '" + type + "'");
  }
  if (j.contains("cache_dir"))
    provider = std::make_shared<CachingProvider>(provider, j["cache_dir"].get<std::string>());
  return provider;
}

}  // namespace storylens::providers
