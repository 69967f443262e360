// Copyright 2026 The AmbigNLG Toolkit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <atomic>
#include <chrono>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <semaphore>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "ambig/llm.hpp"

namespace ambig::llm {

std::string sha256_hex(std::string_view data);

// Per-sample completion cache. With a directory, each entry is stored as
// <dir>/<key>.json holding {request, sample_index, text, created_at}.
// Entries are immutable: a second put for the same key is ignored.
class CompletionCache {
 public:
  CompletionCache() = default;  // memory only
  explicit CompletionCache(std::filesystem::path dir);

  static std::string key_for(const ChatRequest& request, int sample_index);

  std::optional<std::string> get(const std::string& key);
  void put(const std::string& key, const ChatRequest& request, int sample_index,
           const std::string& text);

  const std::optional<std::filesystem::path>& dir() const { return dir_; }

 private:
  std::optional<std::filesystem::path> dir_;
  std::shared_mutex mu_;
  std::unordered_map<std::string, std::string> memory_;
};

struct GatewayOptions {
  std::optional<long> max_calls;  // provider invocations per run
  int max_in_flight = 8;
  int max_attempts = 3;
  std::chrono::milliseconds initial_backoff{200};
  double backoff_multiplier = 2.0;
  std::function<void(const std::string&)> log;
};

struct GatewayStats {
  long provider_calls = 0;  // every attempt, including failed ones
  long cache_hits = 0;
  long cache_misses = 0;
};

class Gateway {
 public:
  Gateway(std::shared_ptr<Provider> provider, std::shared_ptr<CompletionCache> cache,
          GatewayOptions options = {});

  // Cache first; on a miss, calls the provider with retries and stores every
  // sample. Throws Error(kBudgetExceeded) / Error(kProviderUnavailable).
  std::vector<std::string> complete_cached(const ChatRequest& request);

  bool supports_embed() const { return provider_->supports_embed(); }
  std::vector<Embedding> embed(const std::vector<std::string>& texts);

  Provider& provider() { return *provider_; }
  GatewayStats stats() const;

 private:
  std::vector<std::string> call_with_retry(const ChatRequest& request);
  void log(const std::string& msg) const;

  std::shared_ptr<Provider> provider_;
  std::shared_ptr<CompletionCache> cache_;
  GatewayOptions options_;
  std::counting_semaphore<1024> in_flight_;
  std::atomic<long> calls_{0}, hits_{0}, misses_{0};
};

// Cosine of embed({a, b}), clamped to [-1, 1]. Throws Error(kEmbedUnsupported).
double semantic_similarity(Gateway& gateway, const std::string& a, const std::string& b);
double cosine(const Embedding& a, const Embedding& b);

// Deterministic scripted provider. A script is JSON:
//
//   {
//     "rules": [
//       {"kind": "Downstream",              // optional PromptKind name
//        "contains": ["..."],               // all must occur in system+user
//        "contains_any": ["..."],           // at least one must occur
//        "not_contains": ["..."],
//        "responses": ["...", "..."],
//        "pick": "hash" | "cycle"}          // default "hash"
//     ],
//     "default_responses": ["..."],         // optional fallback
//     "embedding": {"dim": 64, "vectors": {"text": [..]}}   // optional
//   }
//
// The first matching rule answers. Sample i is responses[h(request, i) % n]
// for "hash" and responses[i % n] for "cycle", so a completion is a pure
// function of the canonical request and the sample index.
class MockProvider : public Provider {
 public:
  explicit MockProvider(nlohmann::json script);
  static std::shared_ptr<MockProvider> from_file(const std::filesystem::path& path);

  std::vector<std::string> complete(const ChatRequest& request) override;
  bool supports_embed() const override { return embed_dim_ > 0; }
  std::vector<Embedding> embed(const std::vector<std::string>& texts) override;
  std::string name() const override { return "mock"; }

 private:
  struct Rule {
    std::optional<std::string> kind;
    std::vector<std::string> contains, contains_any, not_contains, responses;
    bool cycle = false;
  };
  const Rule* match(const ChatRequest& request) const;

  std::vector<Rule> rules_;
  std::optional<Rule> fallback_;
  int embed_dim_ = 0;
  std::unordered_map<std::string, Embedding> fixed_vectors_;
};

struct OpenAiOptions {
  std::string base_url = "https://api.openai.com/v1";
  std::string api_key;  // usually from AMBIG_API_KEY
  std::string embedding_model = "text-embedding-3-small";
  std::chrono::seconds timeout{120};
};

// OpenAI-compatible chat-completions and embeddings over HTTP(S).
class OpenAiProvider : public Provider {
 public:
  explicit OpenAiProvider(OpenAiOptions options);

  std::vector<std::string> complete(const ChatRequest& request) override;
  bool supports_embed() const override { return !options_.embedding_model.empty(); }
  std::vector<Embedding> embed(const std::vector<std::string>& texts) override;
  std::string name() const override { return "openai"; }

  static nlohmann::json request_body(const ChatRequest& request, int n);

 private:
  nlohmann::json post(const std::string& path, const nlohmann::json& body);

  OpenAiOptions options_;
  std::string host_;        // scheme://host[:port]
  std::string path_prefix_; // e.g. /v1
};

inline constexpr const char* kApiKeyEnv = "AMBIG_API_KEY";

}  // namespace ambig::llm
