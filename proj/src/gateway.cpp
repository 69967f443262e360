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

#include "ambig/gateway.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <ctime>
#include <fstream>
#include <sstream>
#include <thread>

#include "ambig/error.hpp"

namespace ambig::llm {
namespace {

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

class SemaphoreGuard {
 public:
  explicit SemaphoreGuard(std::counting_semaphore<1024>& s) : s_(s) { s_.acquire(); }
  ~SemaphoreGuard() { s_.release(); }
  SemaphoreGuard(const SemaphoreGuard&) = delete;
  SemaphoreGuard& operator=(const SemaphoreGuard&) = delete;

 private:
  std::counting_semaphore<1024>& s_;
};

}  // namespace

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xf];
  }
  return out;
}

CompletionCache::CompletionCache(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  std::filesystem::create_directories(*dir_, ec);
  if (ec) {
    throw Error(ErrorCode::kIoError,
                "cannot create cache directory " + dir_->string() + ": " + ec.message());
  }
}

std::string CompletionCache::key_for(const ChatRequest& request, int sample_index) {
  return sha256_hex(request.canonical() + "\n" + std::to_string(sample_index));
}

std::optional<std::string> CompletionCache::get(const std::string& key) {
  {
    std::shared_lock lock(mu_);
    if (auto it = memory_.find(key); it != memory_.end()) return it->second;
  }
  if (!dir_) return std::nullopt;
  const auto path = *dir_ / (key + ".json");
  std::ifstream in(path);
  if (!in) return std::nullopt;
  nlohmann::json entry;
  try {
    in >> entry;
  } catch (const nlohmann::json::exception&) {
    return std::nullopt;  // torn or foreign file; treated as a miss
  }
  if (!entry.contains("text") || !entry["text"].is_string()) return std::nullopt;
  std::string text = entry["text"].get<std::string>();
  std::unique_lock lock(mu_);
  return memory_.try_emplace(key, std::move(text)).first->second;
}

void CompletionCache::put(const std::string& key, const ChatRequest& request,
                          int sample_index, const std::string& text) {
  std::unique_lock lock(mu_);
  if (memory_.count(key)) return;
  if (dir_) {
    const auto path = *dir_ / (key + ".json");
    if (!std::filesystem::exists(path)) {
      nlohmann::json entry;
      entry["request"] = request.canonical_json();
      entry["sample_index"] = sample_index;
      entry["text"] = text;
      entry["created_at"] = utc_timestamp();
      const auto tmp = *dir_ / (key + ".json.tmp");
      {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorCode::kIoError, "cannot write cache entry " + tmp.string());
        out << entry.dump(2) << '\n';
      }
      std::filesystem::rename(tmp, path);
    }
  }
  memory_.emplace(key, text);
}

Gateway::Gateway(std::shared_ptr<Provider> provider, std::shared_ptr<CompletionCache> cache,
                 GatewayOptions options)
    : provider_(std::move(provider)),
      cache_(cache ? std::move(cache) : std::make_shared<CompletionCache>()),
      options_(std::move(options)),
      in_flight_(std::clamp(options_.max_in_flight, 1, 1024)) {
  if (!provider_) throw Error(ErrorCode::kInvalidArgument, "gateway needs a provider");
}

void Gateway::log(const std::string& msg) const {
  if (options_.log) options_.log(msg);
}

GatewayStats Gateway::stats() const {
  return {calls_.load(), hits_.load(), misses_.load()};
}

std::vector<std::string> Gateway::call_with_retry(const ChatRequest& request) {
  auto backoff = options_.initial_backoff;
  const int attempts = std::max(1, options_.max_attempts);
  for (int attempt = 1;; ++attempt) {
    long current = calls_.load();
    do {
      if (options_.max_calls && current >= *options_.max_calls) {
        throw Error(ErrorCode::kBudgetExceeded,
                    "provider call budget of " + std::to_string(*options_.max_calls) +
                        " exhausted");
      }
    } while (!calls_.compare_exchange_weak(current, current + 1));

    try {
      SemaphoreGuard guard(in_flight_);
      auto out = provider_->complete(request);
      if (attempt > 1) {
        log(request.kind + " request succeeded on attempt " + std::to_string(attempt));
      }
      return out;
    } catch (const TransientError& e) {
      log(request.kind + " request attempt " + std::to_string(attempt) + "/" +
          std::to_string(attempts) + " failed: " + e.what());
      if (attempt >= attempts) {
        throw Error(ErrorCode::kProviderUnavailable,
                    "provider '" + provider_->name() + "' failed after " +
                        std::to_string(attempts) + " attempts: " + e.what());
      }
    } catch (const Error&) {
      throw;
    } catch (const std::exception& e) {
      throw Error(ErrorCode::kProviderUnavailable,
                  "provider '" + provider_->name() + "' failed: " + e.what());
    }
    std::this_thread::sleep_for(backoff);
    backoff = std::chrono::milliseconds(
        static_cast<long>(static_cast<double>(backoff.count()) * options_.backoff_multiplier));
  }
}

std::vector<std::string> Gateway::complete_cached(const ChatRequest& request) {
  request.validate();
  const auto n = static_cast<std::size_t>(request.n_samples);
  std::vector<std::string> keys(n);
  std::vector<std::optional<std::string>> found(n);
  bool all = true;
  for (std::size_t i = 0; i < n; ++i) {
    keys[i] = CompletionCache::key_for(request, static_cast<int>(i));
    found[i] = cache_->get(keys[i]);
    all = all && found[i].has_value();
  }
  std::vector<std::string> out(n);
  if (all) {
    ++hits_;
    for (std::size_t i = 0; i < n; ++i) out[i] = std::move(*found[i]);
    return out;
  }
  ++misses_;
  auto samples = call_with_retry(request);
  if (samples.size() != n) {
    throw Error(ErrorCode::kProviderUnavailable,
                "provider '" + provider_->name() + "' returned " +
                    std::to_string(samples.size()) + " completions, expected " +
                    std::to_string(n));
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (found[i]) {
      out[i] = std::move(*found[i]);
      continue;
    }
    cache_->put(keys[i], request, static_cast<int>(i), samples[i]);
    out[i] = *cache_->get(keys[i]);
  }
  return out;
}

std::vector<Embedding> Gateway::embed(const std::vector<std::string>& texts) {
  if (!provider_->supports_embed()) {
    throw Error(ErrorCode::kEmbedUnsupported,
                "provider '" + provider_->name() + "' cannot embed");
  }
  std::vector<Embedding> out;
  {
    SemaphoreGuard guard(in_flight_);
    out = provider_->embed(texts);
  }
  if (out.size() != texts.size()) {
    throw Error(ErrorCode::kProviderUnavailable, "embedding count mismatch");
  }
  for (const auto& v : out) {
    if (v.empty() || v.size() != out.front().size()) {
      throw Error(ErrorCode::kProviderUnavailable, "embedding dimensions disagree");
    }
  }
  return out;
}

double cosine(const Embedding& a, const Embedding& b) {
  double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

double semantic_similarity(Gateway& gateway, const std::string& a, const std::string& b) {
  const auto v = gateway.embed({a, b});
  return cosine(v[0], v[1]);
}

}  // namespace ambig::llm
