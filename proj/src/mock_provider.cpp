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

#include <cmath>
#include <fstream>

#include "ambig/error.hpp"
#include "ambig/gateway.hpp"
#include "ambig/metrics.hpp"

namespace ambig::llm {
namespace {

std::vector<std::string> string_list(const nlohmann::json& j, const char* field) {
  std::vector<std::string> out;
  if (!j.contains(field)) return out;
  for (const auto& v : j.at(field)) out.push_back(v.get<std::string>());
  return out;
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace

MockProvider::MockProvider(nlohmann::json script) {
  try {
    auto parse_rule = [](const nlohmann::json& r) {
      Rule rule;
      if (r.contains("kind")) rule.kind = r.at("kind").get<std::string>();
      rule.contains = string_list(r, "contains");
      rule.contains_any = string_list(r, "contains_any");
      rule.not_contains = string_list(r, "not_contains");
      rule.responses = string_list(r, "responses");
      rule.cycle = r.value("pick", std::string("hash")) == "cycle";
      if (rule.responses.empty()) {
        throw Error(ErrorCode::kInvalidArgument, "mock rule without responses");
      }
      return rule;
    };
    if (script.contains("rules")) {
      for (const auto& r : script.at("rules")) rules_.push_back(parse_rule(r));
    }
    if (script.contains("default_responses")) {
      Rule r;
      r.responses = string_list(script, "default_responses");
      if (!r.responses.empty()) fallback_ = std::move(r);
    }
    if (script.contains("embedding")) {
      const auto& e = script.at("embedding");
      embed_dim_ = e.value("dim", 64);
      if (e.contains("vectors")) {
        for (const auto& [text, vec] : e.at("vectors").items()) {
          fixed_vectors_[text] = vec.get<Embedding>();
        }
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, std::string("malformed mock script: ") + e.what());
  }
}

std::shared_ptr<MockProvider> MockProvider::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open mock script " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument,
                "mock script " + path.string() + " is not valid JSON: " + e.what());
  }
  return std::make_shared<MockProvider>(std::move(j));
}

const MockProvider::Rule* MockProvider::match(const ChatRequest& request) const {
  const std::string haystack = request.system + "\n" + request.user;
  auto has = [&](const std::string& s) { return haystack.find(s) != std::string::npos; };
  for (const auto& r : rules_) {
    if (r.kind && *r.kind != request.kind) continue;
    if (!std::all_of(r.contains.begin(), r.contains.end(), has)) continue;
    if (!r.contains_any.empty() &&
        !std::any_of(r.contains_any.begin(), r.contains_any.end(), has))
      continue;
    if (std::any_of(r.not_contains.begin(), r.not_contains.end(), has)) continue;
    return &r;
  }
  return fallback_ ? &*fallback_ : nullptr;
}

std::vector<std::string> MockProvider::complete(const ChatRequest& request) {
  const Rule* rule = match(request);
  if (!rule) {
    throw Error(ErrorCode::kProviderUnavailable,
                "mock script has no rule for a " + request.kind + " request");
  }
  const std::string canonical = request.canonical();
  std::vector<std::string> out;
  out.reserve(static_cast<std::size_t>(request.n_samples));
  const std::size_t n = rule->responses.size();
  for (int i = 0; i < request.n_samples; ++i) {
    std::size_t pick;
    if (rule->cycle) {
      pick = static_cast<std::size_t>(i) % n;
    } else {
      const std::string digest = sha256_hex(canonical + "\n" + std::to_string(i));
      pick = static_cast<std::size_t>(std::stoull(digest.substr(0, 15), nullptr, 16) % n);
    }
    out.push_back(rule->responses[pick]);
  }
  return out;
}

std::vector<Embedding> MockProvider::embed(const std::vector<std::string>& texts) {
  if (embed_dim_ <= 0) return Provider::embed(texts);
  std::vector<Embedding> out;
  for (const auto& t : texts) {
    if (auto it = fixed_vectors_.find(t); it != fixed_vectors_.end()) {
      out.push_back(it->second);
      continue;
    }
    Embedding v(static_cast<std::size_t>(embed_dim_), 0.0);
    for (const auto& tok : metrics::tokenize(t)) {
      v[fnv1a(tok) % v.size()] += 1.0;
    }
    double norm = 0.0;
    for (double x : v) norm += x * x;
    if (norm == 0.0) {
      v[0] = 1.0;
    } else {
      for (double& x : v) x /= std::sqrt(norm);
    }
    out.push_back(std::move(v));
  }
  return out;
}

}  // namespace ambig::llm
