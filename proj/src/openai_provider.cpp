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

#include <httplib.h>

#include <algorithm>
#include <regex>

#include "ambig/error.hpp"
#include "ambig/gateway.hpp"

namespace ambig::llm {

OpenAiProvider::OpenAiProvider(OpenAiOptions options) : options_(std::move(options)) {
  static const std::regex kUrl(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(options_.base_url, m, kUrl)) {
    throw Error(ErrorCode::kInvalidArgument, "invalid provider base URL '" + options_.base_url + "'");
  }
  host_ = m[1].str();
  path_prefix_ = m[2].str();
  while (!path_prefix_.empty() && path_prefix_.back() == '/') path_prefix_.pop_back();
}

nlohmann::json OpenAiProvider::request_body(const ChatRequest& request, int n) {
  nlohmann::json messages = nlohmann::json::array();
  if (!request.system.empty()) {
    messages.push_back({{"role", "system"}, {"content", request.system}});
  }
  messages.push_back({{"role", "user"}, {"content", request.user}});
  nlohmann::json body = {
      {"model", request.model_id},
      {"messages", std::move(messages)},
      {"temperature", request.temperature},
      {"max_tokens", request.max_tokens},
      {"n", n},
  };
  if (request.seed) body["seed"] = *request.seed;
  return body;
}

nlohmann::json OpenAiProvider::post(const std::string& path, const nlohmann::json& body) {
  httplib::Client cli(host_);
  cli.set_connection_timeout(std::chrono::seconds(10));
  cli.set_read_timeout(options_.timeout);
  cli.set_write_timeout(options_.timeout);
  if (!options_.api_key.empty()) cli.set_bearer_token_auth(options_.api_key);
  auto res = cli.Post(path_prefix_ + path, body.dump(), "application/json");
  if (!res) {
    throw TransientError("transport error: " + httplib::to_string(res.error()));
  }
  if (res->status == 429 || res->status >= 500) {
    throw TransientError("HTTP " + std::to_string(res->status));
  }
  if (res->status != 200) {
    std::string detail = res->body.substr(0, 300);
    throw Error(ErrorCode::kProviderUnavailable,
                "HTTP " + std::to_string(res->status) + " from " + host_ + path_prefix_ + path +
                    ": " + detail);
  }
  try {
    return nlohmann::json::parse(res->body);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kProviderUnavailable,
                std::string("malformed provider response: ") + e.what());
  }
}

std::vector<std::string> OpenAiProvider::complete(const ChatRequest& request) {
  std::vector<std::string> out;
  // Some compatible servers ignore "n"; keep asking for the remainder.
  while (static_cast<int>(out.size()) < request.n_samples) {
    const int want = request.n_samples - static_cast<int>(out.size());
    const auto reply = post("/chat/completions", request_body(request, want));
    if (!reply.contains("choices") || !reply["choices"].is_array() || reply["choices"].empty()) {
      throw Error(ErrorCode::kProviderUnavailable, "provider response has no choices");
    }
    std::vector<std::pair<int, std::string>> choices;
    for (const auto& c : reply["choices"]) {
      const auto& content = c.at("message").at("content");
      choices.emplace_back(c.value("index", static_cast<int>(choices.size())),
                           content.is_string() ? content.get<std::string>() : std::string());
    }
    std::stable_sort(choices.begin(), choices.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    for (auto& [idx, text] : choices) {
      if (static_cast<int>(out.size()) < request.n_samples) out.push_back(std::move(text));
    }
  }
  return out;
}

std::vector<Embedding> OpenAiProvider::embed(const std::vector<std::string>& texts) {
  const auto reply =
      post("/embeddings", {{"model", options_.embedding_model}, {"input", texts}});
  if (!reply.contains("data") || !reply["data"].is_array()) {
    throw Error(ErrorCode::kProviderUnavailable, "embedding response has no data");
  }
  std::vector<std::pair<int, Embedding>> rows;
  for (const auto& d : reply["data"]) {
    rows.emplace_back(d.value("index", static_cast<int>(rows.size())),
                      d.at("embedding").get<Embedding>());
  }
  std::stable_sort(rows.begin(), rows.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<Embedding> out;
  for (auto& [i, v] : rows) out.push_back(std::move(v));
  return out;
}

}  // namespace ambig::llm
