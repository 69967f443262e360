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

#include "ambig/config.hpp"

#include <cstdlib>
#include <set>

#include "ambig/error.hpp"
#include "ambig/store.hpp"

namespace ambig {
namespace {

template <typename T>
void read(const nlohmann::json& j, const char* key, T& out) {
  if (!j.contains(key) || j[key].is_null()) return;
  try {
    out = j[key].get<T>();
  } catch (const nlohmann::json::exception&) {
    throw Error(ErrorCode::kInvalidArgument, std::string("config field '") + key +
                                                 "' has the wrong type");
  }
}

std::string resolve(const std::string& p, const std::filesystem::path& base) {
  if (p.empty() || base.empty()) return p;
  const std::filesystem::path path(p);
  return path.is_absolute() ? p : (base / path).lexically_normal().string();
}

}  // namespace

AppConfig AppConfig::from_json(const nlohmann::json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) throw Error(ErrorCode::kInvalidArgument, "config must be a JSON object");
  static const std::set<std::string> kKeys = {
      "provider", "base_url", "embedding_model", "mock_script", "model_id", "annotator_model",
      "judge_model", "temperature", "annotator_temperature", "num_samples", "max_tokens",
      "candidates_per_category", "alpha", "icl", "icl_k", "demo_pool", "cache_dir",
      "sessions_dir", "max_calls", "max_in_flight", "parallelism", "host", "port",
      "suggest_n", "generate_samples", "seed"};
  for (const auto& [k, _] : j.items()) {
    if (!kKeys.count(k)) throw Error(ErrorCode::kInvalidArgument, "unknown config key '" + k + "'");
  }
  AppConfig c;
  read(j, "provider", c.provider);
  read(j, "base_url", c.base_url);
  read(j, "embedding_model", c.embedding_model);
  read(j, "mock_script", c.mock_script);
  read(j, "model_id", c.model_id);
  read(j, "annotator_model", c.annotator_model);
  read(j, "judge_model", c.judge_model);
  read(j, "temperature", c.temperature);
  read(j, "annotator_temperature", c.annotator_temperature);
  read(j, "num_samples", c.num_samples);
  read(j, "max_tokens", c.max_tokens);
  read(j, "candidates_per_category", c.candidates_per_category);
  read(j, "alpha", c.alpha);
  read(j, "icl", c.icl);
  read(j, "icl_k", c.icl_k);
  read(j, "demo_pool", c.demo_pool);
  read(j, "cache_dir", c.cache_dir);
  read(j, "sessions_dir", c.sessions_dir);
  if (j.contains("max_calls") && !j["max_calls"].is_null()) c.max_calls = j["max_calls"].get<long>();
  read(j, "max_in_flight", c.max_in_flight);
  read(j, "parallelism", c.parallelism);
  read(j, "host", c.host);
  read(j, "port", c.port);
  read(j, "suggest_n", c.suggest_n);
  read(j, "generate_samples", c.generate_samples);
  read(j, "seed", c.seed);
  if (c.provider != "openai" && c.provider != "mock") {
    throw Error(ErrorCode::kInvalidArgument, "provider must be \"openai\" or \"mock\"");
  }
  c.mock_script = resolve(c.mock_script, base_dir);
  c.demo_pool = resolve(c.demo_pool, base_dir);
  c.cache_dir = resolve(c.cache_dir, base_dir);
  c.sessions_dir = resolve(c.sessions_dir, base_dir);
  c.pipeline_config().validate();
  return c;
}

AppConfig AppConfig::load(const std::filesystem::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(store::read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError, path.string() + ": " + e.what());
  }
  return from_json(j, path.parent_path());
}

nlohmann::json AppConfig::to_json() const {
  nlohmann::json j;
  j["provider"] = provider;
  j["base_url"] = base_url;
  j["embedding_model"] = embedding_model;
  j["mock_script"] = mock_script;
  j["model_id"] = model_id;
  j["annotator_model"] = annotator_model;
  j["judge_model"] = judge_model;
  j["temperature"] = temperature;
  j["annotator_temperature"] = annotator_temperature;
  j["num_samples"] = num_samples;
  j["max_tokens"] = max_tokens;
  j["candidates_per_category"] = candidates_per_category;
  j["alpha"] = alpha;
  j["icl"] = icl;
  j["icl_k"] = icl_k;
  j["demo_pool"] = demo_pool;
  j["cache_dir"] = cache_dir;
  j["sessions_dir"] = sessions_dir;
  j["max_calls"] = max_calls ? nlohmann::json(*max_calls) : nlohmann::json(nullptr);
  j["max_in_flight"] = max_in_flight;
  j["parallelism"] = parallelism;
  j["host"] = host;
  j["port"] = port;
  j["suggest_n"] = suggest_n;
  j["generate_samples"] = generate_samples;
  j["seed"] = seed;
  return j;
}

pipeline::PipelineConfig AppConfig::pipeline_config() const {
  pipeline::PipelineConfig p;
  p.generation.model_id = model_id;
  p.generation.temperature = temperature;
  p.generation.num_samples = num_samples;
  p.generation.max_tokens = max_tokens;
  p.annotator_model = annotator_model;
  p.annotator_temperature = annotator_temperature;
  p.judge_model = judge_model;
  p.candidates_per_category = candidates_per_category;
  p.alpha = alpha;
  p.seed = seed;
  p.parallelism = parallelism;
  return p;
}

std::shared_ptr<llm::Gateway> make_gateway(const AppConfig& config,
                                           std::function<void(const std::string&)> log) {
  std::shared_ptr<llm::Provider> provider;
  if (!config.mock_script.empty() || config.provider == "mock") {
    if (config.mock_script.empty()) {
      throw Error(ErrorCode::kInvalidArgument, "the mock provider needs a mock_script");
    }
    provider = llm::MockProvider::from_file(config.mock_script);
  } else {
    llm::OpenAiOptions o;
    o.base_url = config.base_url;
    o.embedding_model = config.embedding_model;
    if (const char* key = std::getenv(llm::kApiKeyEnv)) o.api_key = key;
    provider = std::make_shared<llm::OpenAiProvider>(std::move(o));
  }
  auto cache = config.cache_dir.empty()
                   ? std::make_shared<llm::CompletionCache>()
                   : std::make_shared<llm::CompletionCache>(config.cache_dir);
  llm::GatewayOptions g;
  g.max_calls = config.max_calls;
  g.max_in_flight = config.max_in_flight;
  g.log = std::move(log);
  return std::make_shared<llm::Gateway>(std::move(provider), std::move(cache), std::move(g));
}

}  // namespace ambig
