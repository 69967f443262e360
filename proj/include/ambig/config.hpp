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

// JSON application config shared by the CLI and the service.

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include <json.hpp>

#include "ambig/gateway.hpp"
#include "ambig/pipeline.hpp"

namespace ambig {

struct AppConfig {
  std::string provider = "openai";  // "openai" or "mock"
  std::string base_url = "https://api.openai.com/v1";
  std::string embedding_model;      // empty disables embeddings
  std::string mock_script;          // forces the mock provider when set
  std::string model_id = "gpt-4";
  std::string annotator_model = "gpt-3.5-turbo";
  std::string judge_model = "gpt-4";
  double temperature = 1.0;
  double annotator_temperature = 1.0;
  int num_samples = 20;
  int max_tokens = 512;
  int candidates_per_category = 1;
  double alpha = 0.05;
  bool icl = false;
  int icl_k = 8;
  std::string demo_pool;
  std::string cache_dir = ".ambig-cache";
  std::string sessions_dir = "sessions";
  std::optional<long> max_calls;
  int max_in_flight = 8;
  int parallelism = 4;
  std::string host = "127.0.0.1";
  int port = 8080;
  int suggest_n = 10;
  int generate_samples = 1;
  std::int64_t seed = 0;

  // Unknown keys are rejected. Relative paths are resolved against
  // `base_dir`. Throws Error(kInvalidArgument).
  static AppConfig from_json(const nlohmann::json& j,
                             const std::filesystem::path& base_dir = {});
  // Throws Error(kIoError / kParseError / kInvalidArgument).
  static AppConfig load(const std::filesystem::path& path);

  nlohmann::json to_json() const;
  pipeline::PipelineConfig pipeline_config() const;
};

// Mock provider when mock_script is set or provider == "mock"; otherwise
// the OpenAI-compatible client with the key from AMBIG_API_KEY. An empty
// cache_dir keeps the cache in memory.
std::shared_ptr<llm::Gateway> make_gateway(const AppConfig& config,
                                           std::function<void(const std::string&)> log = {});

}  // namespace ambig
