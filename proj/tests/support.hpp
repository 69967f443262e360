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

// Shared fixtures for the unit tests.

#pragma once

#include <atomic>
#include <chrono>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <random>
#include <string>
#include <vector>

#include "ambig/error.hpp"
#include "ambig/gateway.hpp"

namespace testing {

class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("ambig-test-" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

// Provider whose answers come from a callback; counts calls and keeps requests.
class FnProvider : public ambig::llm::Provider {
 public:
  using Fn = std::function<std::vector<std::string>(const ambig::llm::ChatRequest&)>;
  explicit FnProvider(Fn fn) : fn_(std::move(fn)) {}
  std::vector<std::string> complete(const ambig::llm::ChatRequest& request) override {
    ++calls;
    {
      std::lock_guard<std::mutex> lock(mu_);
      requests.push_back(request);
    }
    return fn_(request);
  }
  std::string name() const override { return "fn"; }

  std::atomic<int> calls{0};
  std::vector<ambig::llm::ChatRequest> requests;

 private:
  Fn fn_;
  std::mutex mu_;
};

// Replies `text` to every sample of every request.
inline std::shared_ptr<FnProvider> constant_provider(std::string text) {
  return std::make_shared<FnProvider>([text](const ambig::llm::ChatRequest& r) {
    return std::vector<std::string>(static_cast<std::size_t>(r.n_samples), text);
  });
}

inline std::shared_ptr<ambig::llm::Gateway> gateway_for(
    std::shared_ptr<ambig::llm::Provider> provider, ambig::llm::GatewayOptions options = {}) {
  options.initial_backoff = std::chrono::milliseconds(1);
  return std::make_shared<ambig::llm::Gateway>(
      std::move(provider), std::make_shared<ambig::llm::CompletionCache>(), std::move(options));
}

template <typename Fn>
ambig::ErrorCode error_code_of(Fn&& fn) {
  try {
    fn();
  } catch (const ambig::Error& e) {
    return e.code();
  }
  return ambig::ErrorCode::kOk;
}

}  // namespace testing
