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

#include <doctest.h>

#include <httplib.h>

#include <atomic>
#include <chrono>
#include <filesystem>
#include <set>
#include <thread>
#include <vector>

#include "ambig/error.hpp"
#include "ambig/gateway.hpp"
#include "support.hpp"

using namespace ambig;
using namespace ambig::llm;
using testing::error_code_of;
using testing::FnProvider;

namespace {

ChatRequest request(std::string user, int n = 1) {
  ChatRequest r;
  r.kind = "Downstream";
  r.user = std::move(user);
  r.model_id = "m";
  r.n_samples = n;
  r.seed = 0;
  return r;
}

// Fails with TransientError `failures` times, then echoes the prompt.
std::shared_ptr<FnProvider> flaky(int failures) {
  auto left = std::make_shared<std::atomic<int>>(failures);
  return std::make_shared<FnProvider>([left](const ChatRequest& r) {
    if (left->fetch_sub(1) > 0) throw TransientError("HTTP 503");
    std::vector<std::string> out;
    for (int i = 0; i < r.n_samples; ++i) out.push_back(r.user + "#" + std::to_string(i));
    return out;
  });
}

}  // namespace

TEST_CASE("sha256") {
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST_CASE("cache key is per sample and ignores the sample count") {
  const auto a = request("x", 1), b = request("x", 5);
  CHECK(CompletionCache::key_for(a, 0) == CompletionCache::key_for(b, 0));
  CHECK(CompletionCache::key_for(a, 0) != CompletionCache::key_for(a, 1));
  CHECK(CompletionCache::key_for(a, 3) == sha256_hex(a.canonical() + "\n3"));
}

TEST_CASE("cached completions skip the provider") {
  auto p = flaky(0);
  auto gw = testing::gateway_for(p);
  const auto first = gw->complete_cached(request("hello", 3));
  CHECK(first == std::vector<std::string>{"hello#0", "hello#1", "hello#2"});
  CHECK(gw->complete_cached(request("hello", 3)) == first);
  CHECK(gw->complete_cached(request("hello", 2)) ==
        std::vector<std::string>{"hello#0", "hello#1"});
  CHECK(p->calls == 1);
  CHECK(gw->stats().cache_hits == 2);
  CHECK(gw->stats().cache_misses == 1);
  // Asking for more samples re-queries but keeps the stored prefix.
  const auto more = gw->complete_cached(request("hello", 4));
  CHECK(more.size() == 4);
  CHECK(std::vector<std::string>(more.begin(), more.begin() + 3) == first);
  CHECK(p->calls == 2);
}

TEST_CASE("disk cache survives a new gateway") {
  testing::TempDir dir;
  {
    auto gw = std::make_shared<Gateway>(flaky(0), std::make_shared<CompletionCache>(dir.path()));
    gw->complete_cached(request("persist", 2));
  }
  auto p = std::make_shared<FnProvider>([](const ChatRequest&) -> std::vector<std::string> {
    throw Error(ErrorCode::kProviderUnavailable, "offline");
  });
  Gateway gw(p, std::make_shared<CompletionCache>(dir.path()));
  CHECK(gw.complete_cached(request("persist", 2)) ==
        std::vector<std::string>{"persist#0", "persist#1"});
  CHECK(p->calls == 0);
  int files = 0;
  for (const auto& e : std::filesystem::directory_iterator(dir.path())) {
    CHECK(e.path().extension() == ".json");
    ++files;
  }
  CHECK(files == 2);
}

TEST_CASE("transient failures are retried") {
  auto p = flaky(2);
  auto gw = testing::gateway_for(p);
  CHECK(gw->complete_cached(request("r")) == std::vector<std::string>{"r#0"});
  CHECK(p->calls == 3);
  CHECK(gw->stats().provider_calls == 3);
}

TEST_CASE("retries give up after three attempts") {
  auto p = flaky(3);
  auto gw = testing::gateway_for(p);
  CHECK(error_code_of([&] { gw->complete_cached(request("r")); }) ==
        ErrorCode::kProviderUnavailable);
  CHECK(p->calls == 3);
}

TEST_CASE("non-transient errors are not retried") {
  auto p = std::make_shared<FnProvider>([](const ChatRequest&) -> std::vector<std::string> {
    throw std::runtime_error("boom");
  });
  auto gw = testing::gateway_for(p);
  CHECK(error_code_of([&] { gw->complete_cached(request("r")); }) ==
        ErrorCode::kProviderUnavailable);
  CHECK(p->calls == 1);
}

TEST_CASE("call budget") {
  GatewayOptions o;
  o.max_calls = 2;
  auto p = flaky(0);
  auto gw = testing::gateway_for(p, o);
  gw->complete_cached(request("a"));
  gw->complete_cached(request("b"));
  gw->complete_cached(request("a"));  // cached, free
  CHECK(error_code_of([&] { gw->complete_cached(request("c")); }) == ErrorCode::kBudgetExceeded);
  CHECK(p->calls == 2);
}

TEST_CASE("wrong completion count is an error") {
  auto p = std::make_shared<FnProvider>([](const ChatRequest&) {
    return std::vector<std::string>{"only one"};
  });
  auto gw = testing::gateway_for(p);
  CHECK(error_code_of([&] { gw->complete_cached(request("x", 2)); }) ==
        ErrorCode::kProviderUnavailable);
}

TEST_CASE("in-flight calls are capped") {
  std::atomic<int> now{0}, peak{0};
  auto p = std::make_shared<FnProvider>([&](const ChatRequest& r) {
    const int cur = ++now;
    int prev = peak.load();
    while (cur > prev && !peak.compare_exchange_weak(prev, cur)) {
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
    --now;
    return std::vector<std::string>(static_cast<std::size_t>(r.n_samples), "ok");
  });
  GatewayOptions o;
  o.max_in_flight = 2;
  auto gw = testing::gateway_for(p, o);
  std::vector<std::thread> threads;
  for (int i = 0; i < 8; ++i) {
    threads.emplace_back([&, i] { gw->complete_cached(request("t" + std::to_string(i))); });
  }
  for (auto& t : threads) t.join();
  CHECK(p->calls == 8);
  CHECK(peak <= 2);
}

TEST_CASE("invalid requests are rejected before any call") {
  auto p = flaky(0);
  auto gw = testing::gateway_for(p);
  auto r = request("x");
  r.n_samples = 0;
  CHECK(error_code_of([&] { gw->complete_cached(r); }) == ErrorCode::kInvalidArgument);
  CHECK(p->calls == 0);
}

TEST_CASE("mock provider rules") {
  MockProvider m(nlohmann::json::parse(R"({
    "rules": [
      {"kind": "Identify", "responses": ["Theme"]},
      {"contains": ["alpha", "beta"], "not_contains": ["gamma"], "responses": ["ab"]},
      {"contains_any": ["one", "two"], "responses": ["x", "y", "z"], "pick": "cycle"}
    ],
    "embedding": {"dim": 8, "vectors": {"fixed": [1, 0, 0, 0, 0, 0, 0, 0]}}
  })"));
  auto r = request("alpha beta");
  CHECK(m.complete(r) == std::vector<std::string>{"ab"});
  r.kind = "Identify";
  CHECK(m.complete(r) == std::vector<std::string>{"Theme"});
  auto c = request("alpha beta gamma two", 4);
  CHECK(m.complete(c) == std::vector<std::string>{"x", "y", "z", "x"});
  CHECK(error_code_of([&] { m.complete(request("nothing")); }) == ErrorCode::kProviderUnavailable);
  const auto e = m.embed({"fixed", "some words", "some words"});
  CHECK(e[0][0] == 1.0);
  CHECK(cosine(e[1], e[2]) == doctest::Approx(1.0));
  CHECK(m.supports_embed());
}

TEST_CASE("mock hash picks are deterministic and spread") {
  MockProvider m(nlohmann::json::parse(R"({"default_responses": ["a", "b", "c", "d"]})"));
  const auto r = request("anything", 40);
  const auto first = m.complete(r);
  CHECK(MockProvider(nlohmann::json::parse(R"({"default_responses": ["a", "b", "c", "d"]})"))
            .complete(r) == first);
  std::set<std::string> distinct(first.begin(), first.end());
  CHECK(distinct.size() == 4);
  CHECK_FALSE(m.supports_embed());
  CHECK(error_code_of([&] { m.embed({"x"}); }) == ErrorCode::kEmbedUnsupported);
}

TEST_CASE("malformed mock scripts") {
  CHECK(error_code_of([] { MockProvider(nlohmann::json::parse(R"({"rules": [{}]})")); }) ==
        ErrorCode::kInvalidArgument);
  CHECK(error_code_of([] { MockProvider::from_file("/nonexistent/script.json"); }) ==
        ErrorCode::kIoError);
}

namespace {

// Minimal OpenAI-compatible server. Returns at most two choices per call, in
// reverse index order, and fails the first `fail_first` requests with 503.
struct FakeOpenAi {
  httplib::Server server;
  std::thread thread;
  int port = 0;
  std::atomic<int> fail_first{0};
  std::atomic<int> requests{0};
  std::vector<nlohmann::json> bodies;
  std::vector<std::string> auth;
  std::mutex mu;

  FakeOpenAi() {
    server.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
      ++requests;
      auto body = nlohmann::json::parse(req.body);
      {
        std::lock_guard<std::mutex> lock(mu);
        bodies.push_back(body);
        auth.push_back(req.get_header_value("Authorization"));
      }
      if (fail_first.fetch_sub(1) > 0) {
        res.status = 503;
        return;
      }
      if (body["model"] == "forbidden") {
        res.status = 401;
        res.set_content(R"({"error":"bad key"})", "application/json");
        return;
      }
      const int n = std::min(2, body["n"].get<int>());
      nlohmann::json choices = nlohmann::json::array();
      for (int i = n - 1; i >= 0; --i) {
        choices.push_back({{"index", i},
                           {"message", {{"role", "assistant"},
                                        {"content", "reply " + std::to_string(i)}}}});
      }
      res.set_content(nlohmann::json{{"choices", choices}}.dump(), "application/json");
    });
    server.Post("/v1/embeddings", [](const httplib::Request& req, httplib::Response& res) {
      auto body = nlohmann::json::parse(req.body);
      nlohmann::json data = nlohmann::json::array();
      const auto& input = body["input"];
      for (int i = static_cast<int>(input.size()) - 1; i >= 0; --i) {
        data.push_back({{"index", i}, {"embedding", {static_cast<double>(i), 1.0}}});
      }
      res.set_content(nlohmann::json{{"data", data}}.dump(), "application/json");
    });
    port = server.bind_to_any_port("127.0.0.1");
    thread = std::thread([this] { server.listen_after_bind(); });
    server.wait_until_ready();
  }
  ~FakeOpenAi() {
    server.stop();
    thread.join();
  }
  std::string url() const { return "http://127.0.0.1:" + std::to_string(port) + "/v1"; }
};

}  // namespace

TEST_CASE("OpenAI-compatible client") {
  FakeOpenAi fake;
  OpenAiOptions o;
  o.base_url = fake.url();
  o.api_key = "sk-test";
  auto provider = std::make_shared<OpenAiProvider>(o);

  SUBCASE("collects n samples across short replies, in index order") {
    ChatRequest r = request("hi", 3);
    r.system = "sys";
    r.seed = 42;
    const auto out = provider->complete(r);
    CHECK(out == std::vector<std::string>{"reply 0", "reply 1", "reply 0"});
    REQUIRE(fake.bodies.size() == 2);
    CHECK(fake.bodies[0]["n"] == 3);
    CHECK(fake.bodies[1]["n"] == 1);
    CHECK(fake.bodies[0]["seed"] == 42);
    CHECK(fake.bodies[0]["messages"][0]["role"] == "system");
    CHECK(fake.bodies[0]["messages"][1]["content"] == "hi");
    CHECK(fake.auth[0] == "Bearer sk-test");
  }
  SUBCASE("server errors are retried by the gateway") {
    fake.fail_first = 2;
    auto gw = testing::gateway_for(provider);
    CHECK(gw->complete_cached(request("x")) == std::vector<std::string>{"reply 0"});
    CHECK(fake.requests == 3);
  }
  SUBCASE("client errors are not retried") {
    auto gw = testing::gateway_for(provider);
    auto r = request("x");
    r.model_id = "forbidden";
    CHECK(error_code_of([&] { gw->complete_cached(r); }) == ErrorCode::kProviderUnavailable);
    CHECK(fake.requests == 1);
  }
  SUBCASE("embeddings come back in input order") {
    const auto e = provider->embed({"a", "b", "c"});
    REQUIRE(e.size() == 3);
    CHECK(e[2][0] == 2.0);
  }
}

TEST_CASE("unreachable server is reported as unavailable") {
  OpenAiOptions o;
  o.base_url = "http://127.0.0.1:1/v1";
  o.timeout = std::chrono::seconds(1);
  auto gw = testing::gateway_for(std::make_shared<OpenAiProvider>(o));
  CHECK(error_code_of([&] { gw->complete_cached(request("x")); }) ==
        ErrorCode::kProviderUnavailable);
  CHECK(gw->stats().provider_calls == 3);
  CHECK(error_code_of([] { OpenAiProvider(OpenAiOptions{"ftp://x", "", "", {}}); }) ==
        ErrorCode::kInvalidArgument);
}

TEST_CASE("semantic similarity fixtures") {
  auto m = std::make_shared<MockProvider>(nlohmann::json::parse(R"({
    "embedding": {"dim": 2, "vectors": {"x": [1, 0], "y": [0.6, 0.8], "z": [0, 1]}}})"));
  auto gw = testing::gateway_for(m);
  CHECK(semantic_similarity(*gw, "x", "x") == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(semantic_similarity(*gw, "x", "z") == doctest::Approx(0.0));
  CHECK(semantic_similarity(*gw, "x", "y") == doctest::Approx(0.6));
}

TEST_CASE("zero budget on a cold cache") {
  GatewayOptions o;
  o.max_calls = 0;
  auto p = flaky(0);
  auto gw = testing::gateway_for(p, o);
  CHECK(error_code_of([&] { gw->complete_cached(request("x")); }) == ErrorCode::kBudgetExceeded);
  CHECK(p->calls == 0);
}
