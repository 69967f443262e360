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

#include <algorithm>
#include <fstream>
#include <map>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "ambig/error.hpp"
#include "ambig/service.hpp"
#include "support.hpp"

using namespace ambig;
using namespace ambig::service;
using nlohmann::json;
using testing::FnProvider;

namespace {

std::string template_line(const std::string& user) {
  const std::string open = "# Template to Infill:\n";
  const auto a = user.find(open) + open.size();
  return user.substr(a, user.find('\n', a) - a);
}

// Identify says Theme and Context; Suggest returns distinct fillers per sample;
// Downstream echoes the instruction it was given.
std::shared_ptr<FnProvider> world(bool* down = nullptr) {
  return std::make_shared<FnProvider>([down](const llm::ChatRequest& r) {
    if (down && *down) throw Error(ErrorCode::kProviderUnavailable, "provider is down");
    std::vector<std::string> out;
    for (int i = 0; i < r.n_samples; ++i) {
      if (r.kind == "Identify") {
        out.push_back("Theme, Context");
      } else if (r.kind == "Suggest") {
        std::string t = template_line(r.user);
        t.replace(t.find("___"), 3, "option " + std::to_string(i));
        out.push_back(t);
      } else {
        const std::string open = "# Instruction:\n";
        const auto a = r.user.find(open) + open.size();
        out.push_back(r.user.substr(a, r.user.find("\n\n# Response:") - a));
      }
    }
    return out;
  });
}

struct Fixture {
  testing::TempDir dir;
  std::shared_ptr<FnProvider> provider;
  bool down = false;
  std::unique_ptr<ClarificationService> svc;

  Fixture() : provider(world(&down)) { restart(); }
  void restart() {
    svc = std::make_unique<ClarificationService>(testing::gateway_for(provider),
                                                 pipeline::PipelineConfig{}, dir / "sessions");
  }
};

struct Http {
  httplib::Server server;
  std::thread thread;
  int port = 0;
  explicit Http(ClarificationService& svc) {
    register_routes(server, svc);
    port = server.bind_to_any_port("127.0.0.1");
    thread = std::thread([this] { server.listen_after_bind(); });
    server.wait_until_ready();
  }
  ~Http() {
    server.stop();
    thread.join();
  }
  httplib::Client client() const { return httplib::Client("127.0.0.1", port); }
};

json post(httplib::Client& c, const std::string& path, const json& body, int expect) {
  auto res = c.Post(path, body.dump(), "application/json");
  REQUIRE(res);
  CHECK(res->status == expect);
  return json::parse(res->body);
}

}  // namespace

TEST_CASE("HTTP happy path: create, suggest, select, generate") {
  Fixture f;
  Http http(*f.svc);
  auto c = http.client();

  auto health = c.Get("/healthz");
  REQUIRE(health);
  CHECK(health->status == 200);

  const auto created = post(c, "/sessions",
                            {{"instruction", "Write a story."}, {"input", "a dragon"}}, 201);
  const std::string id = created["session_id"];
  CHECK(created["identified"] == json::array({"Context", "Theme"}));

  const auto sug = post(c, "/sessions/" + id + "/suggest", {{"category", "Theme"}, {"n", 10}}, 200);
  REQUIRE(sug["candidates"].size() == 10);
  for (const auto& cand : sug["candidates"]) {
    CHECK(cand["text"].get<std::string>().rfind("Primarily discuss the following theme:", 0) == 0);
  }
  CHECK(post(c, "/sessions/" + id + "/suggest", {{"category", "Context"}, {"n", 1}}, 200)
            ["candidates"].size() == 1);

  const auto base = post(c, "/sessions/" + id + "/generate", json::object(), 200);
  CHECK(base["refined_instruction"] == "Write a story.");
  CHECK(base["outputs"] == json::array({"Write a story."}));

  post(c, "/sessions/" + id + "/select", {{"category", "Context"}, {"index", 0}}, 200);
  const auto sel = post(c, "/sessions/" + id + "/select", {{"category", "Theme"}, {"index", 3}}, 200);
  const std::string refined = sel["refined_instruction"];
  CHECK(refined ==
        "Write a story. Additional context: option 0 Primarily discuss the following theme: "
        "option 3.");
  CHECK(refined.find("Additional context") < refined.find("Primarily discuss"));

  const auto again = post(c, "/sessions/" + id + "/select", {{"category", "Theme"}, {"index", 5}}, 200);
  const std::string replaced = again["refined_instruction"];
  CHECK(replaced.find("option 5.") != std::string::npos);
  CHECK(replaced.find("option 3") == std::string::npos);

  const auto gen = post(c, "/sessions/" + id + "/generate", {{"num_samples", 2}}, 200);
  CHECK(gen["refined_instruction"] == replaced);
  CHECK(gen["outputs"] == json::array({replaced, replaced}));
  CHECK(f.provider->requests.back().user.find("Additional context: option 0") != std::string::npos);

  auto state = c.Get("/sessions/" + id);
  REQUIRE(state);
  CHECK(state->status == 200);
  const auto js = json::parse(state->body);
  CHECK(js["generations"].size() == 2);
  CHECK(js["generations"][0]["refined_instruction"] == "Write a story.");
  CHECK(js["generations"][1]["refined_instruction"] == replaced);
}

TEST_CASE("HTTP errors") {
  Fixture f;
  Http http(*f.svc);
  auto c = http.client();
  CHECK(post(c, "/sessions", {{"instruction", "  "}}, 400)["code"] == "EmptyInstruction");
  CHECK(post(c, "/sessions", {{"input", "x"}}, 400)["code"] == "InvalidArgument");
  CHECK(post(c, "/sessions/deadbeef/suggest", {{"category", "Theme"}}, 404)["code"] ==
        "UnknownSession");
  const std::string id = post(c, "/sessions", {{"instruction", "Do it."}}, 201)["session_id"];
  CHECK(post(c, "/sessions/" + id + "/suggest", {{"category", "Tone"}}, 400)["code"] ==
        "BadCategory");
  post(c, "/sessions/" + id + "/suggest", {{"category", "Style"}, {"n", 10}}, 200);
  CHECK(post(c, "/sessions/" + id + "/select", {{"category", "Style"}, {"index", 99}}, 400)
            ["code"] == "IndexOutOfRange");
  CHECK(post(c, "/sessions/" + id + "/select", {{"category", "Planning"}, {"custom_text", " "}},
             400)["code"] == "UnrenderableCustomText");
  const auto manual =
      post(c, "/sessions/" + id + "/select", {{"category", "Length"}, {"custom_text", "less than 50"}}, 200);
  CHECK(manual["refined_instruction"] == "Do it. Answer with less than 50 words.");
  auto bad = c.Post("/sessions", "not json", "application/json");
  REQUIRE(bad);
  CHECK(bad->status == 400);
}

TEST_CASE("provider outage leaves only the created event") {
  Fixture f;
  f.down = true;
  Http http(*f.svc);
  auto c = http.client();
  const auto err = post(c, "/sessions", {{"instruction", "Write."}}, 502);
  CHECK(err["code"] == "ProviderUnavailable");
  const auto ids = f.svc->log().sessions();
  REQUIRE(ids.size() == 1);
  const auto events = f.svc->log().read(ids[0]);
  REQUIRE(events.size() == 1);
  CHECK(events[0].kind == store::EventKind::kCreated);
  f.down = false;
  // The session is still usable.
  CHECK(post(c, "/sessions/" + ids[0] + "/suggest", {{"category", "Theme"}, {"n", 2}}, 200)
            ["candidates"].size() == 2);
  CHECK_FALSE(f.svc->get_state(ids[0]).identification_done);
}

TEST_CASE("refined instruction equals core refinement for any selection order") {
  Fixture f;
  std::mt19937 rng(31);
  for (int round = 0; round < 20; ++round) {
    const std::string base = "Instruction " + std::to_string(round) + ".";
    const auto id = f.svc->create_session(base, "input").session_id;
    std::vector<Category> order(kAllCategories.begin(), kAllCategories.end());
    std::shuffle(order.begin(), order.end(), rng);
    order.resize(1 + rng() % order.size());
    std::map<Category, AdditionalInstruction> chosen;
    for (Category c : order) {
      const auto list = f.svc->suggest(id, c, 4);
      const std::size_t idx = rng() % list.size();
      const auto refined = f.svc->select(id, c, idx);
      chosen.insert_or_assign(c, list[idx]);
      std::vector<AdditionalInstruction> parts;
      for (const auto& [_, ai] : chosen) parts.push_back(ai);
      std::shuffle(parts.begin(), parts.end(), rng);
      CHECK(refined.rendered == refine_instruction(base, parts).rendered);
      CHECK(f.svc->get_state(id).refined_instruction() == refined.rendered);
    }
  }
}

TEST_CASE("crash and replay reconstruct the same session") {
  Fixture f;
  const auto id = f.svc->create_session("Write a poem.", "rain").session_id;
  f.svc->suggest(id, Category::kStyle, 3);
  f.svc->select(id, Category::kStyle, std::size_t{1});
  f.svc->select(id, Category::kTheme, std::string("loss"));
  f.svc->generate(id);
  const SessionState before = f.svc->get_state(id);
  CHECK(before.manual == std::set<Category>{Category::kTheme});

  // Torn write from a crash in the middle of the next append.
  {
    std::ofstream out(f.dir / "sessions" / (id + ".jsonl"), std::ios::app | std::ios::binary);
    out << "{\"session_id\":\"" << id << "\",\"seq\":7,\"kind\":\"sel";
  }
  f.restart();
  const SessionState after = f.svc->get_state(id);
  CHECK(after == before);
  CHECK(replay(f.svc->log().read(id)) == before);
  CHECK(to_json(after).dump() == to_json(before).dump());
}

TEST_CASE("replay rejects inconsistent logs") {
  store::SessionEvent created{"s", 1, store::EventKind::kCreated,
                              json{{"instruction", "i"}, {"input", ""}}, "t"};
  store::SessionEvent select{"s", 3, store::EventKind::kSelected, json::object(), "t"};
  CHECK(testing::error_code_of([&] { replay({created, select}); }) == ErrorCode::kParseError);
  store::SessionEvent second_create = created;
  second_create.seq = 2;
  CHECK(testing::error_code_of([&] { replay({created, second_create}); }) ==
        ErrorCode::kParseError);
}

TEST_CASE("concurrent sessions") {
  Fixture f;
  std::vector<std::thread> threads;
  std::vector<std::string> refined(8);
  for (int i = 0; i < 8; ++i) {
    threads.emplace_back([&, i] {
      const auto id = f.svc->create_session("Task " + std::to_string(i) + ".", "x").session_id;
      f.svc->suggest(id, Category::kTheme, 2);
      refined[static_cast<std::size_t>(i)] = f.svc->select(id, Category::kTheme, std::size_t{1}).rendered;
    });
  }
  for (auto& t : threads) t.join();
  for (int i = 0; i < 8; ++i) {
    CHECK(refined[static_cast<std::size_t>(i)] ==
          "Task " + std::to_string(i) + ". Primarily discuss the following theme: option 1.");
  }
  CHECK(f.svc->log().sessions().size() == 8);
}

TEST_CASE("status mapping") {
  CHECK(http_status(ErrorCode::kUnknownSession) == 404);
  CHECK(http_status(ErrorCode::kProviderUnavailable) == 502);
  CHECK(http_status(ErrorCode::kIndexOutOfRange) == 400);
  CHECK(http_status(ErrorCode::kIoError) == 500);
}
