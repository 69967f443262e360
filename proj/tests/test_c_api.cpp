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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <string>

#include "ambig/ambig.h"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string take(char* s) {
  std::string out = s ? s : "";
  ambig_string_free(s);
  return out;
}

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("ambig_capi_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

const fs::path kMock = fs::path(AMBIG_SOURCE_DIR) / "data" / "mock";

}  // namespace

TEST_CASE("version and status names") {
  CHECK(std::string(ambig_version()).size() > 0);
  CHECK(std::string(ambig_status_name(AMBIG_OK)) == "Ok");
  CHECK(std::string(ambig_status_name(AMBIG_INVALID_CATEGORY)) == "InvalidCategory");
  CHECK(std::string(ambig_status_name(AMBIG_BUDGET_EXCEEDED)) == "BudgetExceeded");
}

TEST_CASE("render and refine") {
  char* out = nullptr;
  REQUIRE(ambig_render_template("Keywords", R"(["solar power", "cost"])", &out) == AMBIG_OK);
  CHECK(take(out) == "Include solar power, cost in your response.");

  CHECK(ambig_render_template("Tone", "[\"x\"]", &out) == AMBIG_INVALID_CATEGORY);
  CHECK(std::string(ambig_last_error()).find("Tone") != std::string::npos);
  CHECK(ambig_render_template("Theme", "[\" \"]", &out) == AMBIG_EMPTY_FILLER);
  CHECK(ambig_render_template("Theme", "[\"a\", \"b\"]", &out) == AMBIG_WRONG_ARITY);
  CHECK(ambig_render_template("Theme", "{", &out) == AMBIG_PARSE_ERROR);
  CHECK(ambig_render_template(nullptr, "[]", &out) == AMBIG_INVALID_ARGUMENT);

  const char* parts = R"([{"category": "Theme", "fillers": ["tides"]},
                          {"category": "Length", "text": "Answer with less than 20 words."}])";
  REQUIRE(ambig_refine_instruction("Explain.", parts, nullptr, &out) == AMBIG_OK);
  const auto j = json::parse(take(out));
  CHECK(j["rendered"] ==
        "Explain. Answer with less than 20 words. Primarily discuss the following theme: tides.");
  CHECK(j["parts"].size() == 2);
  const char* dup = R"([{"category": "Theme", "fillers": ["a"]}, {"category": "Theme", "fillers": ["b"]}])";
  CHECK(ambig_refine_instruction("x", dup, nullptr, &out) == AMBIG_DUPLICATE_CATEGORY);
}

TEST_CASE("metrics") {
  double p = 0, r = 0, f = 0;
  REQUIRE(ambig_rouge_l("the cat sat on the mat", "the cat on the mat", &p, &r, &f) == AMBIG_OK);
  CHECK(p == doctest::Approx(5.0 / 6));
  CHECK(r == doctest::Approx(1.0));
  double intra = 0;
  REQUIRE(ambig_intra_rl(R"(["a b", "a b", "a b"])", &intra) == AMBIG_OK);
  CHECK(intra == doctest::Approx(1.0));
  CHECK(ambig_intra_rl(R"(["only one"])", &intra) == AMBIG_TOO_FEW_SAMPLES);
}

TEST_CASE("score files") {
  const auto dir = scratch("score");
  write(dir / "c.txt", "the cat sat\n[\"a b\", \"a c\"]\n");
  write(dir / "r.txt", "the cat sat\na b\n");
  char* out = nullptr;
  REQUIRE(ambig_score_files((dir / "c.txt").c_str(), (dir / "r.txt").c_str(), &out) == AMBIG_OK);
  const auto j = json::parse(take(out));
  CHECK(j["lines"] == 2);
  CHECK(j["items"][0]["f1"].get<double>() == doctest::Approx(1.0));
  CHECK(j["items"][1]["samples"] == 2);
  CHECK(j["items"][1]["intra_rl"].get<double>() == doctest::Approx(0.5));
  write(dir / "r.txt", "one\n");
  CHECK(ambig_score_files((dir / "c.txt").c_str(), (dir / "r.txt").c_str(), &out) ==
        AMBIG_LENGTH_MISMATCH);
  CHECK(ambig_score_files((dir / "missing").c_str(), (dir / "r.txt").c_str(), &out) ==
        AMBIG_IO_ERROR);
  fs::remove_all(dir);
}

TEST_CASE("context with the shipped mock") {
  const auto dir = scratch("ctx");
  json cfg = json::parse(std::ifstream(kMock / "config.json"));
  cfg["sessions_dir"] = (dir / "sessions").string();
  ambig_context* ctx = nullptr;
  REQUIRE(ambig_context_new(cfg.dump().c_str(), kMock.c_str(), &ctx) == AMBIG_OK);
  char* out = nullptr;
  REQUIRE(ambig_context_config(ctx, &out) == AMBIG_OK);
  CHECK(json::parse(take(out))["provider"] == "mock");

  REQUIRE(ambig_eval_identify(ctx, (kMock / "identify_eval.jsonl").c_str(), 0, nullptr, nullptr,
                              nullptr, &out) == AMBIG_OK);
  const auto report = json::parse(take(out));
  CHECK(report.contains("exact_match"));
  REQUIRE(ambig_context_stats(ctx, &out) == AMBIG_OK);
  CHECK(json::parse(take(out))["provider_calls"].get<int>() > 0);

  CHECK(ambig_eval_mitigation(ctx, (dir / "none.jsonl").c_str(), "taxonomy", nullptr, nullptr,
                              &out) == AMBIG_IO_ERROR);
  CHECK(ambig_eval_suggest(ctx, (kMock / "identify_eval.jsonl").c_str(), 2, "guess", nullptr,
                           nullptr, &out) == AMBIG_INVALID_ARGUMENT);
  ambig_context_free(ctx);

  CHECK(ambig_context_new("{\"provider\": 3}", nullptr, &ctx) != AMBIG_OK);
  CHECK(ambig_context_new("{\"alpha\": 2}", nullptr, &ctx) == AMBIG_INVALID_ARGUMENT);
  ambig_context_free(nullptr);
  fs::remove_all(dir);
}
