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

#include <fstream>
#include <string>
#include <vector>

#include "ambig/error.hpp"
#include "ambig/store.hpp"
#include "support.hpp"

using namespace ambig;
using namespace ambig::store;
using testing::error_code_of;

namespace {

void write_text(const std::filesystem::path& p, const std::string& s) {
  std::ofstream(p, std::ios::binary) << s;
}

TaskInstance sample_instance() {
  TaskInstance t;
  t.id = "i1";
  t.task_name = "Summarization";
  t.instruction = "Summarize the text.";
  t.input = "Text: caf\xc3\xa9 \"quoted\"\nnew line";
  t.reference = "A summary.";
  t.add_annotation({AdditionalInstruction(Category::kTheme, {"food"}, Source::kLlm),
                    ValidationInfo{ClarityJudgment::kLessAmbiguous, 0.001, 0.25}});
  t.add_annotation({AdditionalInstruction(Category::kKeywords, {"a", "b"}, Source::kRule),
                    std::nullopt});
  return t;
}

}  // namespace

TEST_CASE("dataset round-trip") {
  testing::TempDir dir;
  std::vector<TaskInstance> ds = {sample_instance()};
  ds.push_back(sample_instance());
  ds.back().id = "i2";
  ds.back().annotations.clear();
  write_dataset(ds, dir / "ds.jsonl");
  const auto back = read_dataset(dir / "ds.jsonl");
  CHECK(back == ds);
  CHECK(serialize_dataset(back) == read_file(dir / "ds.jsonl"));
  const auto line = serialize_dataset({ds.front()});
  CHECK(line.find("{\"id\":\"i1\",\"task\":") == 0);
  CHECK(line.find("\"validation\"") != std::string::npos);
}

TEST_CASE("dataset field checks") {
  testing::TempDir dir;
  const auto p = dir / "bad.jsonl";
  write_text(p, "{\"id\":\"a\",\"task\":\"t\",\"instruction\":\"i\",\"input\":\"x\",\"reference\":\"r\"}\n"
                "not json\n");
  try {
    read_dataset(p);
    FAIL("expected a parse error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kParseError);
    CHECK(std::string(e.what()).find("bad.jsonl:2") != std::string::npos);
  }
  write_text(p, "{\"id\":\"a\",\"task\":\"t\",\"instruction\":\"i\",\"input\":\"x\",\"reference\":\"r\"}\n"
                "\n"
                "{\"id\":\"a\",\"task\":\"t\",\"instruction\":\"i\",\"input\":\"x\",\"reference\":\"r\"}\n");
  CHECK(error_code_of([&] { read_dataset(p); }) == ErrorCode::kDuplicateId);
  write_text(p, "{\"id\":\"a\",\"task\":\"t\",\"instruction\":\"i\",\"input\":\"x\",\"reference\":\"r\","
                "\"annotations\":[{\"category\":\"Tone\",\"text\":\"x\"}]}\n");
  CHECK(error_code_of([&] { read_dataset(p); }) == ErrorCode::kInvalidCategory);
  write_text(p, "{\"id\":\"a\",\"task\":\"t\",\"instruction\":\"i\",\"input\":\"x\",\"reference\":\"r\","
                "\"annotations\":[{\"category\":\"Style\",\"text\":\"Write formally.\"}]}\n");
  CHECK(error_code_of([&] { read_dataset(p); }) == ErrorCode::kInvalidRecord);
  write_text(p, "{\"id\":\"a\",\"task\":\"t\",\"input\":\"x\"}\n");
  CHECK(error_code_of([&] { read_dataset(p); }) == ErrorCode::kInvalidRecord);
  // Demonstration pools may leave out the reference.
  write_text(p, "{\"id\":\"a\",\"instruction\":\"i\"}\n");
  CHECK(read_dataset(p).front().reference.empty());
  CHECK(error_code_of([&] { read_dataset(dir / "missing.jsonl"); }) == ErrorCode::kIoError);
}

TEST_CASE("annotations accept aliases and derive fillers from text") {
  const auto t = instance_from_json(nlohmann::json::parse(R"({
    "id": "a", "task": "t", "instruction": "i", "input": "x", "reference": "r",
    "annotations": [
      {"category": "Plan", "text": "Please generate the output based on the following outline: 1. a 2. b"},
      {"category": "keyword", "text": "Include x, y in your response.", "source": "rule"}
    ]})"));
  REQUIRE(t.annotations.size() == 2);
  CHECK(t.annotations[0].instruction.category() == Category::kKeywords);
  CHECK(t.annotations[0].instruction.source() == Source::kRule);
  CHECK(t.annotations[1].instruction.fillers() == std::vector<std::string>{"a", "b"});
  CHECK(t.annotations[1].instruction.source() == Source::kHuman);
}

TEST_CASE("raw records") {
  testing::TempDir dir;
  const auto p = dir / "raw.jsonl";
  write_text(p, "{\"task\":\"QA\",\"instruction\":\"i\",\"input\":\"x\",\"output\":\"o\"}\n"
                "{\"id\":\"k\",\"task\":\"QA\",\"instruction\":\"i\",\"input\":\"x\",\"reference\":\"r\"}\n");
  const auto raw = read_raw_records(p);
  REQUIRE(raw.size() == 2);
  CHECK(raw[0].id == "QA-1");
  CHECK(raw[1].output == "r");
  write_raw_records(raw, dir / "out.jsonl");
  CHECK(read_raw_records(dir / "out.jsonl") == raw);
}

TEST_CASE("candidate audit records") {
  testing::TempDir dir;
  CandidateRecord a;
  a.instance_id = "i";
  a.category = Category::kStyle;
  a.candidate = AdditionalInstruction(Category::kStyle, {"formal"}, Source::kLlm);
  a.clarity = ClarityJudgment::kLessAmbiguous;
  metrics::SignificanceResult s;
  s.p_value = 0.01;
  s.significant = true;
  s.statistic = 300;
  a.utility = s;
  a.mean_gain = 0.2;
  a.accepted = true;
  CHECK(a.consistent());
  CandidateRecord b;
  b.instance_id = "i";
  b.category = Category::kKeywords;
  b.note = "no keyphrase fits the budget";
  CHECK(b.consistent());
  write_candidates({a, b}, dir / "audit.jsonl");
  const auto back = read_candidates(dir / "audit.jsonl");
  REQUIRE(back.size() == 2);
  CHECK(back[0].candidate == a.candidate);
  CHECK(back[0].utility->p_value == doctest::Approx(0.01));
  CHECK(back[0].accepted);
  CHECK_FALSE(back[1].candidate.has_value());
  CHECK(back[1].note == b.note);
  CandidateRecord bad = a;
  bad.utility->significant = false;
  CHECK_FALSE(bad.consistent());
}

TEST_CASE("event log append and read") {
  testing::TempDir dir;
  EventLog log(dir / "sessions");
  for (long i = 1; i <= 3; ++i) {
    log.append({"s-1", i, i == 1 ? EventKind::kCreated : EventKind::kSuggested,
                nlohmann::json{{"n", i}}, utc_now()});
  }
  const auto events = log.read("s-1");
  REQUIRE(events.size() == 3);
  CHECK(events[2].payload["n"] == 3);
  CHECK(events[0].kind == EventKind::kCreated);
  CHECK(log.exists("s-1"));
  CHECK_FALSE(log.exists("s-2"));
  CHECK(log.sessions() == std::vector<std::string>{"s-1"});
  CHECK(error_code_of([&] { log.read("nope"); }) == ErrorCode::kUnknownSession);
  CHECK(error_code_of([&] { log.read("../etc"); }) == ErrorCode::kUnknownSession);
}

TEST_CASE("event log tolerates a torn last line but not a gap") {
  testing::TempDir dir;
  EventLog log(dir.path());
  log.append({"s", 1, EventKind::kCreated, nlohmann::json::object(), utc_now()});
  log.append({"s", 2, EventKind::kIdentified, nlohmann::json::object(), utc_now()});
  {
    std::ofstream out(dir / "s.jsonl", std::ios::app | std::ios::binary);
    out << "{\"session_id\":\"s\",\"seq\":3,\"ki";
  }
  CHECK(log.read("s").size() == 2);
  write_text(dir / "g.jsonl", serialize_dataset({}));
  log.append({"g", 1, EventKind::kCreated, nlohmann::json::object(), utc_now()});
  log.append({"g", 3, EventKind::kIdentified, nlohmann::json::object(), utc_now()});
  CHECK(error_code_of([&] { log.read("g"); }) == ErrorCode::kParseError);
}

TEST_CASE("atomic writes replace the whole file") {
  testing::TempDir dir;
  write_file_atomic(dir / "f.txt", "first version, longer");
  write_file_atomic(dir / "f.txt", "second");
  CHECK(read_file(dir / "f.txt") == "second");
  CHECK(utc_now().size() == 20);
}

TEST_CASE("dataset canonical form") {
  testing::TempDir dir;
  const auto p = dir / "two.jsonl";
  write_text(p, "{\"id\":\"a\",\"task\":\"t\",\"instruction\":\"i\",\"input\":\"x\",\"reference\":\"r\","
                "\"annotations\":[{\"category\":\"Theme\",\"text\":\"Primarily discuss the following "
                "theme: x.\"},{\"category\":\"Keyword\",\"text\":\"Include a in your response.\"},"
                "{\"category\":\"Context\",\"text\":\"Additional context: y\"}]}\n"
                "{\"id\":\"b\",\"task\":\"t\",\"instruction\":\"i\",\"input\":\"x\",\"reference\":\"r\"}\n");
  const auto ds = read_dataset(p);
  REQUIRE(ds.size() == 2);
  CHECK(ds[0].categories() ==
        std::vector<Category>{Category::kContext, Category::kKeywords, Category::kTheme});
  write_dataset(ds, dir / "a.jsonl");
  write_dataset(ds, dir / "b.jsonl");
  CHECK(read_file(dir / "a.jsonl") == read_file(dir / "b.jsonl"));
  const auto text = read_file(dir / "a.jsonl");
  CHECK(text.find("Context") < text.find("Theme"));
}
