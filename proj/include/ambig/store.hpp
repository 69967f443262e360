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

// On-disk formats: dataset JSONL, raw SNI records, candidate audit log and
// per-session append-only event logs.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ambig/core.hpp"
#include "ambig/metrics.hpp"

namespace ambig::store {

using OrderedJson = nlohmann::ordered_json;

// One SNI-style example before annotation.
struct RawRecord {
  std::string id;
  std::string task;
  std::string instruction;
  std::string input;
  std::string output;

  friend bool operator==(const RawRecord&, const RawRecord&) = default;
};

OrderedJson to_json(const TaskInstance& instance);
// Throws Error(kInvalidCategory / kInvalidRecord).
TaskInstance instance_from_json(const nlohmann::json& j);

// Throws Error(kIoError / kParseError / kDuplicateId / kInvalidCategory /
// kInvalidRecord). Parse errors carry the 1-based line number.
std::vector<TaskInstance> read_dataset(const std::filesystem::path& path);
// Canonical field order, annotations in category order, "\n" endings.
void write_dataset(const std::vector<TaskInstance>& instances,
                   const std::filesystem::path& path);
std::string serialize_dataset(const std::vector<TaskInstance>& instances);

// Lines need instruction, input and output ("reference" is accepted for
// output); missing ids become "<task>-<line>".
std::vector<RawRecord> read_raw_records(const std::filesystem::path& path);
void write_raw_records(const std::vector<RawRecord>& records,
                       const std::filesystem::path& path);

// Audit-trail entry for one validated (or rejected) candidate.
struct CandidateRecord {
  std::string instance_id;
  Category category = Category::kContext;
  std::optional<AdditionalInstruction> candidate;
  std::optional<ClarityJudgment> clarity;
  std::optional<metrics::SignificanceResult> utility;
  std::optional<double> mean_gain;
  bool accepted = false;
  std::string note;  // rejection reason or warning

  // accepted => clarity == LessAmbiguous && utility->significant
  bool consistent() const;
};

OrderedJson to_json(const CandidateRecord& record);
CandidateRecord candidate_from_json(const nlohmann::json& j);
std::vector<CandidateRecord> read_candidates(const std::filesystem::path& path);
void write_candidates(const std::vector<CandidateRecord>& records,
                      const std::filesystem::path& path);

enum class EventKind { kCreated, kIdentified, kSuggested, kSelected, kGenerated };
std::string_view event_kind_name(EventKind k);
EventKind event_kind_from_string(std::string_view s);

struct SessionEvent {
  std::string session_id;
  long seq = 0;
  EventKind kind = EventKind::kCreated;
  nlohmann::json payload;
  std::string at;  // ISO-8601 UTC

  friend bool operator==(const SessionEvent&, const SessionEvent&) = default;
};

OrderedJson to_json(const SessionEvent& e);
SessionEvent event_from_json(const nlohmann::json& j);

// One JSONL file per session under `dir`. Appends are fsync'ed before they
// return. The caller serializes appends per session.
class EventLog {
 public:
  explicit EventLog(std::filesystem::path dir);

  void append(const SessionEvent& event);
  // Throws Error(kParseError) when seq numbers are not 1, 2, 3, ...
  std::vector<SessionEvent> read(const std::string& session_id) const;
  bool exists(const std::string& session_id) const;
  std::vector<std::string> sessions() const;
  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path path_for(const std::string& session_id) const;
  std::filesystem::path dir_;
};

std::string utc_now();

// Writes `content` to `path` via a temporary file and rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

}  // namespace ambig::store
