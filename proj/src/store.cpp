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

#include "ambig/store.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <ctime>
#include <fstream>
#include <set>
#include <sstream>

#include "ambig/error.hpp"

namespace ambig::store {
namespace {

std::string require_string(const nlohmann::json& j, const char* field) {
  if (!j.contains(field) || !j[field].is_string()) {
    throw Error(ErrorCode::kInvalidRecord,
                std::string("missing or non-string field '") + field + "'");
  }
  return j[field].get<std::string>();
}

template <typename Fn>
void for_each_line(const std::filesystem::path& path, Fn&& fn) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kParseError, path.string() + ":" + std::to_string(line_no) +
                                              ": invalid JSON: " + e.what());
    }
    try {
      fn(j, line_no);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kDuplicateId) throw;
      throw Error(e.code(), path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kInvalidRecord,
                  path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
}

nlohmann::json optional_number(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

std::optional<double> read_optional_number(const nlohmann::json& j, const char* field) {
  if (!j.contains(field) || j[field].is_null()) return std::nullopt;
  return j[field].get<double>();
}

std::optional<ClarityJudgment> read_clarity(const nlohmann::json& j) {
  if (!j.contains("clarity") || j["clarity"].is_null()) return std::nullopt;
  auto c = clarity_from_string(j["clarity"].get<std::string>());
  if (!c) throw Error(ErrorCode::kInvalidRecord, "unknown clarity judgment");
  return c;
}

AdditionalInstruction instruction_from_json(const nlohmann::json& a) {
  const Category category = category_from_string(require_string(a, "category"));
  const Source source = source_from_string(a.value("source", std::string("human")));
  const std::string text = a.value("text", std::string());
  if (a.contains("fillers") && a["fillers"].is_array() && !a["fillers"].empty()) {
    AdditionalInstruction ai(category, a["fillers"].get<std::vector<std::string>>(), source);
    if (!text.empty() && text != ai.text()) {
      throw Error(ErrorCode::kInvalidRecord,
                  "annotation text does not match its rendered fillers: '" + text + "'");
    }
    return ai;
  }
  try {
    return AdditionalInstruction::from_text(category, text, source);
  } catch (const Error& e) {
    throw Error(ErrorCode::kInvalidRecord, e.what());
  }
}

OrderedJson instruction_json(const AdditionalInstruction& ai) {
  OrderedJson a;
  a["category"] = category_name(ai.category());
  a["text"] = ai.text();
  a["fillers"] = ai.fillers();
  a["source"] = source_name(ai.source());
  return a;
}

}  // namespace

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIoError, "cannot write " + tmp);
    out << content;
    if (!out) throw Error(ErrorCode::kIoError, "write failed for " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::kIoError, "cannot rename " + tmp + ": " + ec.message());
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

OrderedJson to_json(const TaskInstance& inst) {
  OrderedJson j;
  j["id"] = inst.id;
  j["task"] = inst.task_name;
  j["instruction"] = inst.instruction;
  j["input"] = inst.input;
  j["reference"] = inst.reference;
  OrderedJson anns = OrderedJson::array();
  auto sorted = inst.annotations;
  std::stable_sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
    return a.instruction.category() < b.instruction.category();
  });
  for (const auto& ann : sorted) {
    OrderedJson a = instruction_json(ann.instruction);
    if (ann.validation) {
      OrderedJson v;
      v["clarity"] = ann.validation->clarity
                         ? OrderedJson(clarity_name(*ann.validation->clarity))
                         : OrderedJson(nullptr);
      v["utility_p"] = optional_number(ann.validation->utility_p);
      v["mean_gain"] = optional_number(ann.validation->mean_gain);
      a["validation"] = std::move(v);
    }
    anns.push_back(std::move(a));
  }
  j["annotations"] = std::move(anns);
  return j;
}

TaskInstance instance_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorCode::kInvalidRecord, "record is not a JSON object");
  TaskInstance inst;
  inst.id = require_string(j, "id");
  if (inst.id.empty()) throw Error(ErrorCode::kInvalidRecord, "empty id");
  inst.task_name = j.value("task", std::string());
  inst.instruction = require_string(j, "instruction");
  inst.input = j.value("input", std::string());
  inst.reference = j.value("reference", std::string());
  if (j.contains("annotations")) {
    for (const auto& a : j["annotations"]) {
      Annotation ann{instruction_from_json(a), std::nullopt};
      if (a.contains("validation") && a["validation"].is_object()) {
        const auto& v = a["validation"];
        ann.validation = ValidationInfo{read_clarity(v), read_optional_number(v, "utility_p"),
                                        read_optional_number(v, "mean_gain")};
      }
      try {
        inst.add_annotation(std::move(ann));
      } catch (const Error& e) {
        throw Error(ErrorCode::kInvalidRecord, e.what());
      }
    }
  }
  return inst;
}

std::vector<TaskInstance> read_dataset(const std::filesystem::path& path) {
  std::vector<TaskInstance> out;
  std::set<std::string> ids;
  for_each_line(path, [&](const nlohmann::json& j, std::size_t line_no) {
    TaskInstance inst = instance_from_json(j);
    if (!ids.insert(inst.id).second) {
      throw Error(ErrorCode::kDuplicateId, path.string() + ":" + std::to_string(line_no) +
                                               ": duplicate id '" + inst.id + "'");
    }
    out.push_back(std::move(inst));
  });
  return out;
}

std::string serialize_dataset(const std::vector<TaskInstance>& instances) {
  std::string out;
  for (const auto& inst : instances) {
    out += to_json(inst).dump();
    out += '\n';
  }
  return out;
}

void write_dataset(const std::vector<TaskInstance>& instances,
                   const std::filesystem::path& path) {
  write_file_atomic(path, serialize_dataset(instances));
}

std::vector<RawRecord> read_raw_records(const std::filesystem::path& path) {
  std::vector<RawRecord> out;
  std::set<std::string> ids;
  for_each_line(path, [&](const nlohmann::json& j, std::size_t line_no) {
    RawRecord r;
    r.task = j.value("task", std::string());
    r.instruction = require_string(j, "instruction");
    r.input = j.value("input", std::string());
    if (j.contains("output")) {
      r.output = require_string(j, "output");
    } else {
      r.output = require_string(j, "reference");
    }
    r.id = j.value("id", std::string());
    if (r.id.empty()) r.id = (r.task.empty() ? "record" : r.task) + "-" + std::to_string(line_no);
    if (!ids.insert(r.id).second) {
      throw Error(ErrorCode::kDuplicateId, path.string() + ":" + std::to_string(line_no) +
                                               ": duplicate id '" + r.id + "'");
    }
    out.push_back(std::move(r));
  });
  return out;
}

void write_raw_records(const std::vector<RawRecord>& records,
                       const std::filesystem::path& path) {
  std::string out;
  for (const auto& r : records) {
    OrderedJson j;
    j["id"] = r.id;
    j["task"] = r.task;
    j["instruction"] = r.instruction;
    j["input"] = r.input;
    j["output"] = r.output;
    out += j.dump();
    out += '\n';
  }
  write_file_atomic(path, out);
}

bool CandidateRecord::consistent() const {
  if (!accepted) return true;
  return clarity == ClarityJudgment::kLessAmbiguous && utility && utility->significant;
}

OrderedJson to_json(const CandidateRecord& r) {
  OrderedJson j;
  j["instance_id"] = r.instance_id;
  j["category"] = category_name(r.category);
  j["candidate"] = r.candidate ? instruction_json(*r.candidate) : OrderedJson(nullptr);
  j["clarity"] = r.clarity ? OrderedJson(clarity_name(*r.clarity)) : OrderedJson(nullptr);
  if (r.utility) {
    OrderedJson u;
    u["p_value"] = r.utility->p_value;
    u["statistic"] = r.utility->statistic;
    u["alpha"] = r.utility->alpha;
    u["significant"] = r.utility->significant;
    u["exact"] = r.utility->exact;
    j["utility"] = std::move(u);
  } else {
    j["utility"] = nullptr;
  }
  j["mean_gain"] = optional_number(r.mean_gain);
  j["accepted"] = r.accepted;
  j["note"] = r.note;
  return j;
}

CandidateRecord candidate_from_json(const nlohmann::json& j) {
  CandidateRecord r;
  r.instance_id = require_string(j, "instance_id");
  r.category = category_from_string(require_string(j, "category"));
  if (j.contains("candidate") && j["candidate"].is_object()) {
    r.candidate = instruction_from_json(j["candidate"]);
  }
  r.clarity = read_clarity(j);
  if (j.contains("utility") && j["utility"].is_object()) {
    const auto& u = j["utility"];
    metrics::SignificanceResult s;
    s.p_value = u.at("p_value").get<double>();
    s.statistic = u.value("statistic", 0.0);
    s.alpha = u.value("alpha", metrics::kDefaultAlpha);
    s.significant = u.at("significant").get<bool>();
    s.exact = u.value("exact", false);
    r.utility = s;
  }
  r.mean_gain = read_optional_number(j, "mean_gain");
  r.accepted = j.value("accepted", false);
  r.note = j.value("note", std::string());
  return r;
}

std::vector<CandidateRecord> read_candidates(const std::filesystem::path& path) {
  std::vector<CandidateRecord> out;
  for_each_line(path, [&](const nlohmann::json& j, std::size_t) {
    out.push_back(candidate_from_json(j));
  });
  return out;
}

void write_candidates(const std::vector<CandidateRecord>& records,
                      const std::filesystem::path& path) {
  std::string out;
  for (const auto& r : records) {
    out += to_json(r).dump();
    out += '\n';
  }
  write_file_atomic(path, out);
}

std::string_view event_kind_name(EventKind k) {
  switch (k) {
    case EventKind::kCreated: return "created";
    case EventKind::kIdentified: return "identified";
    case EventKind::kSuggested: return "suggested";
    case EventKind::kSelected: return "selected";
    case EventKind::kGenerated: return "generated";
  }
  return "created";
}

EventKind event_kind_from_string(std::string_view s) {
  for (auto k : {EventKind::kCreated, EventKind::kIdentified, EventKind::kSuggested,
                 EventKind::kSelected, EventKind::kGenerated}) {
    if (event_kind_name(k) == s) return k;
  }
  throw Error(ErrorCode::kInvalidRecord, "unknown session event kind '" + std::string(s) + "'");
}

OrderedJson to_json(const SessionEvent& e) {
  OrderedJson j;
  j["session_id"] = e.session_id;
  j["seq"] = e.seq;
  j["kind"] = event_kind_name(e.kind);
  j["payload"] = e.payload;
  j["at"] = e.at;
  return j;
}

SessionEvent event_from_json(const nlohmann::json& j) {
  SessionEvent e;
  e.session_id = require_string(j, "session_id");
  e.seq = j.at("seq").get<long>();
  e.kind = event_kind_from_string(require_string(j, "kind"));
  e.payload = j.value("payload", nlohmann::json::object());
  e.at = j.value("at", std::string());
  return e;
}

EventLog::EventLog(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) {
    throw Error(ErrorCode::kIoError,
                "cannot create sessions directory " + dir_.string() + ": " + ec.message());
  }
}

std::filesystem::path EventLog::path_for(const std::string& id) const {
  const bool safe = !id.empty() && std::all_of(id.begin(), id.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_';
  });
  if (!safe) throw Error(ErrorCode::kUnknownSession, "invalid session id '" + id + "'");
  return dir_ / (id + ".jsonl");
}

void EventLog::append(const SessionEvent& event) {
  const std::string line = to_json(event).dump() + "\n";
  const auto path = path_for(event.session_id);
  const int fd = ::open(path.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
  if (fd < 0) {
    throw Error(ErrorCode::kIoError, "cannot open " + path.string() + ": " + std::strerror(errno));
  }
  std::size_t written = 0;
  while (written < line.size()) {
    const ssize_t n = ::write(fd, line.data() + written, line.size() - written);
    if (n < 0) {
      if (errno == EINTR) continue;
      const std::string msg = std::strerror(errno);
      ::close(fd);
      throw Error(ErrorCode::kIoError, "append to " + path.string() + " failed: " + msg);
    }
    written += static_cast<std::size_t>(n);
  }
  const int rc = ::fsync(fd);
  ::close(fd);
  if (rc != 0) throw Error(ErrorCode::kIoError, "fsync of " + path.string() + " failed");
}

bool EventLog::exists(const std::string& session_id) const {
  try {
    return std::filesystem::exists(path_for(session_id));
  } catch (const Error&) {
    return false;
  }
}

std::vector<SessionEvent> EventLog::read(const std::string& session_id) const {
  const auto path = path_for(session_id);
  if (!std::filesystem::exists(path)) {
    throw Error(ErrorCode::kUnknownSession, "no session '" + session_id + "'");
  }
  std::vector<SessionEvent> out;
  std::ifstream in(path, std::ios::binary);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception&) {
      // A torn final line from a crash mid-append was never acknowledged.
      if (in.peek() == std::char_traits<char>::eof()) break;
      throw Error(ErrorCode::kParseError,
                  path.string() + ":" + std::to_string(line_no) + ": invalid JSON");
    }
    SessionEvent e = event_from_json(j);
    if (e.seq != static_cast<long>(out.size()) + 1) {
      throw Error(ErrorCode::kParseError, path.string() + ": sequence gap at seq " +
                                              std::to_string(e.seq));
    }
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<std::string> EventLog::sessions() const {
  std::vector<std::string> out;
  for (const auto& entry : std::filesystem::directory_iterator(dir_)) {
    if (entry.path().extension() == ".jsonl") out.push_back(entry.path().stem().string());
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace ambig::store
