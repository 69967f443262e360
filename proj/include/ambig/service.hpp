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

// Interactive clarification sessions: identify, suggest, select, generate.
// Session state is a fold over an append-only event log.

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "ambig/core.hpp"
#include "ambig/error.hpp"
#include "ambig/gateway.hpp"
#include "ambig/pipeline.hpp"
#include "ambig/store.hpp"

namespace httplib {
class Server;
}

namespace ambig::service {

struct GenerationEntry {
  std::string refined_instruction;
  std::vector<std::string> outputs;

  friend bool operator==(const GenerationEntry&, const GenerationEntry&) = default;
};

struct SessionState {
  std::string id;
  std::string instruction;
  std::string input;
  long last_seq = 0;
  bool identification_done = false;
  metrics::CategorySet identified;
  std::map<Category, std::vector<AdditionalInstruction>> suggestions;
  std::map<Category, AdditionalInstruction> selections;
  std::set<Category> manual;  // selected without any stored suggestion
  std::vector<GenerationEntry> generations;

  // refine_instruction(instruction, selections).rendered
  std::string refined_instruction() const;

  friend bool operator==(const SessionState&, const SessionState&) = default;
};

// Applies one event. Throws Error(kParseError) on a malformed or out of
// order event.
void apply(SessionState& state, const store::SessionEvent& event);
SessionState replay(const std::vector<store::SessionEvent>& events);

store::OrderedJson to_json(const SessionState& s);

struct ServiceOptions {
  int icl_k = 0;  // 0: zero-shot identification
  pipeline::DemoPool demo_pool;
  int default_suggestions = 10;
  int generate_samples = 1;
};

struct CreateResult {
  std::string session_id;
  metrics::CategorySet identified;
};

// Either an index into the stored suggestions or free text for the category.
using Choice = std::variant<std::size_t, std::string>;

class ClarificationService {
 public:
  ClarificationService(std::shared_ptr<llm::Gateway> gateway, pipeline::PipelineConfig config,
                       std::filesystem::path sessions_dir, ServiceOptions options = {});

  // Throws Error(kEmptyInstruction). When identification fails the session
  // keeps only its `created` event and the provider error propagates.
  CreateResult create_session(const std::string& instruction, const std::string& input);
  // Throws Error(kUnknownSession / kInvalidArgument).
  std::vector<AdditionalInstruction> suggest(const std::string& session_id, Category c,
                                             std::optional<int> n = std::nullopt);
  // Throws Error(kUnknownSession / kIndexOutOfRange / kUnrenderableCustomText).
  RefinedInstruction select(const std::string& session_id, Category c, const Choice& choice);
  GenerationEntry generate(const std::string& session_id,
                           std::optional<GenerationConfig> config = std::nullopt);
  SessionState get_state(const std::string& session_id);

  const store::EventLog& log() const { return log_; }
  // Generation settings used when generate() gets no explicit config.
  GenerationConfig default_generation() const;

 private:
  struct Slot {
    std::mutex mu;
    std::optional<SessionState> state;
  };
  std::shared_ptr<Slot> slot(const std::string& session_id);
  SessionState& loaded(Slot& s, const std::string& session_id);
  void record(SessionState& state, store::EventKind kind, nlohmann::json payload);

  std::shared_ptr<llm::Gateway> gateway_;
  pipeline::PipelineConfig config_;
  ServiceOptions options_;
  store::EventLog log_;
  std::mutex slots_mu_;
  std::map<std::string, std::shared_ptr<Slot>> slots_;
};

// HTTP status for an error code (400, 404, 502 or 500).
int http_status(ErrorCode code);

// POST /sessions, POST /sessions/{id}/suggest|select|generate,
// GET /sessions/{id}, GET /healthz. Errors are {code, message}.
void register_routes(httplib::Server& server, ClarificationService& service);

// Blocks until the server stops. Throws Error(kIoError) if binding fails.
void serve(ClarificationService& service, const std::string& host, int port);

}  // namespace ambig::service
