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

#include "ambig/service.hpp"

#include <random>

#include "ambig/error.hpp"
#include "text_util.hpp"

namespace ambig::service {
namespace {

using nlohmann::json;

json instruction_json(const AdditionalInstruction& ai) {
  return {{"category", category_name(ai.category())},
          {"text", ai.text()},
          {"fillers", ai.fillers()},
          {"source", source_name(ai.source())}};
}

AdditionalInstruction instruction_from(const json& j) {
  return AdditionalInstruction(category_from_string(j.at("category").get<std::string>()),
                               j.at("fillers").get<std::vector<std::string>>(),
                               source_from_string(j.at("source").get<std::string>()));
}

json category_list(const metrics::CategorySet& s) {
  json a = json::array();
  for (Category c : s) a.push_back(category_name(c));
  return a;
}

std::string new_session_id() {
  static std::mutex mu;
  static std::mt19937_64 rng{std::random_device{}()};
  std::lock_guard lock(mu);
  const auto v = rng();
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

std::string SessionState::refined_instruction() const {
  std::vector<AdditionalInstruction> parts;
  for (const auto& [c, ai] : selections) parts.push_back(ai);
  return refine_instruction(instruction, std::move(parts)).rendered;
}

void apply(SessionState& s, const store::SessionEvent& e) {
  if (e.seq != s.last_seq + 1) {
    throw Error(ErrorCode::kParseError, "event seq " + std::to_string(e.seq) +
                                            " does not follow " + std::to_string(s.last_seq));
  }
  if (s.last_seq > 0 && e.session_id != s.id) {
    throw Error(ErrorCode::kParseError, "event belongs to session '" + e.session_id + "'");
  }
  if ((e.kind == store::EventKind::kCreated) != (e.seq == 1)) {
    throw Error(ErrorCode::kParseError, "a session log must start with exactly one created event");
  }
  try {
    const json& p = e.payload;
    switch (e.kind) {
      case store::EventKind::kCreated:
        s.id = e.session_id;
        s.instruction = p.at("instruction").get<std::string>();
        s.input = p.at("input").get<std::string>();
        break;
      case store::EventKind::kIdentified:
        s.identified.clear();
        for (const auto& c : p.at("categories")) {
          s.identified.insert(category_from_string(c.get<std::string>()));
        }
        s.identification_done = true;
        break;
      case store::EventKind::kSuggested: {
        const Category c = category_from_string(p.at("category").get<std::string>());
        auto& list = s.suggestions[c];
        list.clear();
        for (const auto& cand : p.at("candidates")) list.push_back(instruction_from(cand));
        break;
      }
      case store::EventKind::kSelected: {
        auto ai = instruction_from(p.at("instruction"));
        const Category c = ai.category();
        s.selections.insert_or_assign(c, std::move(ai));
        if (p.value("manual", false)) {
          s.manual.insert(c);
        } else {
          s.manual.erase(c);
        }
        break;
      }
      case store::EventKind::kGenerated:
        s.generations.push_back({p.at("refined_instruction").get<std::string>(),
                                 p.at("outputs").get<std::vector<std::string>>()});
        break;
    }
  } catch (const json::exception& ex) {
    throw Error(ErrorCode::kParseError, "malformed session event: " + std::string(ex.what()));
  }
  s.last_seq = e.seq;
}

SessionState replay(const std::vector<store::SessionEvent>& events) {
  SessionState s;
  for (const auto& e : events) apply(s, e);
  return s;
}

store::OrderedJson to_json(const SessionState& s) {
  store::OrderedJson j;
  j["session_id"] = s.id;
  j["instruction"] = s.instruction;
  j["input"] = s.input;
  j["seq"] = s.last_seq;
  j["identification_done"] = s.identification_done;
  j["identified"] = category_list(s.identified);
  store::OrderedJson sugg = store::OrderedJson::object();
  for (const auto& [c, list] : s.suggestions) {
    store::OrderedJson a = store::OrderedJson::array();
    for (std::size_t i = 0; i < list.size(); ++i) {
      store::OrderedJson item = instruction_json(list[i]);
      item["index"] = i;
      a.push_back(std::move(item));
    }
    sugg[std::string(category_name(c))] = std::move(a);
  }
  j["suggestions"] = std::move(sugg);
  store::OrderedJson sel = store::OrderedJson::object();
  for (const auto& [c, ai] : s.selections) {
    store::OrderedJson item = instruction_json(ai);
    item["manual"] = s.manual.count(c) > 0;
    sel[std::string(category_name(c))] = std::move(item);
  }
  j["selections"] = std::move(sel);
  j["refined_instruction"] = s.refined_instruction();
  store::OrderedJson gens = store::OrderedJson::array();
  for (const auto& g : s.generations) {
    gens.push_back({{"refined_instruction", g.refined_instruction}, {"outputs", g.outputs}});
  }
  j["generations"] = std::move(gens);
  return j;
}

ClarificationService::ClarificationService(std::shared_ptr<llm::Gateway> gateway,
                                           pipeline::PipelineConfig config,
                                           std::filesystem::path sessions_dir,
                                           ServiceOptions options)
    : gateway_(std::move(gateway)),
      config_(std::move(config)),
      options_(std::move(options)),
      log_(std::move(sessions_dir)) {
  if (options_.icl_k > 0 && options_.demo_pool.items.empty()) {
    throw Error(ErrorCode::kEmptyPool, "ICL identification needs a demonstration pool");
  }
}

std::shared_ptr<ClarificationService::Slot> ClarificationService::slot(const std::string& id) {
  std::lock_guard lock(slots_mu_);
  if (auto it = slots_.find(id); it != slots_.end()) return it->second;
  if (!log_.exists(id)) throw Error(ErrorCode::kUnknownSession, "no session '" + id + "'");
  auto s = std::make_shared<Slot>();
  slots_[id] = s;
  return s;
}

SessionState& ClarificationService::loaded(Slot& s, const std::string& id) {
  if (!s.state) s.state = replay(log_.read(id));
  return *s.state;
}

void ClarificationService::record(SessionState& state, store::EventKind kind, json payload) {
  store::SessionEvent e;
  e.session_id = state.id;
  e.seq = state.last_seq + 1;
  e.kind = kind;
  e.payload = std::move(payload);
  e.at = store::utc_now();
  SessionState next = state;
  apply(next, e);  // validate before persisting
  log_.append(e);
  state = std::move(next);
}

CreateResult ClarificationService::create_session(const std::string& instruction,
                                                  const std::string& input) {
  if (text::is_blank(instruction)) {
    throw Error(ErrorCode::kEmptyInstruction, "instruction must not be empty");
  }
  auto s = std::make_shared<Slot>();
  std::string id;
  {
    std::lock_guard lock(slots_mu_);
    do {
      id = new_session_id();
    } while (slots_.count(id) || log_.exists(id));
    slots_[id] = s;
  }
  std::lock_guard lock(s->mu);
  SessionState fresh;
  fresh.id = id;
  s->state = fresh;
  record(*s->state, store::EventKind::kCreated, {{"instruction", instruction}, {"input", input}});

  std::vector<TaskInstance> demos;
  if (options_.icl_k > 0) {
    TaskInstance q;
    q.id = id;
    q.instruction = instruction;
    q.input = input;
    demos = pipeline::retrieve_demonstrations(q, options_.demo_pool,
                                              static_cast<std::size_t>(options_.icl_k),
                                              gateway_.get());
  }
  const auto req = pipeline::identify_request(instruction, input, demos, config_);
  const std::string response = gateway_->complete_cached(req).at(0);
  const auto parsed = llm::parse_identification(response);
  record(*s->state, store::EventKind::kIdentified,
         {{"categories", category_list(parsed.categories)},
          {"response", response},
          {"warnings", parsed.warnings}});
  return {id, parsed.categories};
}

std::vector<AdditionalInstruction> ClarificationService::suggest(const std::string& id,
                                                                 Category c,
                                                                 std::optional<int> n) {
  const int count = n.value_or(options_.default_suggestions);
  if (count < 1) throw Error(ErrorCode::kInvalidArgument, "n must be >= 1");
  auto s = slot(id);
  std::lock_guard lock(s->mu);
  SessionState& state = loaded(*s, id);
  auto cands = pipeline::suggest_candidates(state.instruction, state.input, c, count,
                                            pipeline::SuggestMode::kSampling, *gateway_, config_);
  json list = json::array();
  for (const auto& ai : cands.items) list.push_back(instruction_json(ai));
  record(state, store::EventKind::kSuggested,
         {{"category", category_name(c)}, {"candidates", list}, {"warnings", cands.warnings}});
  return state.suggestions[c];
}

RefinedInstruction ClarificationService::select(const std::string& id, Category c,
                                                const Choice& choice) {
  auto s = slot(id);
  std::lock_guard lock(s->mu);
  SessionState& state = loaded(*s, id);
  const auto it = state.suggestions.find(c);
  const bool has_suggestions = it != state.suggestions.end() && !it->second.empty();
  std::optional<AdditionalInstruction> picked;
  json payload;
  if (const auto* idx = std::get_if<std::size_t>(&choice)) {
    if (!has_suggestions || *idx >= it->second.size()) {
      throw Error(ErrorCode::kIndexOutOfRange,
                  "index " + std::to_string(*idx) + " is out of range for " +
                      std::to_string(has_suggestions ? it->second.size() : 0) + " " +
                      std::string(category_name(c)) + " suggestions");
    }
    picked = it->second[*idx];
    payload["index"] = *idx;
  } else {
    const auto& custom = std::get<std::string>(choice);
    picked = pipeline::repair_candidate(c, custom, Source::kHuman);
    if (!picked) {
      throw Error(ErrorCode::kUnrenderableCustomText,
                  "custom text cannot be rendered as a " + std::string(category_name(c)) +
                      " instruction");
    }
    payload["index"] = nullptr;
  }
  payload["instruction"] = instruction_json(*picked);
  payload["manual"] = !has_suggestions;
  record(state, store::EventKind::kSelected, std::move(payload));
  std::vector<AdditionalInstruction> parts;
  for (const auto& [cat, ai] : state.selections) parts.push_back(ai);
  return refine_instruction(state.instruction, std::move(parts));
}

GenerationConfig ClarificationService::default_generation() const {
  GenerationConfig g = config_.generation;
  g.num_samples = options_.generate_samples;
  return g;
}

GenerationEntry ClarificationService::generate(const std::string& id,
                                               std::optional<GenerationConfig> config) {
  const GenerationConfig g = config.value_or(default_generation());
  g.validate();
  auto s = slot(id);
  std::lock_guard lock(s->mu);
  SessionState& state = loaded(*s, id);
  const std::string refined = state.refined_instruction();
  auto req = llm::build_prompt(llm::PromptKind::kDownstream,
                               {{"instruction", refined}, {"input", state.input}});
  req.model_id = g.model_id;
  req.temperature = g.temperature;
  req.n_samples = g.num_samples;
  req.max_tokens = g.max_tokens;
  req.seed = config_.seed;
  GenerationEntry entry{refined, gateway_->complete_cached(req)};
  record(state, store::EventKind::kGenerated,
         {{"refined_instruction", entry.refined_instruction}, {"outputs", entry.outputs}});
  return entry;
}

SessionState ClarificationService::get_state(const std::string& id) {
  auto s = slot(id);
  std::lock_guard lock(s->mu);
  return loaded(*s, id);
}

}  // namespace ambig::service
