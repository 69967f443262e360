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

#include <algorithm>
#include <cctype>

#include "ambig/error.hpp"
#include "ambig/pipeline.hpp"
#include "ambig/rule_annotators.hpp"
#include "parallel.hpp"
#include "pipeline_internal.hpp"
#include "text_util.hpp"

namespace ambig::pipeline {

// ---- SNI filter ------------------------------------------------------------

std::string_view filter_rule_name(FilterRule r) {
  switch (r) {
    case FilterRule::kNone: return "kept";
    case FilterRule::kOutputInInput: return "output contained in input or instruction";
    case FilterRule::kTooShort: return "output has two words or fewer";
    case FilterRule::kNoAlphabetic: return "output has only symbols or numbers";
  }
  return "kept";
}

FilterRule sni_check(const store::RawRecord& r) {
  const std::string_view out = text::trim(r.output);
  if (out.empty() || r.input.find(out) != std::string::npos ||
      r.instruction.find(out) != std::string::npos) {
    return FilterRule::kOutputInInput;
  }
  const auto tokens = metrics::tokenize(out);
  if (tokens.size() <= 2) return FilterRule::kTooShort;
  const bool alphabetic = std::any_of(tokens.begin(), tokens.end(), [](const std::string& t) {
    return std::any_of(t.begin(), t.end(), [](char ch) {
      const auto u = static_cast<unsigned char>(ch);
      return (u >= 'a' && u <= 'z') || u >= 0x80;
    });
  });
  if (!alphabetic) return FilterRule::kNoAlphabetic;
  return FilterRule::kNone;
}

std::vector<store::RawRecord> sni_filter(const std::vector<store::RawRecord>& records) {
  std::vector<store::RawRecord> out;
  for (const auto& r : records) {
    if (sni_check(r) == FilterRule::kNone) out.push_back(r);
  }
  return out;
}

TaskInstance to_instance(const store::RawRecord& r) {
  TaskInstance t;
  t.id = r.id;
  t.task_name = r.task;
  t.instruction = r.instruction;
  t.input = r.input;
  t.reference = r.output;
  return t;
}

void PipelineConfig::validate() const {
  generation.validate();
  if (candidates_per_category < 1) {
    throw Error(ErrorCode::kInvalidArgument, "candidates_per_category must be >= 1");
  }
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "alpha must lie in (0, 1)");
  }
  if (!(annotator_temperature >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "annotator temperature must be >= 0");
  }
}

namespace detail {

void log(const PipelineConfig& config, const std::string& msg) {
  if (config.log) config.log(msg);
}

llm::ChatRequest with_model(llm::ChatRequest r, const std::string& model, double temperature,
                            int n, const PipelineConfig& config) {
  r.model_id = model;
  r.temperature = temperature;
  r.n_samples = n;
  r.max_tokens = config.generation.max_tokens;
  r.seed = config.seed;
  return r;
}

std::vector<std::string> sample_outputs(llm::PromptKind kind, const std::string& instruction,
                                        const TaskInstance& instance, llm::Gateway& gateway,
                                        const PipelineConfig& config) {
  auto req = llm::build_prompt(kind, {{"instruction", instruction}, {"input", instance.input}});
  req = with_model(std::move(req), config.generation.model_id, config.generation.temperature,
                   config.generation.num_samples, config);
  return gateway.complete_cached(req);
}

std::vector<double> rouge_scores(const std::vector<std::string>& outputs,
                                 const std::string& reference) {
  const auto ref = metrics::tokenize(reference);
  std::vector<double> out;
  out.reserve(outputs.size());
  for (const auto& o : outputs) out.push_back(metrics::rouge_l(metrics::tokenize(o), ref).f1);
  return out;
}

std::string normalize_response(std::string_view response) {
  std::string s;
  bool space = false;
  for (char c : text::trim(response)) {
    if (text::is_space(c)) {
      space = true;
      continue;
    }
    if (space && !s.empty()) s += ' ';
    space = false;
    s += c;
  }
  std::string_view v = s;
  // Labels that models tend to echo from the prompt.
  for (std::string_view label : {"Additional Instruction:", "Template:", "Answer:"}) {
    if (v.size() >= label.size() && text::iequals(v.substr(0, label.size()), label)) {
      v = text::trim(v.substr(label.size()));
    }
  }
  while (v.size() >= 2 && (v.front() == '"' || v.front() == '\'' || v.front() == '`') &&
         v.back() == v.front()) {
    v = text::trim(v.substr(1, v.size() - 2));
  }
  return std::string(v);
}

}  // namespace detail

using detail::normalize_response;

std::optional<AdditionalInstruction> repair_candidate(Category c, std::string_view response,
                                                      Source source) {
  const std::string s = normalize_response(response);
  if (s.empty()) return std::nullopt;
  if (auto f = extract_fillers(c, s)) return AdditionalInstruction(c, std::move(*f), source);

  const Template& t = template_for(c);
  std::string_view body = s;
  if (text::starts_with(body, t.prefix())) body.remove_prefix(t.prefix().size());
  std::string_view suffix = t.suffix();
  if (!suffix.empty() && body.size() >= suffix.size() &&
      body.substr(body.size() - suffix.size()) == suffix) {
    body.remove_suffix(suffix.size());
  } else {
    std::string_view core = suffix;
    if (!core.empty() && core.back() == '.') core.remove_suffix(1);
    if (!core.empty() && body.size() > core.size() &&
        body.substr(body.size() - core.size()) == core) {
      body.remove_suffix(core.size());
    } else if (!suffix.empty() && suffix.back() == '.' && !body.empty() && body.back() == '.') {
      body.remove_suffix(1);
    }
  }
  body = text::trim(body);
  if (body.empty()) return std::nullopt;
  std::string full(t.prefix());
  full += body;
  full += suffix;
  if (auto f = extract_fillers(c, full)) return AdditionalInstruction(c, std::move(*f), source);
  try {
    return AdditionalInstruction(c, {std::string(body)}, source);
  } catch (const Error&) {
    return std::nullopt;
  }
}

std::optional<std::string> repair_generic(std::string_view response) {
  const std::string s = normalize_response(response);
  if (s.empty()) return std::nullopt;
  if (extract_generic_filler(s)) return s;
  return render_generic(s);
}

Candidates generate_candidates(const TaskInstance& instance, Category c,
                               llm::Gateway& gateway, int n, const PipelineConfig& config) {
  const auto kind = llm::annotate_kind_for(c);
  if (!kind) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string(category_name(c)) + " is annotated by rules, not generated");
  }
  if (n < 1) throw Error(ErrorCode::kInvalidArgument, "n must be >= 1");
  auto req = llm::build_prompt(*kind, {{"instruction", instance.instruction},
                                       {"input", instance.input},
                                       {"output", instance.reference},
                                       {"task_category", display_task_name(instance.task_name)}});
  req = detail::with_model(std::move(req), config.annotator_model, config.annotator_temperature,
                           n, config);
  Candidates out;
  for (const auto& response : gateway.complete_cached(req)) {
    auto ai = repair_candidate(c, response);
    if (!ai) {
      out.warnings.push_back(instance.id + ": dropped unusable " +
                             std::string(category_name(c)) + " completion '" +
                             normalize_response(response) + "'");
      continue;
    }
    if (std::find(out.items.begin(), out.items.end(), *ai) == out.items.end()) {
      out.items.push_back(std::move(*ai));
    }
  }
  for (const auto& w : out.warnings) detail::log(config, w);
  return out;
}

std::vector<std::string> generate_generic_candidates(const TaskInstance& instance,
                                                     llm::Gateway& gateway, int n,
                                                     const PipelineConfig& config,
                                                     std::vector<std::string>* warnings) {
  auto req = llm::build_prompt(llm::PromptKind::kAnnotateGeneric,
                               {{"instruction", instance.instruction},
                                {"input", instance.input},
                                {"output", instance.reference}});
  req = detail::with_model(std::move(req), config.annotator_model, config.annotator_temperature,
                           n, config);
  std::vector<std::string> out;
  for (const auto& response : gateway.complete_cached(req)) {
    auto t = repair_generic(response);
    if (!t) {
      const std::string w = instance.id + ": dropped empty generic completion";
      detail::log(config, w);
      if (warnings) warnings->push_back(w);
      continue;
    }
    out.push_back(std::move(*t));
  }
  return out;
}

namespace {

std::string lower_trim(std::string_view s) { return text::to_lower(text::trim(s)); }

bool contains_token_run(const metrics::TokenSeq& hay, const metrics::TokenSeq& needle) {
  if (needle.empty() || needle.size() > hay.size()) return false;
  return std::search(hay.begin(), hay.end(), needle.begin(), needle.end()) != hay.end();
}

}  // namespace

std::string curation_issue(const TaskInstance& instance, const AdditionalInstruction& candidate,
                           const std::vector<AdditionalInstruction>& accepted_elsewhere) {
  const std::string filler = text::join(candidate.fillers(), " ");
  if (contains_token_run(metrics::tokenize(filler), metrics::tokenize(instance.reference))) {
    return "reveals the reference output";
  }
  const std::string lf = lower_trim(filler);
  if (lf.size() >= 4 && (text::to_lower(instance.instruction).find(lf) != std::string::npos ||
                         text::to_lower(instance.input).find(lf) != std::string::npos)) {
    return "repeats the instruction or input";
  }
  for (const auto& other : accepted_elsewhere) {
    if (other.category() != candidate.category() &&
        lower_trim(text::join(other.fillers(), " ")) == lf) {
      return "duplicates the " + std::string(category_name(other.category())) + " annotation";
    }
  }
  return {};
}

ClarityJudgment validate_clarity(const TaskInstance& instance,
                                 const AdditionalInstruction& candidate, llm::Gateway& gateway,
                                 const PipelineConfig& config) {
  auto req = llm::build_prompt(
      llm::PromptKind::kClarityJudge,
      {{"instruction", instance.instruction},
       {"input", instance.input},
       {"output", instance.reference},
       {"ambiguity_category", std::string(category_name(candidate.category()))},
       {"description", std::string(category_definition(candidate.category()))},
       {"additional_instruction", candidate.text()}});
  req = detail::with_model(std::move(req), config.judge_model, 0.0, 1, config);
  try {
    return llm::parse_clarity(gateway.complete_cached(req).at(0));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kUnparseableJudgment) throw;
    detail::log(config, instance.id + ": " + e.what() + "; asking again");
  }
  req.seed = config.seed + 1;
  return llm::parse_clarity(gateway.complete_cached(req).at(0));
}

UtilityResult validate_utility(const TaskInstance& instance,
                               const AdditionalInstruction& candidate, llm::Gateway& gateway,
                               const PipelineConfig& config) {
  if (config.generation.num_samples < 2) {
    throw Error(ErrorCode::kTooFewSamples, "utility validation needs num_samples >= 2");
  }
  const auto refined = refine_instruction(instance.instruction, {candidate}).rendered;
  const auto init_out = detail::sample_outputs(llm::PromptKind::kValidateUtility,
                                               instance.instruction, instance, gateway, config);
  const auto refined_out = detail::sample_outputs(llm::PromptKind::kValidateUtility, refined,
                                                  instance, gateway, config);
  const auto a = detail::rouge_scores(init_out, instance.reference);
  const auto b = detail::rouge_scores(refined_out, instance.reference);
  UtilityResult r;
  r.test = metrics::significance_test(a, b, config.alpha);
  r.mean_init = metrics::mean(a);
  r.mean_refined = metrics::mean(b);
  r.mean_gain = r.mean_refined - r.mean_init;
  return r;
}

store::CandidateRecord gate_candidate(const TaskInstance& instance,
                                      const AdditionalInstruction& cand,
                                      const std::vector<AdditionalInstruction>& accepted_elsewhere,
                                      llm::Gateway& gateway, const PipelineConfig& config) {
  store::CandidateRecord rec;
  rec.instance_id = instance.id;
  rec.category = cand.category();
  rec.candidate = cand;
  if (cand.source() == Source::kLlm) {
    rec.note = curation_issue(instance, cand, accepted_elsewhere);
    if (!rec.note.empty()) return rec;
  }
  rec.clarity = validate_clarity(instance, cand, gateway, config);
  if (*rec.clarity != ClarityJudgment::kLessAmbiguous) {
    rec.note = "clarity: " + std::string(clarity_name(*rec.clarity));
    return rec;
  }
  const UtilityResult u = validate_utility(instance, cand, gateway, config);
  rec.utility = u.test;
  rec.mean_gain = u.mean_gain;
  rec.accepted = u.test.significant;
  if (!rec.accepted) rec.note = "utility: not significant";
  return rec;
}

namespace {

Annotation accepted_annotation(const store::CandidateRecord& rec) {
  return Annotation{*rec.candidate,
                    ValidationInfo{rec.clarity, rec.utility->p_value, rec.mean_gain}};
}

struct InstanceBuild {
  TaskInstance instance;
  std::vector<store::CandidateRecord> audit;
  std::vector<std::string> warnings;
};

InstanceBuild build_one(const TaskInstance& source, llm::Gateway& gateway,
                        const PipelineConfig& config) {
  InstanceBuild out;
  out.instance = source;
  out.instance.annotations.clear();
  std::vector<AdditionalInstruction> accepted_so_far;

  for (Category c : kAllCategories) {
    auto gathered = category_candidates(source, c, gateway, config);
    out.warnings.insert(out.warnings.end(), gathered.warnings.begin(), gathered.warnings.end());
    auto& candidates = gathered.items;

    std::optional<std::size_t> best;
    for (auto& cand : candidates) {
      out.audit.push_back(gate_candidate(source, cand, accepted_so_far, gateway, config));
      const std::size_t idx = out.audit.size() - 1;
      if (!out.audit[idx].accepted) continue;
      if (!best) {
        best = idx;
        continue;
      }
      const auto& cur = out.audit[*best];
      const auto& nxt = out.audit[idx];
      if (*nxt.mean_gain > *cur.mean_gain ||
          (*nxt.mean_gain == *cur.mean_gain && nxt.utility->p_value < cur.utility->p_value)) {
        best = idx;
      }
    }
    if (best) {
      const auto& rec = out.audit[*best];
      out.instance.add_annotation(accepted_annotation(rec));
      accepted_so_far.push_back(*rec.candidate);
    }
  }
  return out;
}

}  // namespace

Candidates category_candidates(const TaskInstance& instance, Category c, llm::Gateway& gateway,
                               const PipelineConfig& config) {
  Candidates out;
  if (c == Category::kKeywords) {
    if (auto k = rules::annotate_keywords(instance.reference)) out.items.push_back(*k);
  } else if (c == Category::kLength) {
    out.items.push_back(rules::annotate_length(instance.reference));
  } else {
    out = generate_candidates(instance, c, gateway, config.candidates_per_category, config);
  }
  return out;
}

std::vector<TaskInstance> annotate_instances(const std::vector<TaskInstance>& instances,
                                             const std::vector<Category>& categories,
                                             llm::Gateway& gateway, const PipelineConfig& config,
                                             std::vector<std::string>* warnings) {
  config.validate();
  std::vector<TaskInstance> out(instances.size());
  std::vector<std::vector<std::string>> notes(instances.size());
  ambig::detail::parallel_for(instances.size(), config.parallelism, [&](std::size_t i) {
    TaskInstance t = instances[i];
    t.annotations.clear();
    for (Category c : categories) {
      auto got = category_candidates(t, c, gateway, config);
      notes[i].insert(notes[i].end(), got.warnings.begin(), got.warnings.end());
      if (!got.items.empty()) t.add_annotation(Annotation{got.items.front(), std::nullopt});
    }
    out[i] = std::move(t);
  });
  if (warnings) {
    for (auto& n : notes) warnings->insert(warnings->end(), n.begin(), n.end());
  }
  return out;
}

BuildResult validate_dataset(const std::vector<TaskInstance>& instances, llm::Gateway& gateway,
                             const PipelineConfig& config) {
  config.validate();
  std::vector<std::pair<TaskInstance, std::vector<store::CandidateRecord>>> parts(
      instances.size());
  ambig::detail::parallel_for(instances.size(), config.parallelism, [&](std::size_t i) {
    TaskInstance t = instances[i];
    t.annotations.clear();
    std::vector<AdditionalInstruction> accepted;
    for (const auto& a : instances[i].annotations) {
      auto rec = gate_candidate(instances[i], a.instruction, accepted, gateway, config);
      if (rec.accepted) {
        t.add_annotation(accepted_annotation(rec));
        accepted.push_back(a.instruction);
      }
      parts[i].second.push_back(std::move(rec));
    }
    parts[i].first = std::move(t);
  });
  BuildResult out;
  for (auto& [t, recs] : parts) {
    out.dataset.push_back(std::move(t));
    for (auto& r : recs) out.audit.push_back(std::move(r));
  }
  return out;
}

BuildResult build_dataset(const std::vector<TaskInstance>& instances, llm::Gateway& gateway,
                          const PipelineConfig& config) {
  config.validate();
  std::vector<InstanceBuild> parts(instances.size());
  ambig::detail::parallel_for(instances.size(), config.parallelism, [&](std::size_t i) {
    parts[i] = build_one(instances[i], gateway, config);
  });
  BuildResult out;
  for (auto& p : parts) {
    out.dataset.push_back(std::move(p.instance));
    for (auto& r : p.audit) out.audit.push_back(std::move(r));
    for (auto& w : p.warnings) out.warnings.push_back(std::move(w));
  }
  return out;
}

}  // namespace ambig::pipeline
