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

// Dataset construction with validation gates and the evaluation harnesses.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ambig/core.hpp"
#include "ambig/gateway.hpp"
#include "ambig/metrics.hpp"
#include "ambig/store.hpp"

namespace ambig::pipeline {

// ---- SNI filter ------------------------------------------------------------

enum class FilterRule { kNone, kOutputInInput, kTooShort, kNoAlphabetic };
std::string_view filter_rule_name(FilterRule r);

// First rule the record violates, or kNone when it is kept.
FilterRule sni_check(const store::RawRecord& record);
std::vector<store::RawRecord> sni_filter(const std::vector<store::RawRecord>& records);

TaskInstance to_instance(const store::RawRecord& record);

// ---- configuration ---------------------------------------------------------

struct PipelineConfig {
  GenerationConfig generation;  // downstream sampling for both gates and evals
  std::string annotator_model = "gpt-3.5-turbo";
  double annotator_temperature = 1.0;
  std::string judge_model = "gpt-4";
  int candidates_per_category = 1;
  double alpha = metrics::kDefaultAlpha;
  std::int64_t seed = 0;
  int parallelism = 4;
  std::function<void(const std::string&)> log;

  void validate() const;
};

// ---- generation and validation --------------------------------------------

struct Candidates {
  std::vector<AdditionalInstruction> items;
  std::vector<std::string> warnings;
};

// Turns a raw completion into a template-conformant instruction: a full
// rendering is parsed back, anything else is treated as the filler. Returns
// nullopt for empty or unrenderable text.
std::optional<AdditionalInstruction> repair_candidate(Category c, std::string_view response,
                                                      Source source = Source::kLlm);
std::optional<std::string> repair_generic(std::string_view response);

// Context, Planning, Style or Theme. Throws Error(kInvalidArgument) for the
// rule-based categories.
Candidates generate_candidates(const TaskInstance& instance, Category c,
                               llm::Gateway& gateway, int n, const PipelineConfig& config);
// "Additional information: ..." sentences for the generic baseline.
std::vector<std::string> generate_generic_candidates(const TaskInstance& instance,
                                                     llm::Gateway& gateway, int n,
                                                     const PipelineConfig& config,
                                                     std::vector<std::string>* warnings = nullptr);

// Empty when the candidate passes; otherwise the reason it is rejected.
std::string curation_issue(const TaskInstance& instance, const AdditionalInstruction& candidate,
                           const std::vector<AdditionalInstruction>& accepted_elsewhere);

// Retries once with a different seed when the judgment is unparseable.
ClarityJudgment validate_clarity(const TaskInstance& instance,
                                 const AdditionalInstruction& candidate, llm::Gateway& gateway,
                                 const PipelineConfig& config);

struct UtilityResult {
  metrics::SignificanceResult test;
  double mean_init = 0.0;
  double mean_refined = 0.0;
  double mean_gain = 0.0;  // mean_refined - mean_init
};

UtilityResult validate_utility(const TaskInstance& instance,
                               const AdditionalInstruction& candidate, llm::Gateway& gateway,
                               const PipelineConfig& config);

// Curation filters (LLM candidates only), then the clarity gate, then the
// utility gate.
store::CandidateRecord gate_candidate(const TaskInstance& instance,
                                      const AdditionalInstruction& candidate,
                                      const std::vector<AdditionalInstruction>& accepted_elsewhere,
                                      llm::Gateway& gateway, const PipelineConfig& config);

// Rule annotator output for Keywords and Length, generated candidates for
// the rest.
Candidates category_candidates(const TaskInstance& instance, Category c, llm::Gateway& gateway,
                               const PipelineConfig& config);

// Attaches the first candidate of each requested category, unvalidated.
std::vector<TaskInstance> annotate_instances(const std::vector<TaskInstance>& instances,
                                             const std::vector<Category>& categories,
                                             llm::Gateway& gateway, const PipelineConfig& config,
                                             std::vector<std::string>* warnings = nullptr);

struct BuildResult {
  std::vector<TaskInstance> dataset;
  std::vector<store::CandidateRecord> audit;
  std::vector<std::string> warnings;
};

// Runs the gates on every existing annotation; keeps the accepted ones.
BuildResult validate_dataset(const std::vector<TaskInstance>& instances, llm::Gateway& gateway,
                             const PipelineConfig& config);

// Keywords and Length come from the rule annotators; the other categories are
// generated. Every candidate must pass the clarity gate and then the utility
// gate. Among accepted candidates of one category the highest mean gain wins,
// then the lower p-value, then the earlier candidate.
BuildResult build_dataset(const std::vector<TaskInstance>& instances, llm::Gateway& gateway,
                          const PipelineConfig& config);

// ---- mitigation ------------------------------------------------------------

enum class Method { kBaseline, kGeneric, kTaxonomy };
std::string_view method_name(Method m);
Method method_from_string(std::string_view s);

struct InstanceMitigation {
  std::string id;
  std::string task;
  std::vector<Category> categories;
  std::string instruction;  // as sent for the method arm
  bool flagged = false;     // scored as baseline for lack of annotations
  double rl_baseline = 0.0, rl_method = 0.0;
  double intra_baseline = 0.0, intra_method = 0.0;
  std::optional<double> para_baseline, para_method;

  double delta_rl() const { return rl_method - rl_baseline; }
  double delta_intra() const { return intra_method - intra_baseline; }
};

struct GroupSummary {
  std::size_t count = 0;
  double rl_baseline = 0.0, rl_method = 0.0;
  double intra_baseline = 0.0, intra_method = 0.0;
  double delta_rl = 0.0, delta_intra = 0.0;
  std::optional<double> delta_para;
};

struct MitigationReport {
  Method method = Method::kBaseline;
  PipelineConfig config;
  std::vector<InstanceMitigation> instances;
  GroupSummary overall;
  std::map<std::string, GroupSummary> per_category;  // every category it carries
  std::map<std::string, GroupSummary> per_task;
  std::size_t flagged = 0;
};

// Renamed task labels used in per-task breakdowns.
std::string display_task_name(std::string_view task);

MitigationReport run_mitigation_eval(const std::vector<TaskInstance>& dataset,
                                     llm::Gateway& gateway, Method method,
                                     const PipelineConfig& config);

// ---- identification --------------------------------------------------------

struct DemoPool {
  std::vector<TaskInstance> items;
};

// Top-k pool items by similarity of instruction + input. Embedding cosine when
// the gateway supports it, TF-IDF cosine otherwise. Ties go to the smaller id.
// Throws Error(kEmptyPool).
std::vector<TaskInstance> retrieve_demonstrations(const TaskInstance& query,
                                                  const DemoPool& pool, std::size_t k,
                                                  llm::Gateway* gateway = nullptr);

// TF-IDF cosine similarities of the query against every document.
std::vector<double> tfidf_similarities(const std::string& query,
                                       const std::vector<std::string>& documents);

// Identify prompt for one instruction, demos placed most-similar last.
llm::ChatRequest identify_request(const std::string& instruction, const std::string& input,
                                  const std::vector<TaskInstance>& demos,
                                  const PipelineConfig& config);

struct InstanceIdentification {
  std::string id;
  metrics::CategorySet gold;
  metrics::CategorySet predicted;
  std::string response;
  std::vector<std::string> warnings;
};

struct IdentificationReport {
  int icl_k = 0;
  PipelineConfig config;
  metrics::ClassificationReport metrics;
  std::vector<InstanceIdentification> instances;
};

// Throws Error(kEmptyPool) when icl_k > 0 and the pool is empty, and
// Error(kInvalidArgument) when pool and dataset share ids.
IdentificationReport run_identification_eval(const std::vector<TaskInstance>& dataset,
                                             llm::Gateway& gateway, int icl_k,
                                             const DemoPool& pool, const PipelineConfig& config);

// ---- suggestion ------------------------------------------------------------

enum class SuggestMode { kSampling, kBatch };
std::string_view suggest_mode_name(SuggestMode m);
SuggestMode suggest_mode_from_string(std::string_view s);

llm::ChatRequest suggest_request(const std::string& instruction, const std::string& input,
                                 Category c, int n, SuggestMode mode,
                                 const PipelineConfig& config);

// Completions of a Suggest request repaired into instructions; unusable
// responses are reported in `warnings`.
Candidates suggest_candidates(const std::string& instruction, const std::string& input,
                              Category c, int n, SuggestMode mode, llm::Gateway& gateway,
                              const PipelineConfig& config);

struct SuggestionItem {
  std::string id;
  Category category = Category::kContext;
  std::string gold;
  std::vector<std::string> candidates;
  double rl_at_n = 0.0;
  std::optional<double> para_sim_at_n;
  std::optional<double> intra_rl;  // absent with fewer than two candidates
};

struct SuggestionReport {
  int n = 10;
  SuggestMode mode = SuggestMode::kSampling;
  PipelineConfig config;
  std::vector<SuggestionItem> items;
  double rl_at_n = 0.0;
  std::optional<double> para_sim_at_n;
  std::optional<double> intra_rl;
};

SuggestionReport run_suggestion_eval(const std::vector<TaskInstance>& dataset,
                                     llm::Gateway& gateway, int n, SuggestMode mode,
                                     const PipelineConfig& config);

// ---- reports ---------------------------------------------------------------

inline constexpr int kReportSchemaVersion = 1;

store::OrderedJson to_json(const MitigationReport& r);
store::OrderedJson to_json(const IdentificationReport& r);
store::OrderedJson to_json(const SuggestionReport& r);
std::string to_csv(const MitigationReport& r);
std::string to_csv(const IdentificationReport& r);
std::string to_csv(const SuggestionReport& r);

}  // namespace ambig::pipeline
