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
#include <cmath>
#include <numeric>
#include <set>
#include <unordered_map>

#include "ambig/error.hpp"
#include "ambig/pipeline.hpp"
#include "parallel.hpp"
#include "pipeline_internal.hpp"
#include "text_util.hpp"

namespace ambig::pipeline {

std::string_view method_name(Method m) {
  switch (m) {
    case Method::kBaseline: return "baseline";
    case Method::kGeneric: return "generic";
    case Method::kTaxonomy: return "taxonomy";
  }
  return "baseline";
}

Method method_from_string(std::string_view s) {
  for (auto m : {Method::kBaseline, Method::kGeneric, Method::kTaxonomy}) {
    if (text::iequals(s, method_name(m))) return m;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown method '" + std::string(s) +
                                               "' (expected baseline, generic or taxonomy)");
}

std::string display_task_name(std::string_view task) {
  static const std::pair<std::string_view, std::string_view> kRenames[] = {
      {"question answering", "Long-form question answering (QA)"},
      {"information extraction", "Attribute Generation"},
      {"named entity recognition", "Generation-based Named Entity Recognition (NER)"},
      {"keyword tagging", "Keyword Generation"},
      {"overlap extraction", "Generation-based Overlap Extraction (OE)"},
  };
  const auto t = text::trim(task);
  if (t.empty()) return "(unknown)";
  const std::string lower = text::to_lower(t);
  for (const auto& [from, to] : kRenames) {
    if (lower == from) return std::string(to);
  }
  return std::string(t);
}

namespace {

struct Arm {
  double rl = 0.0;
  double intra = 0.0;
  std::optional<double> para;
};

Arm score_arm(const std::vector<std::string>& outputs, const TaskInstance& inst,
              llm::Gateway& gateway) {
  Arm a;
  a.rl = metrics::mean(detail::rouge_scores(outputs, inst.reference));
  a.intra = metrics::intra_rl(outputs);
  if (gateway.supports_embed()) {
    std::vector<std::string> texts = outputs;
    texts.push_back(inst.reference);
    const auto vecs = gateway.embed(texts);
    double sum = 0.0;
    for (std::size_t i = 0; i < outputs.size(); ++i) sum += llm::cosine(vecs[i], vecs.back());
    a.para = sum / static_cast<double>(outputs.size());
  }
  return a;
}

GroupSummary summarize(const std::vector<const InstanceMitigation*>& items) {
  GroupSummary g;
  g.count = items.size();
  if (items.empty()) return g;
  double para_sum = 0.0;
  std::size_t para_n = 0;
  for (const auto* m : items) {
    g.rl_baseline += m->rl_baseline;
    g.rl_method += m->rl_method;
    g.intra_baseline += m->intra_baseline;
    g.intra_method += m->intra_method;
    g.delta_rl += m->delta_rl();
    g.delta_intra += m->delta_intra();
    if (m->para_baseline && m->para_method) {
      para_sum += *m->para_method - *m->para_baseline;
      ++para_n;
    }
  }
  const double n = static_cast<double>(items.size());
  g.rl_baseline /= n;
  g.rl_method /= n;
  g.intra_baseline /= n;
  g.intra_method /= n;
  g.delta_rl /= n;
  g.delta_intra /= n;
  if (para_n) g.delta_para = para_sum / static_cast<double>(para_n);
  return g;
}

}  // namespace

MitigationReport run_mitigation_eval(const std::vector<TaskInstance>& dataset,
                                     llm::Gateway& gateway, Method method,
                                     const PipelineConfig& config) {
  config.validate();
  if (config.generation.num_samples < 2) {
    throw Error(ErrorCode::kTooFewSamples, "mitigation needs num_samples >= 2 for Intra-RL");
  }
  MitigationReport report;
  report.method = method;
  report.config = config;
  report.instances.resize(dataset.size());

  ambig::detail::parallel_for(dataset.size(), config.parallelism, [&](std::size_t i) {
    const TaskInstance& inst = dataset[i];
    InstanceMitigation m;
    m.id = inst.id;
    m.task = display_task_name(inst.task_name);
    m.categories = inst.categories();
    m.instruction = inst.instruction;
    if (method == Method::kTaxonomy) {
      if (inst.annotations.empty()) {
        m.flagged = true;
      } else {
        m.instruction = refine_instruction(inst.instruction, inst.additional_instructions()).rendered;
      }
    } else if (method == Method::kGeneric) {
      const auto generic = generate_generic_candidates(inst, gateway, 1, config);
      if (generic.empty()) {
        m.flagged = true;
      } else {
        m.instruction = inst.instruction + std::string(kDefaultSeparator) + generic.front();
      }
    }
    const auto base_out = detail::sample_outputs(llm::PromptKind::kDownstream, inst.instruction,
                                                 inst, gateway, config);
    const Arm base = score_arm(base_out, inst, gateway);
    Arm arm = base;
    if (m.instruction != inst.instruction) {
      const auto out = detail::sample_outputs(llm::PromptKind::kDownstream, m.instruction, inst,
                                              gateway, config);
      arm = score_arm(out, inst, gateway);
    }
    m.rl_baseline = base.rl;
    m.intra_baseline = base.intra;
    m.para_baseline = base.para;
    m.rl_method = arm.rl;
    m.intra_method = arm.intra;
    m.para_method = arm.para;
    if (m.flagged) {
      detail::log(config, inst.id + ": no " + std::string(method_name(method)) +
                              " annotation; scored as baseline");
    }
    report.instances[i] = std::move(m);
  });

  std::vector<const InstanceMitigation*> all;
  std::map<std::string, std::vector<const InstanceMitigation*>> by_cat, by_task;
  for (const auto& m : report.instances) {
    all.push_back(&m);
    by_task[m.task].push_back(&m);
    for (Category c : m.categories) by_cat[std::string(category_name(c))].push_back(&m);
    if (m.flagged) ++report.flagged;
  }
  report.overall = summarize(all);
  for (const auto& [k, v] : by_cat) report.per_category[k] = summarize(v);
  for (const auto& [k, v] : by_task) report.per_task[k] = summarize(v);
  return report;
}

// ---- retrieval -------------------------------------------------------------

namespace {

std::string retrieval_text(const TaskInstance& t) { return t.instruction + "\n" + t.input; }

using SparseVec = std::unordered_map<std::string, double>;

double sparse_cosine(const SparseVec& a, const SparseVec& b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (const auto& [k, v] : a) {
    na += v * v;
    if (auto it = b.find(k); it != b.end()) dot += v * it->second;
  }
  for (const auto& [k, v] : b) nb += v * v;
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

// Ranks pool items against queries; embeds the pool once per run.
class Retriever {
 public:
  Retriever(const DemoPool& pool, llm::Gateway* gateway) : pool_(pool), gateway_(gateway) {
    if (pool.items.empty()) throw Error(ErrorCode::kEmptyPool, "demonstration pool is empty");
    for (const auto& t : pool.items) docs_.push_back(retrieval_text(t));
    if (gateway_ && gateway_->supports_embed()) {
      pool_vecs_ = gateway_->embed(docs_);
    } else {
      gateway_ = nullptr;
    }
  }

  std::vector<TaskInstance> top_k(const TaskInstance& query, std::size_t k) const {
    std::vector<double> sims;
    if (gateway_) {
      const auto q = gateway_->embed({retrieval_text(query)}).at(0);
      for (const auto& v : pool_vecs_) sims.push_back(llm::cosine(q, v));
    } else {
      sims = tfidf_similarities(retrieval_text(query), docs_);
    }
    std::vector<std::size_t> order(pool_.items.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (sims[a] != sims[b]) return sims[a] > sims[b];
      return pool_.items[a].id < pool_.items[b].id;
    });
    std::vector<TaskInstance> out;
    for (std::size_t i = 0; i < std::min(k, order.size()); ++i) {
      out.push_back(pool_.items[order[i]]);
    }
    return out;
  }

 private:
  const DemoPool& pool_;
  llm::Gateway* gateway_;
  std::vector<std::string> docs_;
  std::vector<llm::Embedding> pool_vecs_;
};

}  // namespace

std::vector<double> tfidf_similarities(const std::string& query,
                                       const std::vector<std::string>& documents) {
  std::vector<std::unordered_map<std::string, double>> tf(documents.size());
  std::unordered_map<std::string, double> df;
  for (std::size_t i = 0; i < documents.size(); ++i) {
    for (auto& tok : metrics::tokenize(documents[i])) tf[i][tok] += 1.0;
    for (const auto& [tok, _] : tf[i]) df[tok] += 1.0;
  }
  const double n = static_cast<double>(documents.size());
  auto idf = [&](const std::string& tok) {
    const auto it = df.find(tok);
    const double d = it == df.end() ? 0.0 : it->second;
    return std::log((1.0 + n) / (1.0 + d)) + 1.0;
  };
  SparseVec q;
  for (auto& tok : metrics::tokenize(query)) q[tok] += 1.0;
  for (auto& [tok, v] : q) v *= idf(tok);
  std::vector<double> out;
  out.reserve(documents.size());
  for (auto& doc : tf) {
    for (auto& [tok, v] : doc) v *= idf(tok);
    out.push_back(sparse_cosine(q, doc));
  }
  return out;
}

std::vector<TaskInstance> retrieve_demonstrations(const TaskInstance& query,
                                                  const DemoPool& pool, std::size_t k,
                                                  llm::Gateway* gateway) {
  return Retriever(pool, gateway).top_k(query, k);
}

// ---- identification --------------------------------------------------------

llm::ChatRequest identify_request(const std::string& instruction, const std::string& input,
                                  const std::vector<TaskInstance>& demos,
                                  const PipelineConfig& config) {
  std::string block;
  // Most similar demonstration sits closest to the query.
  for (auto it = demos.rbegin(); it != demos.rend(); ++it) {
    const auto cats = it->categories();
    block += llm::format_identify_demo(it->instruction, it->input,
                                       metrics::CategorySet(cats.begin(), cats.end()));
  }
  auto req = llm::build_prompt(llm::PromptKind::kIdentify,
                               {{"instruction", instruction},
                                {"input", input},
                                {"category_list", llm::default_category_list()},
                                {"demonstrations", block}});
  return detail::with_model(std::move(req), config.judge_model, 0.0, 1, config);
}

IdentificationReport run_identification_eval(const std::vector<TaskInstance>& dataset,
                                             llm::Gateway& gateway, int icl_k,
                                             const DemoPool& pool, const PipelineConfig& config) {
  if (icl_k < 0) throw Error(ErrorCode::kInvalidArgument, "icl_k must be >= 0");
  if (dataset.empty()) throw Error(ErrorCode::kInvalidArgument, "dataset is empty");
  std::optional<Retriever> retriever;
  if (icl_k > 0) {
    std::set<std::string> eval_ids;
    for (const auto& t : dataset) eval_ids.insert(t.id);
    for (const auto& t : pool.items) {
      if (eval_ids.count(t.id)) {
        throw Error(ErrorCode::kInvalidArgument,
                    "demonstration pool overlaps the evaluation set (id '" + t.id + "')");
      }
    }
    retriever.emplace(pool, &gateway);
  }
  IdentificationReport report;
  report.icl_k = icl_k;
  report.config = config;
  report.instances.resize(dataset.size());
  ambig::detail::parallel_for(dataset.size(), config.parallelism, [&](std::size_t i) {
    const auto& inst = dataset[i];
    std::vector<TaskInstance> demos;
    if (retriever) demos = retriever->top_k(inst, static_cast<std::size_t>(icl_k));
    const auto req = identify_request(inst.instruction, inst.input, demos, config);
    InstanceIdentification r;
    r.id = inst.id;
    const auto cats = inst.categories();
    r.gold = metrics::CategorySet(cats.begin(), cats.end());
    r.response = gateway.complete_cached(req).at(0);
    auto parsed = llm::parse_identification(r.response);
    r.predicted = std::move(parsed.categories);
    r.warnings = std::move(parsed.warnings);
    for (const auto& w : r.warnings) detail::log(config, inst.id + ": " + w);
    report.instances[i] = std::move(r);
  });
  std::vector<metrics::CategorySet> pred, gold;
  for (const auto& r : report.instances) {
    pred.push_back(r.predicted);
    gold.push_back(r.gold);
  }
  report.metrics = metrics::classification_metrics(pred, gold);
  return report;
}

// ---- suggestion ------------------------------------------------------------

std::string_view suggest_mode_name(SuggestMode m) {
  return m == SuggestMode::kBatch ? "batch" : "sampling";
}

SuggestMode suggest_mode_from_string(std::string_view s) {
  if (text::iequals(s, "sampling")) return SuggestMode::kSampling;
  if (text::iequals(s, "batch")) return SuggestMode::kBatch;
  throw Error(ErrorCode::kInvalidArgument,
              "unknown suggestion mode '" + std::string(s) + "' (expected sampling or batch)");
}

llm::ChatRequest suggest_request(const std::string& instruction, const std::string& input,
                                 Category c, int n, SuggestMode mode,
                                 const PipelineConfig& config) {
  if (n < 1) throw Error(ErrorCode::kInvalidArgument, "n must be >= 1");
  llm::PromptFields fields = {{"input_text", input},
                              {"instruction", instruction},
                              {"ambiguity_category", std::string(category_name(c))},
                              {"ambiguity_definition", std::string(category_definition(c))},
                              {"template", template_for(c).display()}};
  if (mode == SuggestMode::kBatch) fields["batch_directive"] = llm::batch_directive(n);
  auto req = llm::build_prompt(llm::PromptKind::kSuggest, fields);
  return detail::with_model(std::move(req), config.annotator_model, config.annotator_temperature,
                            mode == SuggestMode::kBatch ? 1 : n, config);
}

Candidates suggest_candidates(const std::string& instruction, const std::string& input,
                              Category c, int n, SuggestMode mode, llm::Gateway& gateway,
                              const PipelineConfig& config) {
  const auto req = suggest_request(instruction, input, c, n, mode, config);
  std::vector<std::string> raw = gateway.complete_cached(req);
  if (mode == SuggestMode::kBatch) {
    raw = llm::parse_numbered_list(raw.at(0));
    if (raw.size() > static_cast<std::size_t>(n)) raw.resize(static_cast<std::size_t>(n));
  }
  Candidates out;
  for (const auto& r : raw) {
    if (auto ai = repair_candidate(c, r)) {
      out.items.push_back(std::move(*ai));
    } else {
      out.warnings.push_back("dropped unusable suggestion '" + detail::normalize_response(r) +
                             "'");
    }
  }
  return out;
}

SuggestionReport run_suggestion_eval(const std::vector<TaskInstance>& dataset,
                                     llm::Gateway& gateway, int n, SuggestMode mode,
                                     const PipelineConfig& config) {
  if (n < 1) throw Error(ErrorCode::kInvalidArgument, "n must be >= 1");
  SuggestionReport report;
  report.n = n;
  report.mode = mode;
  report.config = config;
  std::vector<std::pair<const TaskInstance*, const Annotation*>> jobs;
  for (const auto& inst : dataset) {
    for (const auto& a : inst.annotations) jobs.emplace_back(&inst, &a);
  }
  if (jobs.empty()) {
    throw Error(ErrorCode::kMissingAnnotations, "no gold annotations to evaluate suggestions");
  }
  report.items.resize(jobs.size());
  ambig::detail::parallel_for(jobs.size(), config.parallelism, [&](std::size_t i) {
    const auto& [inst, ann] = jobs[i];
    SuggestionItem item;
    item.id = inst->id;
    item.category = ann->instruction.category();
    item.gold = ann->instruction.text();
    auto cands = suggest_candidates(inst->instruction, inst->input, item.category, n, mode,
                                    gateway, config);
    for (const auto& w : cands.warnings) detail::log(config, inst->id + ": " + w);
    for (const auto& c : cands.items) item.candidates.push_back(c.text());
    if (!item.candidates.empty()) {
      item.rl_at_n = metrics::rl_at_n(item.candidates, item.gold);
      if (gateway.supports_embed()) {
        auto texts = item.candidates;
        texts.push_back(item.gold);
        const auto vecs = gateway.embed(texts);
        double best = -1.0;
        for (std::size_t j = 0; j + 1 < vecs.size(); ++j) {
          best = std::max(best, llm::cosine(vecs[j], vecs.back()));
        }
        item.para_sim_at_n = best;
      }
    }
    if (item.candidates.size() >= 2) item.intra_rl = metrics::intra_rl(item.candidates);
    report.items[i] = std::move(item);
  });
  double rl = 0.0, para = 0.0, intra = 0.0;
  std::size_t para_n = 0, intra_n = 0;
  for (const auto& it : report.items) {
    rl += it.rl_at_n;
    if (it.para_sim_at_n) {
      para += *it.para_sim_at_n;
      ++para_n;
    }
    if (it.intra_rl) {
      intra += *it.intra_rl;
      ++intra_n;
    }
  }
  report.rl_at_n = rl / static_cast<double>(report.items.size());
  if (para_n) report.para_sim_at_n = para / static_cast<double>(para_n);
  if (intra_n) report.intra_rl = intra / static_cast<double>(intra_n);
  return report;
}

}  // namespace ambig::pipeline
