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

#include <cstdio>

#include "ambig/pipeline.hpp"
#include "text_util.hpp"

namespace ambig::pipeline {
namespace {

using store::OrderedJson;

OrderedJson opt(const std::optional<double>& v) {
  return v ? OrderedJson(*v) : OrderedJson(nullptr);
}

OrderedJson config_json(const PipelineConfig& c) {
  OrderedJson j;
  j["model_id"] = c.generation.model_id;
  j["temperature"] = c.generation.temperature;
  j["num_samples"] = c.generation.num_samples;
  j["max_tokens"] = c.generation.max_tokens;
  j["annotator_model"] = c.annotator_model;
  j["annotator_temperature"] = c.annotator_temperature;
  j["judge_model"] = c.judge_model;
  j["alpha"] = c.alpha;
  return j;
}

OrderedJson header(std::string_view report, const PipelineConfig& c) {
  OrderedJson j;
  j["schema_version"] = kReportSchemaVersion;
  j["report"] = report;
  j["seed"] = c.seed;
  j["config"] = config_json(c);
  return j;
}

OrderedJson group_json(const GroupSummary& g) {
  OrderedJson j;
  j["count"] = g.count;
  j["rl_baseline"] = g.rl_baseline;
  j["rl_method"] = g.rl_method;
  j["delta_rl"] = g.delta_rl;
  j["relative_gain_rl"] =
      g.rl_baseline > 0 ? OrderedJson(100.0 * g.delta_rl / g.rl_baseline) : OrderedJson(nullptr);
  j["intra_rl_baseline"] = g.intra_baseline;
  j["intra_rl_method"] = g.intra_method;
  j["delta_intra_rl"] = g.delta_intra;
  j["relative_gain_intra_rl"] = g.intra_baseline > 0
                                    ? OrderedJson(100.0 * g.delta_intra / g.intra_baseline)
                                    : OrderedJson(nullptr);
  j["delta_para_sim"] = opt(g.delta_para);
  return j;
}

OrderedJson set_json(const metrics::CategorySet& s) {
  OrderedJson a = OrderedJson::array();
  for (Category c : s) a.push_back(category_name(c));
  return a;
}

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

std::string num(const std::optional<double>& v) { return v ? num(*v) : ""; }

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string categories_field(const std::vector<Category>& cs) {
  std::string out;
  for (Category c : cs) {
    if (!out.empty()) out += ';';
    out += category_name(c);
  }
  return out;
}

}  // namespace

OrderedJson to_json(const MitigationReport& r) {
  OrderedJson j = header("mitigation", r.config);
  j["method"] = method_name(r.method);
  j["instances"] = r.instances.size();
  j["flagged"] = r.flagged;
  j["aggregate"] = group_json(r.overall);
  OrderedJson cats = OrderedJson::object();
  for (Category c : kAllCategories) {
    const auto key = std::string(category_name(c));
    if (auto it = r.per_category.find(key); it != r.per_category.end()) {
      cats[key] = group_json(it->second);
    }
  }
  j["per_category"] = std::move(cats);
  OrderedJson tasks = OrderedJson::object();
  for (const auto& [k, g] : r.per_task) tasks[k] = group_json(g);
  j["per_task"] = std::move(tasks);
  OrderedJson rows = OrderedJson::array();
  for (const auto& m : r.instances) {
    OrderedJson row;
    row["id"] = m.id;
    row["task"] = m.task;
    OrderedJson cs = OrderedJson::array();
    for (Category c : m.categories) cs.push_back(category_name(c));
    row["categories"] = std::move(cs);
    row["flagged"] = m.flagged;
    row["instruction"] = m.instruction;
    row["rl_baseline"] = m.rl_baseline;
    row["rl_method"] = m.rl_method;
    row["delta_rl"] = m.delta_rl();
    row["intra_rl_baseline"] = m.intra_baseline;
    row["intra_rl_method"] = m.intra_method;
    row["delta_intra_rl"] = m.delta_intra();
    row["para_sim_baseline"] = opt(m.para_baseline);
    row["para_sim_method"] = opt(m.para_method);
    rows.push_back(std::move(row));
  }
  j["per_instance"] = std::move(rows);
  return j;
}

std::string to_csv(const MitigationReport& r) {
  std::string out =
      "id,task,categories,flagged,rl_baseline,rl_method,delta_rl,intra_rl_baseline,"
      "intra_rl_method,delta_intra_rl,para_sim_baseline,para_sim_method\n";
  for (const auto& m : r.instances) {
    out += csv_field(m.id) + ',' + csv_field(m.task) + ',' + categories_field(m.categories) +
           ',' + (m.flagged ? "1" : "0") + ',' + num(m.rl_baseline) + ',' + num(m.rl_method) +
           ',' + num(m.delta_rl()) + ',' + num(m.intra_baseline) + ',' + num(m.intra_method) +
           ',' + num(m.delta_intra()) + ',' + num(m.para_baseline) + ',' +
           num(m.para_method) + '\n';
  }
  return out;
}

OrderedJson to_json(const IdentificationReport& r) {
  OrderedJson j = header("identification", r.config);
  j["icl_k"] = r.icl_k;
  j["instances"] = r.metrics.n;
  j["exact_match"] = r.metrics.exact_match;
  j["macro_tpr"] = opt(r.metrics.macro_tpr);
  j["macro_tnr"] = opt(r.metrics.macro_tnr);
  j["macro_accuracy"] = r.metrics.macro_accuracy;
  OrderedJson cats = OrderedJson::object();
  for (Category c : kAllCategories) {
    const auto& m = r.metrics.per_category[index_of(c)];
    OrderedJson e;
    e["tp"] = m.confusion.tp;
    e["tn"] = m.confusion.tn;
    e["fp"] = m.confusion.fp;
    e["fn"] = m.confusion.fn;
    e["tpr"] = opt(m.tpr);
    e["tnr"] = opt(m.tnr);
    e["accuracy"] = m.accuracy;
    cats[std::string(category_name(c))] = std::move(e);
  }
  j["per_category"] = std::move(cats);
  OrderedJson rows = OrderedJson::array();
  for (const auto& i : r.instances) {
    OrderedJson row;
    row["id"] = i.id;
    row["gold"] = set_json(i.gold);
    row["predicted"] = set_json(i.predicted);
    row["response"] = i.response;
    row["warnings"] = i.warnings;
    rows.push_back(std::move(row));
  }
  j["per_instance"] = std::move(rows);
  return j;
}

std::string to_csv(const IdentificationReport& r) {
  std::string out = "category,tp,tn,fp,fn,tpr,tnr,accuracy\n";
  for (Category c : kAllCategories) {
    const auto& m = r.metrics.per_category[index_of(c)];
    out += std::string(category_name(c)) + ',' + std::to_string(m.confusion.tp) + ',' +
           std::to_string(m.confusion.tn) + ',' + std::to_string(m.confusion.fp) + ',' +
           std::to_string(m.confusion.fn) + ',' + num(m.tpr) + ',' + num(m.tnr) + ',' +
           num(m.accuracy) + '\n';
  }
  out += "macro,,,,," + num(r.metrics.macro_tpr) + ',' + num(r.metrics.macro_tnr) + ',' +
         num(r.metrics.macro_accuracy) + '\n';
  out += "exact_match,,,,,,," + num(r.metrics.exact_match) + '\n';
  return out;
}

OrderedJson to_json(const SuggestionReport& r) {
  OrderedJson j = header("suggestion", r.config);
  j["mode"] = suggest_mode_name(r.mode);
  j["n"] = r.n;
  j["items"] = r.items.size();
  j["rl_at_n"] = r.rl_at_n;
  j["para_sim_at_n"] = opt(r.para_sim_at_n);
  j["intra_rl"] = opt(r.intra_rl);
  OrderedJson rows = OrderedJson::array();
  for (const auto& it : r.items) {
    OrderedJson row;
    row["id"] = it.id;
    row["category"] = category_name(it.category);
    row["gold"] = it.gold;
    row["candidates"] = it.candidates;
    row["rl_at_n"] = it.rl_at_n;
    row["para_sim_at_n"] = opt(it.para_sim_at_n);
    row["intra_rl"] = opt(it.intra_rl);
    rows.push_back(std::move(row));
  }
  j["per_item"] = std::move(rows);
  return j;
}

std::string to_csv(const SuggestionReport& r) {
  std::string out = "id,category,candidates,rl_at_n,para_sim_at_n,intra_rl\n";
  for (const auto& it : r.items) {
    out += csv_field(it.id) + ',' + std::string(category_name(it.category)) + ',' +
           std::to_string(it.candidates.size()) + ',' + num(it.rl_at_n) + ',' +
           num(it.para_sim_at_n) + ',' + num(it.intra_rl) + '\n';
  }
  return out;
}

}  // namespace ambig::pipeline
