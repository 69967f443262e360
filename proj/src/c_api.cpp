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

#define AMBIG_BUILDING_LIBRARY
#include "ambig/ambig.h"

#include <algorithm>
#include <array>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <memory>
#include <mutex>
#include <string>

#include "ambig/config.hpp"
#include "ambig/error.hpp"
#include "ambig/metrics.hpp"
#include "ambig/pipeline.hpp"
#include "ambig/service.hpp"
#include "ambig/store.hpp"
#include "text_util.hpp"

struct ambig_context {
  ambig::AppConfig config;
  std::shared_ptr<ambig::llm::Gateway> gateway;
  std::mutex mu;
  ambig_log_fn log_fn = nullptr;
  void* log_user = nullptr;

  void log(const std::string& msg) const {
    if (log_fn) log_fn(msg.c_str(), log_user);
  }

  ambig::llm::Gateway& gw() {
    std::lock_guard lock(mu);
    if (!gateway) {
      gateway = ambig::make_gateway(config, [this](const std::string& m) { log(m); });
    }
    return *gateway;
  }

  ambig::pipeline::PipelineConfig pipeline() const {
    auto p = config.pipeline_config();
    p.log = [this](const std::string& m) { log(m); };
    return p;
  }
};

namespace {

using ambig::Error;
using ambig::ErrorCode;
using nlohmann::json;

thread_local std::string g_last_error;

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.data(), s.size());
  out[s.size()] = '\0';
  return out;
}

template <typename Fn>
ambig_status guard(Fn&& fn) {
  try {
    g_last_error.clear();
    fn();
    return AMBIG_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return static_cast<ambig_status>(static_cast<int>(e.code()));
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return AMBIG_INTERNAL;
  }
}

void require(const void* p, const char* what) {
  if (!p) throw Error(ErrorCode::kInvalidArgument, std::string(what) + " must not be NULL");
}

json parse_json(const char* text, const char* what) {
  require(text, what);
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParseError, std::string(what) + " is not valid JSON: " + e.what());
  }
}

void emit(char** out, const std::string& s) {
  if (out) *out = dup_string(s);
}

void write_reports(const ambig::store::OrderedJson& j, const std::string& csv,
                   const char* report_path, const char* csv_path) {
  if (report_path) ambig::store::write_file_atomic(report_path, j.dump(2) + "\n");
  if (csv_path) ambig::store::write_file_atomic(csv_path, csv);
}

std::vector<std::string> read_lines(const char* path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, std::string("cannot open ") + path);
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    out.push_back(line);
  }
  while (!out.empty() && out.back().empty()) out.pop_back();
  return out;
}

std::vector<ambig::TaskInstance> raw_instances(const char* path) {
  std::vector<ambig::TaskInstance> out;
  for (const auto& r : ambig::store::read_raw_records(path)) {
    out.push_back(ambig::pipeline::to_instance(r));
  }
  return out;
}

json gateway_stats(ambig_context* ctx) {
  const auto s = ctx->gw().stats();
  return {{"provider_calls", s.provider_calls},
          {"cache_hits", s.cache_hits},
          {"cache_misses", s.cache_misses}};
}

json dataset_summary(const std::vector<ambig::TaskInstance>& dataset) {
  std::array<std::size_t, ambig::kNumCategories> counts{};
  std::size_t anns = 0, empty = 0;
  for (const auto& t : dataset) {
    anns += t.annotations.size();
    if (t.annotations.empty()) ++empty;
    for (auto c : t.categories()) ++counts[ambig::index_of(c)];
  }
  ambig::store::OrderedJson per;
  for (ambig::Category c : ambig::kAllCategories) {
    per[std::string(ambig::category_name(c))] = counts[ambig::index_of(c)];
  }
  return {{"instances", dataset.size()},
          {"annotations", anns},
          {"instances_without_annotations", empty},
          {"per_category", per}};
}

}  // namespace

extern "C" {

const char* ambig_version(void) { return "0.1.0"; }

const char* ambig_status_name(ambig_status status) {
  if (status == AMBIG_INTERNAL) return "Internal";
  static thread_local std::string name;
  name = std::string(ambig::error_code_name(static_cast<ErrorCode>(status)));
  return name.c_str();
}

const char* ambig_last_error(void) { return g_last_error.c_str(); }

void ambig_string_free(char* s) { std::free(s); }

ambig_status ambig_render_template(const char* category, const char* fillers_json,
                                   char** out_text) {
  return guard([&] {
    require(category, "category");
    require(out_text, "out_text");
    const json f = parse_json(fillers_json, "fillers_json");
    if (!f.is_array()) throw Error(ErrorCode::kInvalidArgument, "fillers must be a JSON array");
    emit(out_text, ambig::render_template(ambig::category_from_string(category),
                                          f.get<std::vector<std::string>>()));
  });
}

ambig_status ambig_refine_instruction(const char* base, const char* parts_json,
                                      const char* separator, char** out_json) {
  return guard([&] {
    require(base, "base");
    require(out_json, "out_json");
    const json parts = parse_json(parts_json, "parts_json");
    if (!parts.is_array()) throw Error(ErrorCode::kInvalidArgument, "parts must be a JSON array");
    std::vector<ambig::AdditionalInstruction> list;
    for (const auto& p : parts) {
      const auto c = ambig::category_from_string(p.at("category").get<std::string>());
      if (p.contains("fillers")) {
        list.emplace_back(c, p["fillers"].get<std::vector<std::string>>());
      } else {
        list.push_back(ambig::AdditionalInstruction::from_text(c, p.at("text").get<std::string>()));
      }
    }
    const auto r = ambig::refine_instruction(base, std::move(list),
                                             separator ? separator : ambig::kDefaultSeparator);
    json out_parts = json::array();
    for (const auto& p : r.parts) {
      out_parts.push_back({{"category", ambig::category_name(p.category())}, {"text", p.text()}});
    }
    emit(out_json, json{{"rendered", r.rendered}, {"parts", out_parts}}.dump());
  });
}

ambig_status ambig_rouge_l(const char* candidate, const char* reference, double* precision,
                           double* recall, double* f1) {
  return guard([&] {
    require(candidate, "candidate");
    require(reference, "reference");
    const auto s = ambig::metrics::rouge_l(std::string_view(candidate), std::string_view(reference));
    if (precision) *precision = s.precision;
    if (recall) *recall = s.recall;
    if (f1) *f1 = s.f1;
  });
}

ambig_status ambig_intra_rl(const char* samples_json, double* out) {
  return guard([&] {
    require(out, "out");
    const json s = parse_json(samples_json, "samples_json");
    if (!s.is_array()) throw Error(ErrorCode::kInvalidArgument, "samples must be a JSON array");
    *out = ambig::metrics::intra_rl(s.get<std::vector<std::string>>());
  });
}

ambig_status ambig_score_files(const char* candidates_path, const char* references_path,
                               char** out_json) {
  return guard([&] {
    require(candidates_path, "candidates_path");
    require(references_path, "references_path");
    require(out_json, "out_json");
    const auto cands = read_lines(candidates_path);
    const auto refs = read_lines(references_path);
    if (cands.size() != refs.size()) {
      throw Error(ErrorCode::kLengthMismatch,
                  std::to_string(cands.size()) + " candidate lines vs " +
                      std::to_string(refs.size()) + " reference lines");
    }
    ambig::store::OrderedJson items = ambig::store::OrderedJson::array();
    double f1_sum = 0.0, intra_sum = 0.0;
    std::size_t intra_n = 0;
    for (std::size_t i = 0; i < cands.size(); ++i) {
      std::vector<std::string> samples;
      const auto trimmed = ambig::text::trim(cands[i]);
      if (!trimmed.empty() && trimmed.front() == '[') {
        try {
          samples = json::parse(trimmed).get<std::vector<std::string>>();
        } catch (const json::exception& e) {
          throw Error(ErrorCode::kParseError, std::string(candidates_path) + ":" +
                                                  std::to_string(i + 1) + ": " + e.what());
        }
      } else {
        samples.push_back(cands[i]);
      }
      if (samples.empty()) {
        throw Error(ErrorCode::kEmptyCandidates, std::string(candidates_path) + ":" +
                                                     std::to_string(i + 1) + ": no samples");
      }
      ambig::store::OrderedJson item;
      item["line"] = i + 1;
      double p = 0, r = 0, f = 0;
      for (const auto& s : samples) {
        const auto sc = ambig::metrics::rouge_l(std::string_view(s), std::string_view(refs[i]));
        p += sc.precision;
        r += sc.recall;
        f += sc.f1;
      }
      const double n = static_cast<double>(samples.size());
      item["samples"] = samples.size();
      item["precision"] = p / n;
      item["recall"] = r / n;
      item["f1"] = f / n;
      f1_sum += f / n;
      if (samples.size() >= 2) {
        const double intra = ambig::metrics::intra_rl(samples);
        item["rl_at_n"] = ambig::metrics::rl_at_n(samples, refs[i]);
        item["intra_rl"] = intra;
        intra_sum += intra;
        ++intra_n;
      }
      items.push_back(std::move(item));
    }
    ambig::store::OrderedJson out;
    out["schema_version"] = ambig::pipeline::kReportSchemaVersion;
    out["lines"] = cands.size();
    out["mean_f1"] = cands.empty() ? 0.0 : f1_sum / static_cast<double>(cands.size());
    out["mean_intra_rl"] =
        intra_n ? ambig::store::OrderedJson(intra_sum / static_cast<double>(intra_n))
                : ambig::store::OrderedJson(nullptr);
    out["items"] = std::move(items);
    emit(out_json, out.dump(2));
  });
}

ambig_status ambig_filter_sni(const char* in_path, const char* out_path, char** out_json) {
  return guard([&] {
    require(in_path, "in_path");
    require(out_path, "out_path");
    const auto records = ambig::store::read_raw_records(in_path);
    json rejected = json::object();
    std::vector<ambig::store::RawRecord> kept;
    for (const auto& r : records) {
      const auto rule = ambig::pipeline::sni_check(r);
      if (rule == ambig::pipeline::FilterRule::kNone) {
        kept.push_back(r);
      } else {
        rejected[r.id] = ambig::pipeline::filter_rule_name(rule);
      }
    }
    ambig::store::write_raw_records(kept, out_path);
    emit(out_json, json{{"records", records.size()}, {"kept", kept.size()}, {"rejected", rejected}}
                       .dump(2));
  });
}

ambig_status ambig_context_new(const char* config_json, const char* base_dir,
                               ambig_context** out) {
  return guard([&] {
    require(out, "out");
    auto ctx = std::make_unique<ambig_context>();
    const json j = config_json ? parse_json(config_json, "config_json") : json::object();
    ctx->config = ambig::AppConfig::from_json(j, base_dir ? base_dir : "");
    *out = ctx.release();
  });
}

void ambig_context_free(ambig_context* ctx) { delete ctx; }

void ambig_context_set_logger(ambig_context* ctx, ambig_log_fn fn, void* user_data) {
  if (!ctx) return;
  ctx->log_fn = fn;
  ctx->log_user = user_data;
}

ambig_status ambig_context_config(ambig_context* ctx, char** out_json) {
  return guard([&] {
    require(ctx, "ctx");
    require(out_json, "out_json");
    emit(out_json, ctx->config.to_json().dump(2));
  });
}

ambig_status ambig_context_stats(ambig_context* ctx, char** out_json) {
  return guard([&] {
    require(ctx, "ctx");
    require(out_json, "out_json");
    emit(out_json, gateway_stats(ctx).dump());
  });
}

ambig_status ambig_annotate(ambig_context* ctx, const char* in_path, const char* out_path,
                            const char* categories, char** out_json) {
  return guard([&] {
    require(ctx, "ctx");
    require(in_path, "in_path");
    require(out_path, "out_path");
    std::vector<ambig::Category> cats;
    if (categories && *categories) {
      for (auto piece : ambig::text::split(categories, ',')) {
        const auto c = ambig::category_from_string(ambig::text::trim(piece));
        if (std::find(cats.begin(), cats.end(), c) == cats.end()) cats.push_back(c);
      }
    } else {
      cats.assign(ambig::kAllCategories.begin(), ambig::kAllCategories.end());
    }
    std::vector<std::string> warnings;
    const auto dataset = ambig::pipeline::annotate_instances(raw_instances(in_path), cats,
                                                             ctx->gw(), ctx->pipeline(), &warnings);
    ambig::store::write_dataset(dataset, out_path);
    json summary = dataset_summary(dataset);
    summary["warnings"] = warnings;
    summary["gateway"] = gateway_stats(ctx);
    emit(out_json, summary.dump(2));
  });
}

ambig_status ambig_validate(ambig_context* ctx, const char* in_path, const char* out_path,
                            const char* audit_path, char** out_json) {
  return guard([&] {
    require(ctx, "ctx");
    require(in_path, "in_path");
    require(out_path, "out_path");
    const auto result = ambig::pipeline::validate_dataset(ambig::store::read_dataset(in_path),
                                                          ctx->gw(), ctx->pipeline());
    ambig::store::write_dataset(result.dataset, out_path);
    if (audit_path) ambig::store::write_candidates(result.audit, audit_path);
    std::size_t accepted = 0;
    for (const auto& r : result.audit) accepted += r.accepted ? 1 : 0;
    json summary = dataset_summary(result.dataset);
    summary["candidates"] = result.audit.size();
    summary["accepted"] = accepted;
    summary["gateway"] = gateway_stats(ctx);
    emit(out_json, summary.dump(2));
  });
}

ambig_status ambig_build_dataset(ambig_context* ctx, const char* raw_path, const char* out_path,
                                 const char* audit_path, char** out_json) {
  return guard([&] {
    require(ctx, "ctx");
    require(raw_path, "raw_path");
    require(out_path, "out_path");
    const auto raw = ambig::store::read_raw_records(raw_path);
    const auto kept = ambig::pipeline::sni_filter(raw);
    std::vector<ambig::TaskInstance> instances;
    for (const auto& r : kept) instances.push_back(ambig::pipeline::to_instance(r));
    const auto result = ambig::pipeline::build_dataset(instances, ctx->gw(), ctx->pipeline());
    ambig::store::write_dataset(result.dataset, out_path);
    if (audit_path) ambig::store::write_candidates(result.audit, audit_path);
    std::size_t accepted = 0;
    for (const auto& r : result.audit) accepted += r.accepted ? 1 : 0;
    json summary = dataset_summary(result.dataset);
    summary["raw_records"] = raw.size();
    summary["filtered_out"] = raw.size() - kept.size();
    summary["candidates"] = result.audit.size();
    summary["accepted_candidates"] = accepted;
    summary["warnings"] = result.warnings;
    summary["gateway"] = gateway_stats(ctx);
    emit(out_json, summary.dump(2));
  });
}

ambig_status ambig_eval_mitigation(ambig_context* ctx, const char* dataset_path,
                                   const char* method, const char* report_path,
                                   const char* csv_path, char** out_json) {
  return guard([&] {
    require(ctx, "ctx");
    require(dataset_path, "dataset_path");
    const auto m = ambig::pipeline::method_from_string(method ? method : "taxonomy");
    const auto report = ambig::pipeline::run_mitigation_eval(
        ambig::store::read_dataset(dataset_path), ctx->gw(), m, ctx->pipeline());
    const auto j = ambig::pipeline::to_json(report);
    write_reports(j, ambig::pipeline::to_csv(report), report_path, csv_path);
    emit(out_json, j.dump(2));
  });
}

ambig_status ambig_eval_identify(ambig_context* ctx, const char* dataset_path, int icl_k,
                                 const char* demo_pool_path, const char* report_path,
                                 const char* csv_path, char** out_json) {
  return guard([&] {
    require(ctx, "ctx");
    require(dataset_path, "dataset_path");
    const int k = icl_k >= 0 ? icl_k : (ctx->config.icl ? ctx->config.icl_k : 0);
    ambig::pipeline::DemoPool pool;
    const std::string pool_path = demo_pool_path ? demo_pool_path : ctx->config.demo_pool;
    if (k > 0) {
      if (pool_path.empty()) throw Error(ErrorCode::kEmptyPool, "ICL needs a demonstration pool");
      pool.items = ambig::store::read_dataset(pool_path);
    }
    const auto report = ambig::pipeline::run_identification_eval(
        ambig::store::read_dataset(dataset_path), ctx->gw(), k, pool, ctx->pipeline());
    const auto j = ambig::pipeline::to_json(report);
    write_reports(j, ambig::pipeline::to_csv(report), report_path, csv_path);
    emit(out_json, j.dump(2));
  });
}

ambig_status ambig_eval_suggest(ambig_context* ctx, const char* dataset_path, int n,
                                const char* mode, const char* report_path, const char* csv_path,
                                char** out_json) {
  return guard([&] {
    require(ctx, "ctx");
    require(dataset_path, "dataset_path");
    const auto m = ambig::pipeline::suggest_mode_from_string(mode ? mode : "sampling");
    const auto report = ambig::pipeline::run_suggestion_eval(
        ambig::store::read_dataset(dataset_path), ctx->gw(), n, m, ctx->pipeline());
    const auto j = ambig::pipeline::to_json(report);
    write_reports(j, ambig::pipeline::to_csv(report), report_path, csv_path);
    emit(out_json, j.dump(2));
  });
}

ambig_status ambig_serve(ambig_context* ctx, const char* host, int port) {
  return guard([&] {
    require(ctx, "ctx");
    ambig::service::ServiceOptions opts;
    opts.default_suggestions = ctx->config.suggest_n;
    opts.generate_samples = ctx->config.generate_samples;
    if (ctx->config.icl) {
      opts.icl_k = ctx->config.icl_k;
      if (ctx->config.demo_pool.empty()) {
        throw Error(ErrorCode::kEmptyPool, "icl is enabled but demo_pool is not set");
      }
      opts.demo_pool.items = ambig::store::read_dataset(ctx->config.demo_pool);
    }
    ctx->gw();
    ambig::service::ClarificationService service(ctx->gateway, ctx->pipeline(),
                                                 ctx->config.sessions_dir, std::move(opts));
    const std::string h = host ? host : ctx->config.host;
    const int p = port > 0 ? port : ctx->config.port;
    ctx->log("serving on http://" + h + ":" + std::to_string(p));
    ambig::service::serve(service, h, p);
  });
}

}  // extern "C"
