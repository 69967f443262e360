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

// Command-line front end. Talks to the toolkit only through the C API.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "ambig/ambig.h"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Common {
  std::string config;
  std::string cache_dir;
  std::string mock_script;
  long long seed = 0;
  bool seed_set = false;
  int num_samples = 0;
  long max_calls = -1;
  bool quiet = false;
  bool no_cache = false;
};

int exit_code(ambig_status s) {
  switch (s) {
    case AMBIG_OK:
      return 0;
    case AMBIG_PROVIDER_UNAVAILABLE:
    case AMBIG_BUDGET_EXCEEDED:
    case AMBIG_EMBED_UNSUPPORTED:
    case AMBIG_IO_ERROR:
    case AMBIG_INTERNAL:
      return 2;
    default:
      return 1;
  }
}

int fail(ambig_status s) {
  std::cerr << "error [" << ambig_status_name(s) << "]: " << ambig_last_error() << "\n";
  return exit_code(s);
}

void stderr_logger(const char* msg, void*) { std::fprintf(stderr, "%s\n", msg); }

std::string absolute(const std::string& p) {
  return p.empty() ? p : fs::absolute(p).lexically_normal().string();
}

// Builds the context from --config plus command-line overrides.
ambig_status open_context(const Common& c, ambig_context** ctx) {
  json cfg = json::object();
  std::string base_dir;
  if (!c.config.empty()) {
    std::ifstream in(c.config);
    if (!in) {
      std::cerr << "error [IoError]: cannot open config " << c.config << "\n";
      return AMBIG_IO_ERROR;
    }
    try {
      cfg = json::parse(in);
    } catch (const json::exception& e) {
      std::cerr << "error [ParseError]: " << c.config << ": " << e.what() << "\n";
      return AMBIG_PARSE_ERROR;
    }
    base_dir = fs::absolute(c.config).parent_path().string();
  }
  if (!c.cache_dir.empty()) cfg["cache_dir"] = absolute(c.cache_dir);
  if (c.no_cache) cfg["cache_dir"] = "";
  if (!c.mock_script.empty()) {
    cfg["mock_script"] = absolute(c.mock_script);
    cfg["provider"] = "mock";
  }
  if (c.seed_set || !cfg.contains("seed")) cfg["seed"] = c.seed;
  if (c.num_samples > 0) cfg["num_samples"] = c.num_samples;
  if (c.max_calls >= 0) cfg["max_calls"] = c.max_calls;
  const std::string text = cfg.dump();
  const ambig_status s =
      ambig_context_new(text.c_str(), base_dir.empty() ? nullptr : base_dir.c_str(), ctx);
  if (s != AMBIG_OK) return s;
  if (!c.quiet) ambig_context_set_logger(*ctx, stderr_logger, nullptr);
  return AMBIG_OK;
}

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "JSON config file");
  cmd->add_option("--cache-dir", c.cache_dir, "Completion cache directory");
  cmd->add_flag("--no-cache", c.no_cache, "Keep completions in memory only");
  cmd->add_option("--mock-script", c.mock_script,
                  "Scripted mock provider (fully offline and deterministic)");
  cmd->add_option_function<long long>(
      "--seed",
      [&c](const long long& v) {
        c.seed = v;
        c.seed_set = true;
      },
      "Seed recorded in every report (default 0)");
  cmd->add_option("--num-samples", c.num_samples, "Override the number of sampled outputs");
  cmd->add_option("--max-calls", c.max_calls, "Provider call budget for this run");
  cmd->add_flag("-q,--quiet", c.quiet, "Suppress log output on stderr");
}

void print_and_free(char* s) {
  if (!s) return;
  std::cout << s << "\n";
  ambig_string_free(s);
}

std::string csv_default(const std::string& report, const std::string& csv) {
  if (!csv.empty() || report.empty()) return csv;
  return fs::path(report).replace_extension(".csv").string();
}

const char* opt(const std::string& s) { return s.empty() ? nullptr : s.c_str(); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ambignlg: detect and mitigate task ambiguity in NLG instructions"};
  app.require_subcommand(1);
  Common common;

  std::string in, out, audit, categories;
  std::string dataset, method = "taxonomy", report, csv, demo_pool, mode = "sampling";
  std::string candidates, references, host;
  int icl_k = -1, n = 10, port = 0;

  auto* filter = app.add_subcommand("filter-sni", "Keep raw records that qualify as NLG tasks");
  filter->add_option("--in", in, "Raw JSONL records")->required();
  filter->add_option("--out", out, "Filtered JSONL output")->required();

  auto* annotate = app.add_subcommand("annotate", "Produce unvalidated annotation candidates");
  annotate->add_option("--in", in, "Raw JSONL records")->required();
  annotate->add_option("--out", out, "Dataset JSONL output")->required();
  annotate->add_option("--categories", categories, "Comma-separated categories (default all)");
  add_common(annotate, common);

  auto* validate = app.add_subcommand("validate", "Run the clarity and utility gates");
  validate->add_option("--in", in, "Dataset JSONL with annotations")->required();
  validate->add_option("--out", out, "Dataset JSONL with accepted annotations")->required();
  validate->add_option("--audit", audit, "Candidate audit JSONL");
  add_common(validate, common);

  auto* build = app.add_subcommand("build-dataset", "Filter, annotate and validate raw records");
  build->add_option("--in", in, "Raw JSONL records")->required();
  build->add_option("--out", out, "Dataset JSONL output")->required();
  build->add_option("--audit", audit, "Candidate audit JSONL");
  add_common(build, common);

  auto* mit = app.add_subcommand("eval-mitigation", "Compare outputs before and after refinement");
  mit->add_option("--dataset", dataset, "Dataset JSONL")->required();
  mit->add_option("--method", method, "baseline, generic or taxonomy")
      ->check(CLI::IsMember({"baseline", "generic", "taxonomy"}));
  mit->add_option("--report", report, "Report JSON path");
  mit->add_option("--csv", csv, "Report CSV path (default: next to the report)");
  add_common(mit, common);

  auto* ident = app.add_subcommand("eval-identify", "Evaluate ambiguity identification");
  ident->add_option("--dataset", dataset, "Dataset JSONL")->required();
  ident->add_option("--icl-k", icl_k, "Retrieved demonstrations (0 or 8; default from config)");
  ident->add_option("--demo-pool", demo_pool, "Dataset JSONL of labelled demonstrations");
  ident->add_option("--report", report, "Report JSON path");
  ident->add_option("--csv", csv, "Report CSV path (default: next to the report)");
  add_common(ident, common);

  auto* sugg = app.add_subcommand("eval-suggest", "Evaluate additional-instruction suggestions");
  sugg->add_option("--dataset", dataset, "Dataset JSONL")->required();
  sugg->add_option("--n", n, "Suggestions per ambiguity (default 10)")->check(CLI::PositiveNumber);
  sugg->add_option("--mode", mode, "sampling or batch")
      ->check(CLI::IsMember({"sampling", "batch"}));
  sugg->add_option("--report", report, "Report JSON path");
  sugg->add_option("--csv", csv, "Report CSV path (default: next to the report)");
  add_common(sugg, common);

  auto* score = app.add_subcommand("score", "ROUGE-L and Intra-RL of line-aligned files");
  score->add_option("--candidates", candidates, "One output (or JSON array of outputs) per line")
      ->required();
  score->add_option("--references", references, "One reference per line")->required();

  auto* serve = app.add_subcommand("serve", "Start the clarification REST service");
  serve->add_option("--host", host, "Bind address (default from config)");
  serve->add_option("--port", port, "Port (default from config)");
  add_common(serve, common);

  // filter-sni and score share the common flags for a uniform interface.
  add_common(filter, common);
  add_common(score, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::Error& e) {
    app.exit(e);
    return 1;
  }

  char* result = nullptr;
  ambig_status s = AMBIG_OK;

  if (*filter) {
    s = ambig_filter_sni(in.c_str(), out.c_str(), &result);
  } else if (*score) {
    s = ambig_score_files(candidates.c_str(), references.c_str(), &result);
  } else {
    ambig_context* ctx = nullptr;
    s = open_context(common, &ctx);
    if (s != AMBIG_OK) {
      if (*ambig_last_error()) return fail(s);
      return exit_code(s);
    }
    if (*annotate) {
      s = ambig_annotate(ctx, in.c_str(), out.c_str(), opt(categories), &result);
    } else if (*validate) {
      s = ambig_validate(ctx, in.c_str(), out.c_str(), opt(audit), &result);
    } else if (*build) {
      s = ambig_build_dataset(ctx, in.c_str(), out.c_str(), opt(audit), &result);
    } else if (*mit) {
      csv = csv_default(report, csv);
      s = ambig_eval_mitigation(ctx, dataset.c_str(), method.c_str(), opt(report), opt(csv),
                                &result);
    } else if (*ident) {
      csv = csv_default(report, csv);
      s = ambig_eval_identify(ctx, dataset.c_str(), icl_k, opt(demo_pool), opt(report), opt(csv),
                              &result);
    } else if (*sugg) {
      csv = csv_default(report, csv);
      s = ambig_eval_suggest(ctx, dataset.c_str(), n, mode.c_str(), opt(report), opt(csv),
                             &result);
    } else if (*serve) {
      s = ambig_serve(ctx, opt(host), port);
    }
    ambig_context_free(ctx);
  }
  if (s != AMBIG_OK) return fail(s);
  print_and_free(result);
  return 0;
}
