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

// Provider-agnostic chat requests, the prompt catalog and response parsers.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ambig/core.hpp"
#include "ambig/metrics.hpp"

namespace ambig::llm {

struct ChatRequest {
  std::string kind;  // PromptKind name; lets scripted providers route requests
  std::string system;
  std::string user;
  std::string model_id;
  double temperature = 1.0;
  int n_samples = 1;
  int max_tokens = 512;
  std::optional<std::int64_t> seed;

  // Sorted-key JSON of every field except n_samples. Samples are identified
  // by their index, so a request for 10 samples shares entries with the same
  // request for 20.
  nlohmann::json canonical_json() const;
  std::string canonical() const { return canonical_json().dump(); }

  // Throws Error(kInvalidArgument).
  void validate() const;
};

using Embedding = std::vector<double>;

class Provider {
 public:
  virtual ~Provider() = default;

  // Must return exactly request.n_samples completions. Throws TransientError
  // for retryable transport failures and Error(kProviderUnavailable) for
  // everything else.
  virtual std::vector<std::string> complete(const ChatRequest& request) = 0;

  virtual bool supports_embed() const { return false; }
  // Throws Error(kEmbedUnsupported) unless supports_embed().
  virtual std::vector<Embedding> embed(const std::vector<std::string>& texts);

  virtual std::string name() const = 0;
};

enum class PromptKind {
  kDownstream,
  kAnnotateContext,
  kAnnotatePlanning,
  kAnnotateStyle,
  kAnnotateTheme,
  kAnnotateGeneric,
  kClarityJudge,
  kValidateUtility,
  kIdentify,
  kSuggest,
  kIfEval,
};

std::string_view prompt_kind_name(PromptKind kind);
std::optional<PromptKind> prompt_kind_from_string(std::string_view s);

// Annotation prompt kind for an LLM-annotated category; nullopt for the
// rule-based Keywords and Length.
std::optional<PromptKind> annotate_kind_for(Category c);

using PromptFields = std::map<std::string, std::string, std::less<>>;

// Placeholder names the kind's prompt declares (excluding ones filled
// automatically, such as Identify's task definitions).
std::vector<std::string> required_fields(PromptKind kind);

// Fills the verbatim prompt body. Only model-independent fields of the
// returned request are set (kind, system, user). Throws
// Error(kMissingField).
ChatRequest build_prompt(PromptKind kind, const PromptFields& fields);

inline constexpr std::string_view kAnnotationSystemMessage =
    "You are an AI assistant addressing various ambiguities in NLP task instructions. "
    "Your role involves complementing incomplete information by filling in the blanks "
    "within the provided template. The template you have filled in is used as the "
    "additional instruction.";

// "Length, Keyword, Context, Theme, Plan, Style, None"
std::string default_category_list();
// The seven task-definition paragraphs joined by newlines.
std::string identification_task_definitions();

// Formats one labelled demonstration block for the Identify prompt.
std::string format_identify_demo(std::string_view instruction, std::string_view input,
                                 const metrics::CategorySet& labels);
std::string format_category_answer(const metrics::CategorySet& labels);

std::string batch_directive(int n);

struct IdentificationParse {
  metrics::CategorySet categories;
  std::vector<std::string> warnings;
};

IdentificationParse parse_identification(std::string_view text);

// Priority Less > More > Unchanged. Throws Error(kUnparseableJudgment).
ClarityJudgment parse_clarity(std::string_view text);

// First integer 1..5 in the text.
std::optional<int> parse_if_score(std::string_view text);

// Items of a "1. a\n2. b" list; falls back to non-empty lines.
std::vector<std::string> parse_numbered_list(std::string_view text);

}  // namespace ambig::llm
