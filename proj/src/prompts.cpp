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
#include <array>
#include <cctype>

#include "ambig/error.hpp"
#include "ambig/llm.hpp"
#include "text_util.hpp"

namespace ambig::llm {
namespace {

// Category prompts for fill-in-the-blank annotation.
constexpr std::string_view kContextCategoryPrompt =
    "Please identify what additional context, such as background or external knowledge, "
    "will encourage the accurate generation from input to output text. Subsequently, write "
    "a concise paragraph containing the required context and other related content. Fill in "
    "the blank of the following template: 'Additional context: {paragraph}'. Ensure that "
    "it's not clear which part of the paragraph corresponds to the output text. Please "
    "answer with the additional context needed to solve the task, not the solution to the "
    "task itself.";

constexpr std::string_view kPlanningCategoryPrompt =
    "Please describe the output text structure by listing a concise topic for each "
    "sentence. Fill in the blank of the following template: 'Please generate the output "
    "based on the following outline: 1. {topic1} 2. {topic2} ...'. Ensure that the number "
    "of items in the list matches the number of sentences in the output text. Make sure the "
    "response is brief and generalized, not detailed.";

constexpr std::string_view kStyleCategoryPrompt =
    "Please select the writing style of the output text from the following options: "
    "descriptive, expository, narrative, persuasive, directive, conversational, technical, "
    "journalistic, review, poetic, formal, informal, optimistic, assertive, dramatic, "
    "humorous, sad, passive-aggressive, worried, friendly, curious, encouraging, surprised, "
    "cooperative. Fill in the blank of the following template: 'Write in a {style} "
    "style.'. You are allowed to select multiple styles if necessary. If none of the styles "
    "align with the text, please respond with 'neutral'";

constexpr std::string_view kThemeCategoryPrompt =
    "Please identify the single, most dominant content of the output text and provide a "
    "clear and succinct description of it. Fill in the blank of the following template: "
    "'Primarily discuss the following theme: {theme}'. Make sure the response is brief and "
    "generalized, not detailed. Concentrate on the theme of the output text, rather than on "
    "the input text, instruction, or the overall task. The reply may contain hints of the "
    "output text, but should refrain from encapsulating its full content.";

// No published text for the generic baseline; composed after the Context
// prompt around the "Additional information: ___" template.
constexpr std::string_view kGenericCategoryPrompt =
    "Please identify what additional information will encourage the accurate generation "
    "from input to output text. Fill in the blank of the following template: 'Additional "
    "information: {information}'. Please answer with the additional information needed to "
    "solve the task, not the solution to the task itself.";

constexpr std::string_view kInstructionBody =
    "\n\n# Instruction\n{{instruction}}\n\n# Input text:\n{{input}}\n\n# Output text:\n"
    "{{output}}\n\n# Template:\n";

constexpr std::string_view kTaskCategoryBody =
    "\n\n# Task Category\n{{task_category}}\n\n# Input text:\n{{input}}\n\n# Output text:\n"
    "{{output}}\n\n# Template:\n";

constexpr std::string_view kClarityPrompt =
    "# Instruction\n"
    "{{instruction}}\n"
    "\n"
    "For the instruction above, please assess that combining the additional instruction "
    "below with the instruction either increases, decreases, or maintains the ambiguity "
    "level in the instruction to lead the precise generation of output text from the input "
    "text.\n"
    "More specifically, focus on the aspect of ‘{{ambiguity_category}}’ "
    "({{description}}).\n"
    "Answer with ‘More ambiguous’, ‘Less ambiguous’, or "
    "‘Unchanged’.\n"
    "\n"
    "# Input text:\n"
    "{{input}}\n"
    "\n"
    "# Output text:\n"
    "{{output}}\n"
    "\n"
    "# additional instruction:\n"
    "{{additional_instruction}}\n"
    "\n"
    "# Answer:\n";

constexpr std::string_view kUtilityPrompt =
    "Below is an input text that provides further context, paired with an instruction "
    "that describes a task.\n"
    "Write a response that appropriately completes the request.\n"
    "\n"
    "# Input text:\n"
    "{{input}}\n"
    "\n"
    "# Instruction:\n"
    "{{instruction}}\n"
    "\n"
    "# Response:\n";

constexpr std::string_view kDownstreamPrompt =
    "Below is an input text that provides further context, paired with an instruction "
    "that describes a task.\n"
    "Provide a direct response that appropriately completes the request without additional "
    "explanations or details.\n"
    "\n"
    "# Input text:\n"
    "{{input}}\n"
    "\n"
    "# Instruction:\n"
    "{{instruction}}\n"
    "\n"
    "# Response:\n";

constexpr std::string_view kIdentifyPrompt =
    "Your task involves identifying the category of ambiguity in the given instruction to "
    "generate output text from the given input text.\n"
    "Ambiguity in instruction means that there are several possible output texts from the "
    "single input text.\n"
    "On the other hand, when the ambiguity is clarified, the task becomes straightforward, "
    "leading to a nearly single output.\n"
    "Here are the available categories: {{category_list}}.\n"
    "\n"
    "{{task_definition}}\n"
    "\n"
    "If there are multiple ambiguities, please provide your answer as a comma-separated "
    "list.\n"
    "\n"
    "{{demonstrations}}"
    "# Instruction:\n"
    "{{instruction}}\n"
    "\n"
    "# Input text:\n"
    "{{input}}\n"
    "\n"
    "# Response:\n";

constexpr std::string_view kSuggestPrompt =
    "To resolve the specified ambiguity in the instruction, provide an additional specific "
    "instruction by infilling the provided template. Ensure this added information aligns "
    "with the primary objective of the task, supports understanding of complex concepts, or "
    "aids in narrowing down the scope to generate more precise responses."
    "{{batch_directive}}\n"
    "\n"
    "# Input Text:\n"
    "{{input_text}}\n"
    "\n"
    "# Instruction:\n"
    "{{instruction}}\n"
    "\n"
    "# Ambiguity to Resolve:\n"
    "{{ambiguity_category}}: {{ambiguity_definition}}\n"
    "\n"
    "# Template to Infill:\n"
    "{{template}}\n"
    "\n"
    "# Additional Instruction:";

constexpr std::string_view kIfEvalPrompt =
    "Below is an instruction for evaluating the instruction-following ability of a language "
    "model in the context of generating text based on specific instructions. The evaluation "
    "ranges from 1 to 5, with 1 being the lowest and 5 the highest in terms of accuracy and "
    "adherence to the given instruction. If there are parts of the task instructions "
    "enclosed in asterisks (*), please focus your evaluation particularly on whether it "
    "adheres to those highlighted sections.\n"
    "\n"
    "# Evaluation Criteria:\n"
    "1. The output is unrelated to the given instruction.\n"
    "2. The output vaguely relates to the instruction but misses key elements.\n"
    "3. The output is somewhat accurate but lacks detail or has minor inaccuracies.\n"
    "4. The output is accurate and detailed, with only negligible issues.\n"
    "5. The output perfectly matches the instruction with high accuracy and detail.\n"
    "\n"
    "# Instruction:\n"
    "{{instruction}}\n"
    "*{{additional_instruction}}*\n"
    "\n"
    "# Input Text:\n"
    "{{input_text}}\n"
    "\n"
    "# Output Text:\n"
    "{{output_text}}\n"
    "\n"
    "# Evaluation Form (scores ONLY):\n";

// Identification task definitions, in the published order.
constexpr std::array<std::string_view, 7> kTaskDefinitions = {
    "Length: Opt for this category if the instruction does not provide specifics about the "
    "desired length of the output, whether in terms of words or sentences. Clearing this "
    "ambiguity will lead to a more precise length output.",
    "Keyword: Select this category if the instruction does not mention specific keywords to "
    "be used in the output text. Resolving this ambiguity will ensure that the necessary "
    "keywords are incorporated in the output.",
    "Context: Choose this category if the instruction lacks the required context "
    "information, such as background or external knowledge crucial for task completion. "
    "Resolving this ambiguity will provide the crucial context for the task.",
    "Theme: Choose this category if the instruction does not clearly define the specific "
    "theme to be discussed in the output text. Clearing this ambiguity will provide a clear "
    "direction for the output.",
    "Plan: Select this category if the instructions doesn't provide guidance on content "
    "planning for the output document. Resolving this ambiguity will result in the desired "
    "structured output.",
    "Style: Choose this category if the instruction does not specify the style of the "
    "output text. Clearing this ambiguity will ensure that the output aligns with the "
    "desired style.",
    "None: Choose this category if the instructions are clear, define all aspects of the "
    "task well, and lead to a nearly single output.",
};

// Order used in the category list of the Identify prompt.
constexpr std::array<Category, kNumCategories> kIdentifyOrder = {
    Category::kLength, Category::kKeywords, Category::kContext,
    Category::kTheme,  Category::kPlanning, Category::kStyle};

struct KindInfo {
  PromptKind kind;
  std::string_view name;
};

constexpr std::array<KindInfo, 11> kKinds = {{
    {PromptKind::kDownstream, "Downstream"},
    {PromptKind::kAnnotateContext, "AnnotateContext"},
    {PromptKind::kAnnotatePlanning, "AnnotatePlanning"},
    {PromptKind::kAnnotateStyle, "AnnotateStyle"},
    {PromptKind::kAnnotateTheme, "AnnotateTheme"},
    {PromptKind::kAnnotateGeneric, "AnnotateGeneric"},
    {PromptKind::kClarityJudge, "ClarityJudge"},
    {PromptKind::kValidateUtility, "ValidateUtility"},
    {PromptKind::kIdentify, "Identify"},
    {PromptKind::kSuggest, "Suggest"},
    {PromptKind::kIfEval, "IfEval"},
}};

bool is_optional_field(std::string_view name) {
  return name == "demonstrations" || name == "batch_directive";
}

std::string user_template(PromptKind kind) {
  switch (kind) {
    case PromptKind::kDownstream: return std::string(kDownstreamPrompt);
    case PromptKind::kAnnotateContext:
      return std::string(kContextCategoryPrompt) + std::string(kInstructionBody);
    case PromptKind::kAnnotateGeneric:
      return std::string(kGenericCategoryPrompt) + std::string(kInstructionBody);
    case PromptKind::kAnnotatePlanning:
      return std::string(kPlanningCategoryPrompt) + std::string(kTaskCategoryBody);
    case PromptKind::kAnnotateStyle:
      return std::string(kStyleCategoryPrompt) + std::string(kTaskCategoryBody);
    case PromptKind::kAnnotateTheme:
      return std::string(kThemeCategoryPrompt) + std::string(kTaskCategoryBody);
    case PromptKind::kClarityJudge: return std::string(kClarityPrompt);
    case PromptKind::kValidateUtility: return std::string(kUtilityPrompt);
    case PromptKind::kIdentify: return std::string(kIdentifyPrompt);
    case PromptKind::kSuggest: return std::string(kSuggestPrompt);
    case PromptKind::kIfEval: return std::string(kIfEvalPrompt);
  }
  return {};
}

bool uses_annotation_system(PromptKind kind) {
  switch (kind) {
    case PromptKind::kAnnotateContext:
    case PromptKind::kAnnotatePlanning:
    case PromptKind::kAnnotateStyle:
    case PromptKind::kAnnotateTheme:
    case PromptKind::kAnnotateGeneric:
      return true;
    default:
      return false;
  }
}

std::vector<std::string> placeholders(std::string_view tmpl) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while ((pos = tmpl.find("{{", pos)) != std::string_view::npos) {
    const std::size_t end = tmpl.find("}}", pos);
    if (end == std::string_view::npos) break;
    std::string name(tmpl.substr(pos + 2, end - pos - 2));
    if (std::find(out.begin(), out.end(), name) == out.end()) out.push_back(name);
    pos = end + 2;
  }
  return out;
}

// Single left-to-right pass so substituted values are never re-scanned.
std::string substitute(std::string_view tmpl, const PromptFields& values) {
  std::string out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t open = tmpl.find("{{", pos);
    if (open == std::string_view::npos) {
      out += tmpl.substr(pos);
      return out;
    }
    const std::size_t close = tmpl.find("}}", open);
    out += tmpl.substr(pos, open - pos);
    const auto name = tmpl.substr(open + 2, close - open - 2);
    out += values.find(name)->second;
    pos = close + 2;
  }
}

}  // namespace

std::vector<Embedding> Provider::embed(const std::vector<std::string>&) {
  throw Error(ErrorCode::kEmbedUnsupported, "provider '" + name() + "' cannot embed");
}

std::string_view prompt_kind_name(PromptKind kind) {
  for (const auto& k : kKinds) {
    if (k.kind == kind) return k.name;
  }
  return "Unknown";
}

std::optional<PromptKind> prompt_kind_from_string(std::string_view s) {
  for (const auto& k : kKinds) {
    if (k.name == s) return k.kind;
  }
  return std::nullopt;
}

std::optional<PromptKind> annotate_kind_for(Category c) {
  switch (c) {
    case Category::kContext: return PromptKind::kAnnotateContext;
    case Category::kPlanning: return PromptKind::kAnnotatePlanning;
    case Category::kStyle: return PromptKind::kAnnotateStyle;
    case Category::kTheme: return PromptKind::kAnnotateTheme;
    default: return std::nullopt;
  }
}

std::vector<std::string> required_fields(PromptKind kind) {
  std::vector<std::string> out;
  for (auto& name : placeholders(user_template(kind))) {
    if (is_optional_field(name)) continue;
    if (kind == PromptKind::kIdentify && name == "task_definition") continue;
    out.push_back(std::move(name));
  }
  return out;
}

std::string default_category_list() {
  std::string out;
  for (Category c : kIdentifyOrder) {
    out += prompt_alias(c);
    out += ", ";
  }
  out += "None";
  return out;
}

std::string identification_task_definitions() {
  std::string out;
  for (std::size_t i = 0; i < kTaskDefinitions.size(); ++i) {
    if (i) out += '\n';
    out += kTaskDefinitions[i];
  }
  return out;
}

std::string format_category_answer(const metrics::CategorySet& labels) {
  if (labels.empty()) return "None";
  std::string out;
  for (Category c : labels) {
    if (!out.empty()) out += ", ";
    out += prompt_alias(c);
  }
  return out;
}

std::string format_identify_demo(std::string_view instruction, std::string_view input,
                                 const metrics::CategorySet& labels) {
  std::string out = "# Instruction:\n";
  out += instruction;
  out += "\n\n# Input text:\n";
  out += input;
  out += "\n\n# Response:\n";
  out += format_category_answer(labels);
  out += "\n\n";
  return out;
}

std::string batch_directive(int n) {
  return " Provide " + std::to_string(n) +
         " different additional instructions as a numbered list (1., 2., ...), one per "
         "line.";
}

ChatRequest build_prompt(PromptKind kind, const PromptFields& fields) {
  const std::string tmpl = user_template(kind);
  PromptFields values;
  std::vector<std::string> missing;
  for (const auto& name : placeholders(tmpl)) {
    if (kind == PromptKind::kIdentify && name == "task_definition") {
      values[name] = identification_task_definitions();
      continue;
    }
    auto it = fields.find(name);
    if (it != fields.end()) {
      values[name] = it->second;
    } else if (is_optional_field(name)) {
      values[name] = "";
    } else {
      missing.push_back(name);
    }
  }
  if (!missing.empty()) {
    std::string msg = std::string(prompt_kind_name(kind)) + " prompt is missing field(s): ";
    msg += text::join(missing, ", ");
    throw Error(ErrorCode::kMissingField, msg);
  }
  ChatRequest r;
  r.kind = std::string(prompt_kind_name(kind));
  if (uses_annotation_system(kind)) r.system = std::string(kAnnotationSystemMessage);
  r.user = substitute(tmpl, values);
  return r;
}

IdentificationParse parse_identification(std::string_view response) {
  IdentificationParse out;
  bool saw_none = false;
  std::string normalized(response);
  std::replace(normalized.begin(), normalized.end(), '\n', ',');
  std::replace(normalized.begin(), normalized.end(), ';', ',');
  for (auto piece : text::split(normalized, ',')) {
    piece = text::trim(piece);
    // Strip list markers, quotes and trailing punctuation.
    while (!piece.empty() && std::string_view("-*\"'`[(").find(piece.front()) != std::string_view::npos)
      piece.remove_prefix(1);
    while (!piece.empty() && std::string_view(".!\"'`])").find(piece.back()) != std::string_view::npos)
      piece.remove_suffix(1);
    piece = text::trim(piece);
    if (piece.empty()) continue;
    if (text::iequals(piece, "None")) {
      saw_none = true;
      continue;
    }
    if (auto c = parse_category(piece)) {
      out.categories.insert(*c);
    } else {
      out.warnings.push_back("unrecognized category '" + std::string(piece) + "'");
    }
  }
  if (saw_none && !out.categories.empty()) {
    out.warnings.emplace_back("'None' given together with categories; keeping the categories");
  }
  if (!saw_none && out.categories.empty() && out.warnings.empty()) {
    out.warnings.emplace_back("no category recognized in response");
  }
  return out;
}

ClarityJudgment parse_clarity(std::string_view response) {
  const std::string lower = text::to_lower(response);
  if (lower.find("less ambiguous") != std::string::npos) return ClarityJudgment::kLessAmbiguous;
  if (lower.find("more ambiguous") != std::string::npos) return ClarityJudgment::kMoreAmbiguous;
  if (lower.find("unchanged") != std::string::npos) return ClarityJudgment::kUnchanged;
  throw Error(ErrorCode::kUnparseableJudgment,
              "clarity judgment not recognized: '" + std::string(text::trim(response)) + "'");
}

std::optional<int> parse_if_score(std::string_view response) {
  for (std::size_t i = 0; i < response.size(); ++i) {
    const char c = response[i];
    if (c < '0' || c > '9') continue;
    std::size_t j = i;
    while (j < response.size() && std::isdigit(static_cast<unsigned char>(response[j]))) ++j;
    const int v = std::stoi(std::string(response.substr(i, j - i)));
    if (v >= 1 && v <= 5) return v;
    i = j;
  }
  return std::nullopt;
}

std::vector<std::string> parse_numbered_list(std::string_view response) {
  std::vector<std::string> numbered, lines;
  for (auto line : text::split(response, '\n')) {
    line = text::trim(line);
    if (line.empty()) continue;
    lines.emplace_back(line);
    std::size_t i = 0;
    while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i]))) ++i;
    if (i > 0 && i < line.size() && (line[i] == '.' || line[i] == ')')) {
      auto item = text::trim(line.substr(i + 1));
      if (!item.empty()) numbered.emplace_back(item);
    }
  }
  return numbered.empty() ? lines : numbered;
}

nlohmann::json ChatRequest::canonical_json() const {
  nlohmann::json j;
  j["kind"] = kind;
  j["system"] = system;
  j["user"] = user;
  j["model_id"] = model_id;
  j["temperature"] = temperature;
  j["max_tokens"] = max_tokens;
  j["seed"] = seed ? nlohmann::json(*seed) : nlohmann::json(nullptr);
  return j;
}

void ChatRequest::validate() const {
  if (n_samples < 1) throw Error(ErrorCode::kInvalidArgument, "n_samples must be >= 1");
  if (max_tokens < 1) throw Error(ErrorCode::kInvalidArgument, "max_tokens must be >= 1");
  if (!(temperature >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "temperature must be >= 0");
}

}  // namespace ambig::llm
