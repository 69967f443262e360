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

#include "ambig/core.hpp"

#include <algorithm>
#include <bitset>

#include "ambig/error.hpp"
#include "text_util.hpp"

namespace ambig {
namespace {

struct CategoryInfo {
  std::string_view name;
  std::string_view alias;
  std::string_view definition;
};

constexpr std::array<CategoryInfo, kNumCategories> kInfo = {{
    {"Context", "Context", "Uncertainty of the situation or background"},
    {"Keywords", "Keyword", "Not sure which words to include"},
    {"Length", "Length", "Underspecified length"},
    {"Planning", "Plan", "Uncertainty of the text structure"},
    {"Style", "Style", "Underspecified writing style"},
    {"Theme", "Theme", "Uncertainty of the main subject"},
}};

constexpr std::array<Template, kNumCategories> kTemplates = {{
    {Category::kContext, "Additional context: {}", SlotKind::kSingleText},
    {Category::kKeywords, "Include {} in your response.", SlotKind::kKeywordList},
    {Category::kLength, "Answer with {} words.", SlotKind::kRange},
    {Category::kPlanning,
     "Please generate the output based on the following outline: {}",
     SlotKind::kNumberedOutline},
    {Category::kStyle, "Write in a {} style.", SlotKind::kSingleText},
    {Category::kTheme, "Primarily discuss the following theme: {}.",
     SlotKind::kSingleText},
}};

constexpr std::string_view kKeywordJoin = ", ";

std::string_view pattern_prefix(std::string_view pattern) {
  return pattern.substr(0, pattern.find("{}"));
}

std::string_view pattern_suffix(std::string_view pattern) {
  return pattern.substr(pattern.find("{}") + 2);
}

std::string render_outline(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ' ';
    out += std::to_string(i + 1);
    out += ". ";
    out += items[i];
  }
  return out;
}

// Splits "1. a 2. b" back into {"a", "b"}.
std::optional<std::vector<std::string>> parse_outline(std::string_view body) {
  if (!text::starts_with(body, "1. ")) return std::nullopt;
  std::vector<std::string> items;
  std::size_t start = 3;
  for (int next = 2;; ++next) {
    const std::string marker = " " + std::to_string(next) + ". ";
    const std::size_t pos = body.find(marker, start);
    if (pos == std::string_view::npos) {
      items.emplace_back(body.substr(start));
      break;
    }
    items.emplace_back(body.substr(start, pos - start));
    start = pos + marker.size();
  }
  return items;
}

std::vector<std::string> split_keywords(std::string_view body) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = body.find(kKeywordJoin, start);
    if (pos == std::string_view::npos) {
      out.emplace_back(body.substr(start));
      return out;
    }
    out.emplace_back(body.substr(start, pos - start));
    start = pos + kKeywordJoin.size();
  }
}

}  // namespace

std::string_view category_name(Category c) { return kInfo[index_of(c)].name; }

std::string_view prompt_alias(Category c) { return kInfo[index_of(c)].alias; }

std::string_view category_definition(Category c) {
  return kInfo[index_of(c)].definition;
}

std::optional<Category> parse_category(std::string_view s) {
  s = text::trim(s);
  for (Category c : kAllCategories) {
    if (text::iequals(s, category_name(c)) || text::iequals(s, prompt_alias(c)))
      return c;
  }
  return std::nullopt;
}

Category category_from_string(std::string_view s) {
  if (auto c = parse_category(s)) return *c;
  throw Error(ErrorCode::kInvalidCategory,
              "unknown ambiguity category '" + std::string(s) + "'");
}

std::string Template::display() const {
  std::string out(prefix());
  out += kBlankMarker;
  out += suffix();
  return out;
}

std::string_view Template::prefix() const { return pattern_prefix(pattern); }
std::string_view Template::suffix() const { return pattern_suffix(pattern); }

const Template& template_for(Category c) { return kTemplates[index_of(c)]; }

std::string render_template(Category c, const std::vector<std::string>& fillers) {
  const Template& t = template_for(c);
  if (fillers.empty()) {
    throw Error(ErrorCode::kWrongArity,
                std::string(category_name(c)) + " template needs at least one filler");
  }
  for (const auto& f : fillers) {
    if (text::is_blank(f)) {
      throw Error(ErrorCode::kEmptyFiller,
                  std::string(category_name(c)) + " template filler is blank");
    }
  }
  std::string body;
  switch (t.slot_kind) {
    case SlotKind::kSingleText:
    case SlotKind::kRange:
      if (fillers.size() != 1) {
        throw Error(ErrorCode::kWrongArity,
                    std::string(category_name(c)) + " template takes exactly one filler, got " +
                        std::to_string(fillers.size()));
      }
      body = fillers.front();
      break;
    case SlotKind::kKeywordList:
      body = text::join(fillers, kKeywordJoin);
      break;
    case SlotKind::kNumberedOutline:
      body = render_outline(fillers);
      break;
  }
  std::string out(t.prefix());
  out += body;
  out += t.suffix();
  return out;
}

std::optional<std::vector<std::string>> extract_fillers(Category c,
                                                        std::string_view s) {
  const Template& t = template_for(c);
  const auto prefix = t.prefix();
  const auto suffix = t.suffix();
  if (s.size() < prefix.size() + suffix.size() || !text::starts_with(s, prefix) ||
      s.substr(s.size() - suffix.size()) != suffix) {
    return std::nullopt;
  }
  const std::string_view body =
      s.substr(prefix.size(), s.size() - prefix.size() - suffix.size());
  std::optional<std::vector<std::string>> fillers;
  switch (t.slot_kind) {
    case SlotKind::kSingleText:
    case SlotKind::kRange:
      fillers = std::vector<std::string>{std::string(body)};
      break;
    case SlotKind::kKeywordList:
      fillers = split_keywords(body);
      break;
    case SlotKind::kNumberedOutline:
      fillers = parse_outline(body);
      break;
  }
  if (!fillers) return std::nullopt;
  for (const auto& f : *fillers) {
    if (text::is_blank(f)) return std::nullopt;
  }
  // Only accept texts that re-render byte-identically.
  if (render_template(c, *fillers) != s) return std::nullopt;
  return fillers;
}

std::string render_generic(std::string_view filler) {
  if (text::is_blank(filler)) {
    throw Error(ErrorCode::kEmptyFiller, "generic template filler is blank");
  }
  std::string out(pattern_prefix(kGenericPattern));
  out += filler;
  out += pattern_suffix(kGenericPattern);
  return out;
}

std::optional<std::string> extract_generic_filler(std::string_view s) {
  const auto prefix = pattern_prefix(kGenericPattern);
  if (!text::starts_with(s, prefix)) return std::nullopt;
  auto body = s.substr(prefix.size());
  if (text::is_blank(body)) return std::nullopt;
  return std::string(body);
}

std::string_view source_name(Source s) {
  switch (s) {
    case Source::kRule: return "rule";
    case Source::kLlm: return "llm";
    case Source::kHuman: return "human";
  }
  return "human";
}

Source source_from_string(std::string_view s) {
  if (s == "rule") return Source::kRule;
  if (s == "llm") return Source::kLlm;
  if (s == "human") return Source::kHuman;
  throw Error(ErrorCode::kInvalidRecord, "unknown annotation source '" + std::string(s) + "'");
}

AdditionalInstruction::AdditionalInstruction(Category category,
                                             std::vector<std::string> fillers,
                                             Source source)
    : category_(category),
      fillers_(std::move(fillers)),
      text_(render_template(category_, fillers_)),
      source_(source) {}

AdditionalInstruction AdditionalInstruction::from_text(Category category,
                                                       std::string_view s,
                                                       Source source) {
  auto fillers = extract_fillers(category, s);
  if (!fillers) {
    throw Error(ErrorCode::kInvalidArgument,
                "text does not match the " + std::string(category_name(category)) +
                    " template: '" + std::string(s) + "'");
  }
  return AdditionalInstruction(category, std::move(*fillers), source);
}

std::string_view clarity_name(ClarityJudgment j) {
  switch (j) {
    case ClarityJudgment::kMoreAmbiguous: return "More ambiguous";
    case ClarityJudgment::kLessAmbiguous: return "Less ambiguous";
    case ClarityJudgment::kUnchanged: return "Unchanged";
  }
  return "Unchanged";
}

std::optional<ClarityJudgment> clarity_from_string(std::string_view s) {
  for (auto j : {ClarityJudgment::kMoreAmbiguous, ClarityJudgment::kLessAmbiguous,
                 ClarityJudgment::kUnchanged}) {
    if (text::iequals(s, clarity_name(j))) return j;
  }
  return std::nullopt;
}

void TaskInstance::add_annotation(Annotation a) {
  const Category c = a.instruction.category();
  auto pos = std::find_if(annotations.begin(), annotations.end(),
                          [c](const Annotation& x) {
                            return x.instruction.category() >= c;
                          });
  if (pos != annotations.end() && pos->instruction.category() == c) {
    throw Error(ErrorCode::kDuplicateCategory,
                "instance '" + id + "' already has a " +
                    std::string(category_name(c)) + " annotation");
  }
  annotations.insert(pos, std::move(a));
}

std::vector<Category> TaskInstance::categories() const {
  std::vector<Category> out;
  for (const auto& a : annotations) out.push_back(a.instruction.category());
  return out;
}

std::vector<AdditionalInstruction> TaskInstance::additional_instructions() const {
  std::vector<AdditionalInstruction> out;
  for (const auto& a : annotations) out.push_back(a.instruction);
  return out;
}

RefinedInstruction refine_instruction(std::string_view base,
                                      std::vector<AdditionalInstruction> parts,
                                      std::string_view separator) {
  std::bitset<kNumCategories> seen;
  for (const auto& p : parts) {
    const auto i = index_of(p.category());
    if (seen.test(i)) {
      throw Error(ErrorCode::kDuplicateCategory,
                  "more than one " + std::string(category_name(p.category())) +
                      " additional instruction");
    }
    seen.set(i);
  }
  std::sort(parts.begin(), parts.end(), [](const auto& a, const auto& b) {
    return a.category() < b.category();
  });
  RefinedInstruction out;
  out.base = std::string(base);
  out.rendered = out.base;
  for (const auto& p : parts) {
    out.rendered += separator;
    out.rendered += p.text();
  }
  out.parts = std::move(parts);
  return out;
}

void GenerationConfig::validate() const {
  if (num_samples < 1)
    throw Error(ErrorCode::kInvalidArgument, "num_samples must be >= 1");
  if (!(temperature >= 0.0))
    throw Error(ErrorCode::kInvalidArgument, "temperature must be >= 0");
  if (max_tokens < 1)
    throw Error(ErrorCode::kInvalidArgument, "max_tokens must be >= 1");
}

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kOk: return "Ok";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kEmptyFiller: return "EmptyFiller";
    case ErrorCode::kWrongArity: return "WrongArity";
    case ErrorCode::kDuplicateCategory: return "DuplicateCategory";
    case ErrorCode::kInvalidCategory: return "InvalidCategory";
    case ErrorCode::kTooFewSamples: return "TooFewSamples";
    case ErrorCode::kEmptyCandidates: return "EmptyCandidates";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kMissingField: return "MissingField";
    case ErrorCode::kUnparseableJudgment: return "UnparseableJudgment";
    case ErrorCode::kProviderUnavailable: return "ProviderUnavailable";
    case ErrorCode::kBudgetExceeded: return "BudgetExceeded";
    case ErrorCode::kEmbedUnsupported: return "EmbedUnsupported";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kDuplicateId: return "DuplicateId";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kEmptyPool: return "EmptyPool";
    case ErrorCode::kMissingAnnotations: return "MissingAnnotations";
    case ErrorCode::kUnknownSession: return "UnknownSession";
    case ErrorCode::kIndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::kUnrenderableCustomText: return "UnrenderableCustomText";
    case ErrorCode::kEmptyInstruction: return "EmptyInstruction";
    case ErrorCode::kInvalidRecord: return "InvalidRecord";
  }
  return "Unknown";
}

}  // namespace ambig
