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

// Ambiguity taxonomy, fill-in-the-blank templates and instruction refinement.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ambig {

// Declaration order is the canonical (alphabetical) order.
enum class Category : std::uint8_t {
  kContext = 0,
  kKeywords,
  kLength,
  kPlanning,
  kStyle,
  kTheme,
};

inline constexpr std::size_t kNumCategories = 6;
inline constexpr std::array<Category, kNumCategories> kAllCategories = {
    Category::kContext, Category::kKeywords, Category::kLength,
    Category::kPlanning, Category::kStyle,   Category::kTheme};

constexpr std::size_t index_of(Category c) {
  return static_cast<std::size_t>(c);
}

// "Context", "Keywords", ...
std::string_view category_name(Category c);
// Name used inside LLM prompts: "Keyword" and "Plan" differ from the
// canonical names.
std::string_view prompt_alias(Category c);
// One-line definition from the taxonomy table.
std::string_view category_definition(Category c);
// Case-insensitive; accepts both canonical names and prompt aliases.
std::optional<Category> parse_category(std::string_view text);
// Throws Error(kInvalidCategory).
Category category_from_string(std::string_view text);

enum class SlotKind { kSingleText, kKeywordList, kNumberedOutline, kRange };

struct Template {
  Category category;
  // Internal form: "{}" marks the slot.
  std::string_view pattern;
  SlotKind slot_kind;

  // Display form with "___" in place of the slot.
  std::string display() const;
  // Text before / after the slot.
  std::string_view prefix() const;
  std::string_view suffix() const;
};

const Template& template_for(Category c);

inline constexpr std::string_view kBlankMarker = "___";
inline constexpr std::string_view kGenericPattern = "Additional information: {}";

// Throws Error(kEmptyFiller) on a blank filler and Error(kWrongArity) when
// the number of fillers does not fit the slot kind.
std::string render_template(Category c, const std::vector<std::string>& fillers);

// Inverse of render_template. Returns nullopt when `text` is not an exact
// rendering of the category template.
std::optional<std::vector<std::string>> extract_fillers(Category c,
                                                        std::string_view text);

std::string render_generic(std::string_view filler);
std::optional<std::string> extract_generic_filler(std::string_view text);

enum class Source { kRule, kLlm, kHuman };
std::string_view source_name(Source s);
Source source_from_string(std::string_view s);

// A category-tagged, template-conformant clarification sentence.
class AdditionalInstruction {
 public:
  // Renders the template; throws like render_template.
  AdditionalInstruction(Category category, std::vector<std::string> fillers,
                        Source source = Source::kHuman);

  // Parses a full sentence back into fillers. Throws
  // Error(kInvalidArgument) when the text does not match the template.
  static AdditionalInstruction from_text(Category category,
                                         std::string_view text,
                                         Source source = Source::kHuman);

  Category category() const { return category_; }
  const std::string& text() const { return text_; }
  const std::vector<std::string>& fillers() const { return fillers_; }
  Source source() const { return source_; }

  friend bool operator==(const AdditionalInstruction&,
                         const AdditionalInstruction&) = default;

 private:
  Category category_;
  std::vector<std::string> fillers_;
  std::string text_;
  Source source_;
};

enum class ClarityJudgment { kMoreAmbiguous, kLessAmbiguous, kUnchanged };
std::string_view clarity_name(ClarityJudgment j);
std::optional<ClarityJudgment> clarity_from_string(std::string_view s);

struct ValidationInfo {
  std::optional<ClarityJudgment> clarity;
  std::optional<double> utility_p;
  std::optional<double> mean_gain;

  friend bool operator==(const ValidationInfo&, const ValidationInfo&) = default;
};

struct Annotation {
  AdditionalInstruction instruction;
  std::optional<ValidationInfo> validation;

  friend bool operator==(const Annotation&, const Annotation&) = default;
};

struct TaskInstance {
  std::string id;
  std::string task_name;
  std::string instruction;
  std::string input;
  std::string reference;
  // At most one per category; kept in canonical order by add_annotation.
  std::vector<Annotation> annotations;

  // Throws Error(kDuplicateCategory).
  void add_annotation(Annotation a);
  std::vector<Category> categories() const;
  std::vector<AdditionalInstruction> additional_instructions() const;

  friend bool operator==(const TaskInstance&, const TaskInstance&) = default;
};

struct RefinedInstruction {
  std::string base;
  std::vector<AdditionalInstruction> parts;  // canonical category order
  std::string rendered;
};

inline constexpr std::string_view kDefaultSeparator = " ";

// Sorts `parts` into canonical order and joins base and part texts with
// `separator`. Throws Error(kDuplicateCategory).
RefinedInstruction refine_instruction(std::string_view base,
                                      std::vector<AdditionalInstruction> parts,
                                      std::string_view separator = kDefaultSeparator);

struct GenerationConfig {
  std::string model_id = "gpt-4";
  double temperature = 1.0;
  int num_samples = 20;
  int max_tokens = 512;

  // Throws Error(kInvalidArgument).
  void validate() const;
};

}  // namespace ambig
