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

#include <array>
#include <cstddef>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ambig/core.hpp"

namespace ambig::metrics {

// Lowercased word tokens. Words are maximal runs of ASCII alphanumerics or
// non-ASCII bytes; everything else separates.
using TokenSeq = std::vector<std::string>;

TokenSeq tokenize(std::string_view text);

// A word with its original casing and byte offset.
struct WordSpan {
  std::string_view surface;
  std::size_t offset;
};
std::vector<WordSpan> split_words(std::string_view text);

struct RougeScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

std::size_t lcs_length(std::span<const std::string> a,
                       std::span<const std::string> b);

RougeScore rouge_l(const TokenSeq& candidate, const TokenSeq& reference);
RougeScore rouge_l(std::string_view candidate, std::string_view reference);

// Mean pairwise ROUGE-L F1 over all unordered pairs. Throws
// Error(kTooFewSamples) for fewer than two samples.
double intra_rl(const std::vector<std::string>& samples);

// Best ROUGE-L F1 of any candidate against the reference. Throws
// Error(kEmptyCandidates).
double rl_at_n(const std::vector<std::string>& candidates,
               std::string_view reference);

using CategorySet = std::set<Category>;

struct CategoryConfusion {
  std::size_t tp = 0, tn = 0, fp = 0, fn = 0;
  std::size_t total() const { return tp + tn + fp + fn; }
};

struct CategoryMetrics {
  CategoryConfusion confusion;
  std::optional<double> tpr;  // absent without gold positives
  std::optional<double> tnr;  // absent without gold negatives
  double accuracy = 0.0;
};

struct ClassificationReport {
  std::size_t n = 0;
  std::array<CategoryMetrics, kNumCategories> per_category{};
  std::optional<double> macro_tpr;
  std::optional<double> macro_tnr;
  double macro_accuracy = 0.0;
  double exact_match = 0.0;
};

// Rates are fractions in [0,1]. Throws Error(kLengthMismatch) when the
// lists differ in length and Error(kInvalidArgument) when empty.
ClassificationReport classification_metrics(const std::vector<CategorySet>& predictions,
                                            const std::vector<CategorySet>& gold);

struct SignificanceResult {
  double p_value = 1.0;
  bool significant = false;
  double statistic = 0.0;  // Mann-Whitney U of samples_b
  double alpha = 0.05;
  bool exact = false;
};

inline constexpr double kDefaultAlpha = 0.05;
inline constexpr std::size_t kExactMaxPerSide = 12;

// One-sided Mann-Whitney U test of H1: samples_b tends to exceed samples_a.
// Ties use mid-ranks. Exact permutation distribution when both sides have
// at most 12 values, otherwise a tie-corrected normal approximation.
SignificanceResult significance_test(std::span<const double> samples_a,
                                     std::span<const double> samples_b,
                                     double alpha = kDefaultAlpha);

double mean(std::span<const double> values);

}  // namespace ambig::metrics
