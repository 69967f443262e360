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

// Rule-based Keywords and Length annotation derived from a reference text.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ambig/core.hpp"

namespace ambig::rules {

struct Keyphrase {
  std::string text;  // surface form of the first occurrence
  double score = 0.0;  // lower is more important
  int word_count = 0;
};

struct KeyphraseOptions {
  int max_ngram = 3;
  int top_k = 20;
  double dedup_threshold = 0.9;
};

// Statistical single-document keyphrase extraction in the YAKE family.
//
// Text is split into sentences (. ! ? or newline) and then into chunks at
// other punctuation; candidates are n-grams inside a chunk that neither start
// nor end with a stopword and contain no numeric token. Each lowercased term
// gets
//
//   H = (pos * rel) / (casing + freq / rel + spread / rel)
//
//   casing = max(tf_upper, tf_proper) / (1 + ln tf)
//   pos    = ln(ln(3 + median sentence index))
//   freq   = tf / (mean_tf + stddev_tf)      (over non-stopword terms)
//   rel    = 1 + (dl + dr) * tf / max_tf     (dl, dr: distinct/total
//                                             left/right neighbours)
//   spread = sentences containing the term / sentences
//
// and a candidate scores prod(H) / (tf_candidate * (1 + sum(H))), where a
// stopword inside a candidate contributes through the bigram probability of
// its neighbours instead of its own H. Results ascend by score; a candidate
// whose normalized edit similarity to a better one is >= dedup_threshold is
// dropped. Ties go to the earlier first occurrence, then lexicographic order.
std::vector<Keyphrase> extract_keyphrases(std::string_view text,
                                          const KeyphraseOptions& options = {});

inline constexpr int kMaxKeywords = 4;
inline constexpr double kKeywordBudgetRatio = 0.4;

// The longest prefix of at most four phrases whose word counts sum to no more
// than 0.4 * total_words.
std::vector<Keyphrase> select_keywords(const std::vector<Keyphrase>& ranked,
                                       int total_words);

int count_words(std::string_view text);

struct LengthBucket {
  int lower = 0;
  int upper = 0;
  bool less_than = false;
};

LengthBucket length_bucket(int word_count);

AdditionalInstruction annotate_length(std::string_view reference);

// Absent when no keyphrase fits the budget.
std::optional<AdditionalInstruction> annotate_keywords(std::string_view reference,
                                                       const KeyphraseOptions& options = {});

// 1 - levenshtein(a, b) / max(|a|, |b|); 1 for two empty strings.
double edit_similarity(std::string_view a, std::string_view b);

bool is_stopword(std::string_view lowercase_word);

}  // namespace ambig::rules
