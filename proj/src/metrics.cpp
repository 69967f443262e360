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

#include "ambig/metrics.hpp"

#include <algorithm>
#include <numeric>

#include "ambig/error.hpp"

namespace ambig::metrics {
namespace {

bool is_word_byte(unsigned char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') ||
         (c >= 'A' && c <= 'Z') || c >= 0x80;
}

}  // namespace

std::vector<WordSpan> split_words(std::string_view text) {
  std::vector<WordSpan> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && !is_word_byte(static_cast<unsigned char>(text[i]))) ++i;
    const std::size_t start = i;
    while (i < text.size() && is_word_byte(static_cast<unsigned char>(text[i]))) ++i;
    if (i > start) out.push_back({text.substr(start, i - start), start});
  }
  return out;
}

TokenSeq tokenize(std::string_view text) {
  TokenSeq out;
  for (const auto& w : split_words(text)) {
    std::string tok(w.surface);
    for (auto& ch : tok) {
      if (ch >= 'A' && ch <= 'Z') ch = static_cast<char>(ch - 'A' + 'a');
    }
    out.push_back(std::move(tok));
  }
  return out;
}

std::size_t lcs_length(std::span<const std::string> a,
                       std::span<const std::string> b) {
  if (a.empty() || b.empty()) return 0;
  if (b.size() > a.size()) std::swap(a, b);
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

RougeScore rouge_l(const TokenSeq& candidate, const TokenSeq& reference) {
  RougeScore s;
  if (candidate.empty() || reference.empty()) return s;
  const double lcs = static_cast<double>(lcs_length(candidate, reference));
  s.precision = lcs / static_cast<double>(candidate.size());
  s.recall = lcs / static_cast<double>(reference.size());
  if (s.precision + s.recall > 0.0) {
    s.f1 = 2.0 * s.precision * s.recall / (s.precision + s.recall);
  }
  return s;
}

RougeScore rouge_l(std::string_view candidate, std::string_view reference) {
  return rouge_l(tokenize(candidate), tokenize(reference));
}

double intra_rl(const std::vector<std::string>& samples) {
  if (samples.size() < 2) {
    throw Error(ErrorCode::kTooFewSamples,
                "Intra-RL needs at least 2 samples, got " + std::to_string(samples.size()));
  }
  std::vector<TokenSeq> toks;
  toks.reserve(samples.size());
  for (const auto& s : samples) toks.push_back(tokenize(s));
  double sum = 0.0;
  std::size_t pairs = 0;
  for (std::size_t j = 0; j < toks.size(); ++j) {
    for (std::size_t k = j + 1; k < toks.size(); ++k) {
      sum += rouge_l(toks[j], toks[k]).f1;
      ++pairs;
    }
  }
  return sum / static_cast<double>(pairs);
}

double rl_at_n(const std::vector<std::string>& candidates,
               std::string_view reference) {
  if (candidates.empty()) {
    throw Error(ErrorCode::kEmptyCandidates, "RL@N needs at least one candidate");
  }
  const TokenSeq ref = tokenize(reference);
  double best = 0.0;
  for (const auto& c : candidates) best = std::max(best, rouge_l(tokenize(c), ref).f1);
  return best;
}

ClassificationReport classification_metrics(const std::vector<CategorySet>& predictions,
                                            const std::vector<CategorySet>& gold) {
  if (predictions.size() != gold.size()) {
    throw Error(ErrorCode::kLengthMismatch,
                "predictions (" + std::to_string(predictions.size()) + ") and gold (" +
                    std::to_string(gold.size()) + ") differ in length");
  }
  if (gold.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "classification needs at least one instance");
  }
  ClassificationReport r;
  r.n = gold.size();
  std::size_t exact = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (predictions[i] == gold[i]) ++exact;
    for (Category c : kAllCategories) {
      const bool p = predictions[i].count(c) > 0;
      const bool g = gold[i].count(c) > 0;
      auto& m = r.per_category[index_of(c)].confusion;
      if (p && g) ++m.tp;
      else if (!p && !g) ++m.tn;
      else if (p) ++m.fp;
      else ++m.fn;
    }
  }
  r.exact_match = static_cast<double>(exact) / static_cast<double>(r.n);

  double tpr_sum = 0.0, tnr_sum = 0.0, acc_sum = 0.0;
  std::size_t tpr_n = 0, tnr_n = 0;
  for (auto& m : r.per_category) {
    const auto& c = m.confusion;
    if (c.tp + c.fn > 0) {
      m.tpr = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
      tpr_sum += *m.tpr;
      ++tpr_n;
    }
    if (c.tn + c.fp > 0) {
      m.tnr = static_cast<double>(c.tn) / static_cast<double>(c.tn + c.fp);
      tnr_sum += *m.tnr;
      ++tnr_n;
    }
    m.accuracy = static_cast<double>(c.tp + c.tn) / static_cast<double>(c.total());
    acc_sum += m.accuracy;
  }
  if (tpr_n) r.macro_tpr = tpr_sum / static_cast<double>(tpr_n);
  if (tnr_n) r.macro_tnr = tnr_sum / static_cast<double>(tnr_n);
  r.macro_accuracy = acc_sum / static_cast<double>(kNumCategories);
  return r;
}

double mean(std::span<const double> values) {
  if (values.empty()) return 0.0;
  return std::accumulate(values.begin(), values.end(), 0.0) /
         static_cast<double>(values.size());
}

}  // namespace ambig::metrics
