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

#include "ambig/rule_annotators.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

#include "ambig/metrics.hpp"
#include "text_util.hpp"

namespace ambig::rules {
namespace {

const std::unordered_set<std::string_view>& stopwords() {
  static const std::unordered_set<std::string_view> kWords = {
      "a", "about", "above", "after", "again", "against", "all", "am", "an", "and",
      "any", "are", "aren", "as", "at", "be", "because", "been", "before", "being",
      "below", "between", "both", "but", "by", "can", "could", "did", "didn", "do",
      "does", "doesn", "doing", "don", "down", "during", "each", "few", "for", "from",
      "further", "had", "hadn", "has", "hasn", "have", "haven", "having", "he", "her",
      "here", "hers", "herself", "him", "himself", "his", "how", "i", "if", "in",
      "into", "is", "isn", "it", "its", "itself", "just", "me", "more", "most",
      "my", "myself", "no", "nor", "not", "now", "of", "off", "on", "once",
      "only", "or", "other", "our", "ours", "ourselves", "out", "over", "own", "same",
      "she", "should", "so", "some", "such", "than", "that", "the", "their", "theirs",
      "them", "themselves", "then", "there", "these", "they", "this", "those", "through", "to",
      "too", "under", "until", "up", "very", "was", "wasn", "we", "were", "weren",
      "what", "when", "where", "which", "while", "who", "whom", "why", "will", "with",
      "won", "would", "you", "your", "yours", "yourself", "yourselves", "also", "may", "might",
      "must", "shall", "upon", "within", "without", "yet", "via", "per", "many", "much",
      "every", "either", "neither", "whether", "though", "although", "however", "thus", "hence", "one",
  };
  return kWords;
}

enum class Tag { kPlain, kDigit, kUnparsable, kAcronym, kProper };

struct Token {
  std::string key;      // lowercased
  std::string_view surface;
  Tag tag = Tag::kPlain;
  bool stop = false;
  std::size_t sentence = 0;
  std::size_t chunk = 0;  // global chunk index; candidates never cross chunks
  std::size_t position = 0;
};

bool all_of_bytes(std::string_view s, bool (*pred)(unsigned char)) {
  return std::all_of(s.begin(), s.end(),
                     [pred](char c) { return pred(static_cast<unsigned char>(c)); });
}

bool any_of_bytes(std::string_view s, bool (*pred)(unsigned char)) {
  return std::any_of(s.begin(), s.end(),
                     [pred](char c) { return pred(static_cast<unsigned char>(c)); });
}

bool is_digit(unsigned char c) { return c >= '0' && c <= '9'; }
bool is_upper(unsigned char c) { return c >= 'A' && c <= 'Z'; }

Tag classify(std::string_view w, bool sentence_start) {
  if (all_of_bytes(w, is_digit)) return Tag::kDigit;
  if (any_of_bytes(w, is_digit)) return Tag::kUnparsable;
  if (w.size() > 1 && all_of_bytes(w, is_upper)) return Tag::kAcronym;
  if (is_upper(static_cast<unsigned char>(w.front())) && !sentence_start) return Tag::kProper;
  return Tag::kPlain;
}

bool is_sentence_end(char c) { return c == '.' || c == '!' || c == '?' || c == '\n'; }

// Punctuation between words that breaks a candidate chunk. Hyphens and
// apostrophes join words.
bool breaks_chunk(std::string_view gap) {
  for (char c : gap) {
    if (text::is_space(c) || c == '-' || c == '\'') continue;
    return true;
  }
  return false;
}

std::vector<Token> tokenize_document(std::string_view doc, std::size_t& num_sentences) {
  std::vector<Token> tokens;
  const auto words = metrics::split_words(doc);
  std::size_t sentence = 0, chunk = 0;
  bool sentence_start = true;
  std::size_t prev_end = 0;
  for (std::size_t i = 0; i < words.size(); ++i) {
    const auto& w = words[i];
    if (i > 0) {
      const std::string_view gap = doc.substr(prev_end, w.offset - prev_end);
      // A '.' directly followed by a word character is part of an
      // abbreviation or number, not a boundary.
      bool ends = false;
      for (std::size_t k = 0; k < gap.size(); ++k) {
        if (is_sentence_end(gap[k]) && (k + 1 < gap.size() || gap[k] == '\n')) ends = true;
      }
      if (ends) {
        ++sentence;
        ++chunk;
        sentence_start = true;
      } else if (breaks_chunk(gap)) {
        ++chunk;
      }
    }
    Token t;
    t.surface = w.surface;
    t.key = text::to_lower(w.surface);
    t.tag = classify(w.surface, sentence_start);
    t.stop = stopwords().count(t.key) > 0 || t.key.size() < 3;
    t.sentence = sentence;
    t.chunk = chunk;
    t.position = i;
    tokens.push_back(std::move(t));
    sentence_start = false;
    prev_end = w.offset + w.surface.size();
  }
  num_sentences = tokens.empty() ? 0 : sentence + 1;
  return tokens;
}

struct TermStats {
  double tf = 0, tf_acronym = 0, tf_proper = 0;
  std::vector<std::size_t> sentences;
  std::map<std::string, double> left;   // neighbour -> weight
  std::map<std::string, double> right;
  bool stop = false;
  bool valid = true;  // not numeric / unparsable
  double h = 0.0;
};

double median(std::vector<std::size_t> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  if (n % 2) return static_cast<double>(v[n / 2]);
  return (static_cast<double>(v[n / 2 - 1]) + static_cast<double>(v[n / 2])) / 2.0;
}

double sum_weights(const std::map<std::string, double>& m) {
  double s = 0;
  for (const auto& [k, w] : m) s += w;
  return s;
}

void score_terms(std::unordered_map<std::string, TermStats>& terms,
                 std::size_t num_sentences) {
  std::vector<double> valid_tfs;
  double max_tf = 0.0;
  for (const auto& [k, t] : terms) {
    max_tf = std::max(max_tf, t.tf);
    if (!t.stop && t.valid) valid_tfs.push_back(t.tf);
  }
  double mean_tf = 0.0, std_tf = 0.0;
  if (!valid_tfs.empty()) {
    mean_tf = metrics::mean(valid_tfs);
    double ss = 0.0;
    for (double v : valid_tfs) ss += (v - mean_tf) * (v - mean_tf);
    std_tf = std::sqrt(ss / static_cast<double>(valid_tfs.size()));
  }
  for (auto& [k, t] : terms) {
    const double wil = sum_weights(t.left);
    const double wir = sum_weights(t.right);
    const double pwl = wil > 0 ? static_cast<double>(t.left.size()) / wil : 0.0;
    const double pwr = wir > 0 ? static_cast<double>(t.right.size()) / wir : 0.0;
    const double rel = 1.0 + (pwl + pwr) * t.tf / max_tf;
    const double freq = (mean_tf + std_tf) > 0 ? t.tf / (mean_tf + std_tf) : 0.0;
    std::vector<std::size_t> distinct = t.sentences;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    const double spread =
        static_cast<double>(distinct.size()) / static_cast<double>(num_sentences);
    const double casing = std::max(t.tf_acronym, t.tf_proper) / (1.0 + std::log(t.tf));
    const double pos = std::log(std::log(3.0 + median(t.sentences)));
    t.h = (pos * rel) / (casing + freq / rel + spread / rel);
  }
}

struct Candidate {
  std::string key;
  std::string surface;
  std::vector<std::string> terms;
  int word_count = 0;
  double tf = 0;
  std::size_t first = 0;
  double score = 0.0;
};

double edge_weight(const std::unordered_map<std::string, TermStats>& terms,
                   const std::string& from, const std::string& to) {
  const auto& right = terms.at(from).right;
  auto it = right.find(to);
  return it == right.end() ? 0.0 : it->second;
}

double candidate_score(const Candidate& c,
                       const std::unordered_map<std::string, TermStats>& terms) {
  double prod = 1.0, sum = 0.0;
  for (std::size_t i = 0; i < c.terms.size(); ++i) {
    const TermStats& t = terms.at(c.terms[i]);
    if (!t.stop) {
      prod *= t.h;
      sum += t.h;
      continue;
    }
    double p1 = 0.0, p2 = 0.0;
    if (i > 0) {
      p1 = edge_weight(terms, c.terms[i - 1], c.terms[i]) / terms.at(c.terms[i - 1]).tf;
    }
    if (i + 1 < c.terms.size()) {
      p2 = edge_weight(terms, c.terms[i], c.terms[i + 1]) / terms.at(c.terms[i + 1]).tf;
    }
    const double prob = p1 * p2;
    prod *= 1.0 + (1.0 - prob);
    sum -= 1.0 - prob;
  }
  return prod / ((sum + 1.0) * c.tf);
}

}  // namespace

bool is_stopword(std::string_view w) { return stopwords().count(w) > 0; }

double edit_similarity(std::string_view a, std::string_view b) {
  const std::size_t longest = std::max(a.size(), b.size());
  if (longest == 0) return 1.0;
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  std::iota(prev.begin(), prev.end(), 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return 1.0 - static_cast<double>(prev[b.size()]) / static_cast<double>(longest);
}

std::vector<Keyphrase> extract_keyphrases(std::string_view doc,
                                          const KeyphraseOptions& options) {
  std::size_t num_sentences = 0;
  const auto tokens = tokenize_document(doc, num_sentences);
  if (tokens.empty() || options.top_k < 1 || options.max_ngram < 1) return {};

  std::unordered_map<std::string, TermStats> terms;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const Token& tok = tokens[i];
    TermStats& t = terms[tok.key];
    t.tf += 1;
    if (tok.tag == Tag::kAcronym) t.tf_acronym += 1;
    if (tok.tag == Tag::kProper) t.tf_proper += 1;
    t.sentences.push_back(tok.sentence);
    t.stop = tok.stop;
    if (tok.tag == Tag::kDigit || tok.tag == Tag::kUnparsable) t.valid = false;
    // Co-occurrence window of one word, inside a chunk, skipping numerics.
    if (i > 0 && tokens[i - 1].chunk == tok.chunk) {
      const Token& prev = tokens[i - 1];
      const bool usable = [](Tag g) { return g != Tag::kDigit && g != Tag::kUnparsable; }(prev.tag) &&
                          tok.tag != Tag::kDigit && tok.tag != Tag::kUnparsable;
      if (usable) {
        t.left[prev.key] += 1;
        terms[prev.key].right[tok.key] += 1;
      }
    }
  }
  score_terms(terms, num_sentences);

  std::map<std::string, Candidate> by_key;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    for (int n = 1; n <= options.max_ngram; ++n) {
      const std::size_t end = i + static_cast<std::size_t>(n);
      if (end > tokens.size()) break;
      if (tokens[end - 1].chunk != tokens[i].chunk) break;
      const Token& last = tokens[end - 1];
      if (last.tag == Tag::kDigit || last.tag == Tag::kUnparsable) break;
      if (tokens[i].stop || tokens[i].tag == Tag::kDigit ||
          tokens[i].tag == Tag::kUnparsable) break;
      if (last.stop) continue;
      std::string key, surface;
      std::vector<std::string> parts;
      for (std::size_t k = i; k < end; ++k) {
        if (k > i) {
          key += ' ';
          surface += ' ';
        }
        key += tokens[k].key;
        surface += tokens[k].surface;
        parts.push_back(tokens[k].key);
      }
      auto [it, inserted] = by_key.try_emplace(key);
      Candidate& c = it->second;
      if (inserted) {
        c.key = key;
        c.surface = surface;
        c.terms = std::move(parts);
        c.word_count = n;
        c.first = i;
      }
      c.tf += 1;
    }
  }

  std::vector<Candidate> cands;
  cands.reserve(by_key.size());
  for (auto& [k, c] : by_key) {
    c.score = candidate_score(c, terms);
    cands.push_back(std::move(c));
  }
  std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
    if (a.score != b.score) return a.score < b.score;
    if (a.first != b.first) return a.first < b.first;
    return a.key < b.key;
  });

  std::vector<Keyphrase> out;
  std::vector<const Candidate*> kept;
  for (const auto& c : cands) {
    if (static_cast<int>(out.size()) >= options.top_k) break;
    const bool dup = std::any_of(kept.begin(), kept.end(), [&](const Candidate* k) {
      return edit_similarity(c.key, k->key) >= options.dedup_threshold;
    });
    if (dup) continue;
    kept.push_back(&c);
    out.push_back({c.surface, c.score, c.word_count});
  }
  return out;
}

std::vector<Keyphrase> select_keywords(const std::vector<Keyphrase>& ranked,
                                       int total_words) {
  const double budget = kKeywordBudgetRatio * static_cast<double>(total_words);
  std::vector<Keyphrase> out;
  double used = 0.0;
  for (const auto& k : ranked) {
    if (static_cast<int>(out.size()) >= kMaxKeywords) break;
    if (used + k.word_count > budget + 1e-9) break;
    used += k.word_count;
    out.push_back(k);
  }
  return out;
}

int count_words(std::string_view text) {
  return static_cast<int>(metrics::tokenize(text).size());
}

LengthBucket length_bucket(int n) {
  LengthBucket b;
  b.lower = (n / 10) * 10;
  b.upper = (n / 10 + 1) * 10;
  b.less_than = n <= 10;
  return b;
}

AdditionalInstruction annotate_length(std::string_view reference) {
  const LengthBucket b = length_bucket(count_words(reference));
  std::string filler = b.less_than
                           ? "less than " + std::to_string(b.upper)
                           : std::to_string(b.lower) + " to " + std::to_string(b.upper);
  return AdditionalInstruction(Category::kLength, {std::move(filler)}, Source::kRule);
}

std::optional<AdditionalInstruction> annotate_keywords(std::string_view reference,
                                                       const KeyphraseOptions& options) {
  const auto ranked = extract_keyphrases(reference, options);
  const auto selected = select_keywords(ranked, count_words(reference));
  if (selected.empty()) return std::nullopt;
  std::vector<std::string> fillers;
  for (const auto& k : selected) fillers.push_back(k.text);
  return AdditionalInstruction(Category::kKeywords, std::move(fillers), Source::kRule);
}

}  // namespace ambig::rules
