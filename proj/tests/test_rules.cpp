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

#include <doctest.h>

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "ambig/metrics.hpp"
#include "ambig/rule_annotators.hpp"

using namespace ambig;
using namespace ambig::rules;

namespace {

std::string words(int n) {
  std::string out;
  for (int i = 0; i < n; ++i) out += (i ? " w" : "w") + std::to_string(i);
  return out;
}

// Random prose-like text with stopwords, capitals, numbers and punctuation.
std::string random_text(std::mt19937& rng) {
  static const std::vector<std::string> vocab = {
      "the", "of", "and", "a", "to", "in", "is", "solar", "panel", "energy", "grid",
      "Council", "bike", "lane", "coral", "reef", "ocean", "warming", "NASA", "2026",
      "data", "model", "text", "keeper", "cat", "storm", "it's", "state-of-the-art", "caf\xc3\xa9"};
  static const std::vector<std::string> punct = {" ", " ", " ", " ", ", ", ". ", "; ", " - "};
  std::uniform_int_distribution<int> len(1, 80);
  std::uniform_int_distribution<std::size_t> w(0, vocab.size() - 1), p(0, punct.size() - 1);
  std::string out;
  const int n = len(rng);
  for (int i = 0; i < n; ++i) {
    out += vocab[w(rng)];
    out += punct[p(rng)];
  }
  return out;
}

}  // namespace

TEST_CASE("length buckets") {
  CHECK(annotate_length(words(7)).text() == "Answer with less than 10 words.");
  CHECK(annotate_length(words(10)).text() == "Answer with less than 20 words.");
  CHECK(annotate_length(words(34)).text() == "Answer with 30 to 40 words.");
  CHECK(annotate_length(words(99)).text() == "Answer with 90 to 100 words.");
  CHECK(annotate_length(words(11)).text() == "Answer with 10 to 20 words.");
  CHECK(annotate_length("").text() == "Answer with less than 10 words.");
  CHECK(annotate_length(words(7)).source() == Source::kRule);
  for (int n = 11; n < 500; ++n) {
    const auto b = length_bucket(n);
    CHECK(b.lower <= n);
    CHECK(n < b.upper);
    CHECK(b.upper - b.lower == 10);
    CHECK(b.lower % 10 == 0);
  }
}

TEST_CASE("keyword selection respects the budget on random inputs") {
  std::mt19937 rng(99);
  int produced = 0;
  for (int i = 0; i < 300; ++i) {
    const std::string text = random_text(rng);
    const auto kw = annotate_keywords(text);
    if (!kw) continue;
    ++produced;
    const int total = count_words(text);
    int used = 0;
    CHECK(kw->fillers().size() <= static_cast<std::size_t>(kMaxKeywords));
    for (const auto& f : kw->fillers()) used += count_words(f);
    CHECK(used <= kKeywordBudgetRatio * total + 1e-9);
    CHECK(extract_fillers(Category::kKeywords, kw->text()) == kw->fillers());
  }
  CHECK(produced > 100);
}

TEST_CASE("select_keywords stops at the cap or the budget") {
  std::vector<Keyphrase> ranked;
  for (int i = 0; i < 10; ++i) ranked.push_back({"k" + std::to_string(i), 0.1 * i, 1});
  CHECK(select_keywords(ranked, 100).size() == 4);
  CHECK(select_keywords(ranked, 5).size() == 2);
  CHECK(select_keywords(ranked, 2).empty());
  ranked[0].word_count = 3;
  CHECK(select_keywords(ranked, 10).size() == 2);
  CHECK(select_keywords(ranked, 9).size() == 1);
}

TEST_CASE("keyphrase extraction") {
  const std::string doc =
      "Coral reefs are threatened by rising ocean temperatures. Rising ocean temperatures "
      "cause coral bleaching. Coral bleaching reduces biodiversity.";
  const auto ranked = extract_keyphrases(doc);
  REQUIRE_FALSE(ranked.empty());
  for (std::size_t i = 1; i < ranked.size(); ++i) CHECK(ranked[i - 1].score <= ranked[i].score);
  for (const auto& k : ranked) {
    CHECK(k.word_count >= 1);
    CHECK(k.word_count <= 3);
    const auto toks = metrics::tokenize(k.text);
    REQUIRE_FALSE(toks.empty());
    CHECK_FALSE(is_stopword(toks.front()));
    CHECK_FALSE(is_stopword(toks.back()));
    CHECK(doc.find(k.text) != std::string::npos);
  }
  // Repeated content words outrank one-off ones.
  bool found = false;
  for (std::size_t i = 0; i < std::min<std::size_t>(5, ranked.size()); ++i) {
    found = found || ranked[i].text.find("oral") != std::string::npos ||
            ranked[i].text.find("ocean") != std::string::npos;
  }
  CHECK(found);
  CHECK(extract_keyphrases(doc) .size() == ranked.size());
  CHECK(extract_keyphrases("").empty());
  CHECK(extract_keyphrases("the of and").empty());
}

TEST_CASE("rule annotator fixtures") {
  KeyphraseOptions one;
  one.max_ngram = 1;
  one.top_k = 2;
  const auto freq = extract_keyphrases("aaa aaa aaa bbb", one);
  REQUIRE_FALSE(freq.empty());
  CHECK(freq.front().text == "aaa");

  KeyphraseOptions two;
  two.max_ngram = 2;
  const auto cc = extract_keyphrases(
      "Climate change affects farming. Experts say climate change raises costs. Farmers "
      "adapt to climate change slowly.",
      two);
  CHECK(std::any_of(cc.begin(), cc.end(), [](const Keyphrase& k) {
    return metrics::tokenize(k.text) == metrics::TokenSeq{"climate", "change"};
  }));

  auto counts = [](std::vector<int> c) {
    std::vector<Keyphrase> out;
    for (std::size_t i = 0; i < c.size(); ++i) out.push_back({"p" + std::to_string(i), 0.0, c[i]});
    return out;
  };
  CHECK(select_keywords(counts({2, 3, 1, 2}), 20).size() == 4);
  CHECK(select_keywords(counts({5, 1}), 10).empty());
  CHECK(select_keywords(counts({1, 1, 1, 1, 1}), 100).size() == 4);

  CHECK(count_words("one two three") == 3);
  CHECK(count_words("") == 0);
  CHECK(count_words("Don't stop; believing.") == 4);

  const auto gw = annotate_keywords(
      "Global warming is accelerating. Scientists link global warming to emissions, and "
      "global warming threatens coastal cities across the world today.");
  REQUIRE(gw.has_value());
  CHECK(gw->fillers().front() == "Global warming");
  CHECK_FALSE(annotate_keywords("").has_value());
  CHECK(render_template(Category::kKeywords, {"solar power", "grid storage"}) ==
        "Include solar power, grid storage in your response.");
}

TEST_CASE("emitted keyphrases are contiguous token runs of the reference") {
  std::mt19937 rng(4);
  for (int i = 0; i < 200; ++i) {
    const std::string text = random_text(rng);
    const auto kw = annotate_keywords(text);
    if (!kw) continue;
    const auto ref = metrics::tokenize(text);
    for (const auto& f : kw->fillers()) {
      const auto ph = metrics::tokenize(f);
      REQUIRE_FALSE(ph.empty());
      CHECK(std::search(ref.begin(), ref.end(), ph.begin(), ph.end()) != ref.end());
    }
  }
}

TEST_CASE("edit similarity") {
  CHECK(edit_similarity("abc", "abc") == doctest::Approx(1.0));
  CHECK(edit_similarity("abc", "xyz") == doctest::Approx(0.0));
  CHECK(edit_similarity("kitten", "sitting") == doctest::Approx(1.0 - 3.0 / 7.0));
}
