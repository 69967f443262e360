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
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "ambig/error.hpp"
#include "ambig/metrics.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace ambig;
using namespace ambig::metrics;
using testing::error_code_of;

namespace {

TokenSeq random_tokens(std::mt19937& rng, std::size_t max_len, int vocab) {
  std::uniform_int_distribution<std::size_t> len(0, max_len);
  std::uniform_int_distribution<int> word(0, vocab - 1);
  TokenSeq out(len(rng));
  for (auto& t : out) t = "w" + std::to_string(word(rng));
  return out;
}

}  // namespace

TEST_CASE("tokenizer lowercases and splits on punctuation") {
  CHECK(tokenize("Hello, World! It's 2026.") ==
        TokenSeq{"hello", "world", "it", "s", "2026"});
  CHECK(tokenize("  ").empty());
  CHECK(tokenize("caf\xc3\xa9 ok") == TokenSeq{"caf\xc3\xa9", "ok"});
}

TEST_CASE("ROUGE-L agrees with a brute-force LCS") {
  std::mt19937 rng(11);
  for (int i = 0; i < 500; ++i) {
    const auto a = random_tokens(rng, 12, 5);
    const auto b = random_tokens(rng, 12, 5);
    const auto lcs = oracle::brute_lcs(a, b);
    CHECK(lcs_length(a, b) == lcs);
    CHECK(rouge_l(a, b).f1 == doctest::Approx(oracle::f1_from_lcs(lcs, a.size(), b.size())));
  }
}

TEST_CASE("ROUGE-L fixed cases") {
  CHECK(rouge_l("police killed the gunman", "police kill the gunman").f1 ==
        doctest::Approx(0.75).epsilon(1e-12));
  const auto s = rouge_l("the cat", "the cat sat down");
  CHECK(s.precision == doctest::Approx(1.0));
  CHECK(s.recall == doctest::Approx(0.5));
  CHECK(rouge_l("", "anything").f1 == 0.0);
  CHECK(rouge_l("x", "y").f1 == 0.0);
}

TEST_CASE("Intra-RL") {
  CHECK(intra_rl({"same words here", "same words here", "same words here"}) ==
        doctest::Approx(1.0));
  CHECK(intra_rl({"a b", "a b", "c d"}) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  std::vector<std::string> s = {"one two three", "two three four", "five one", "three"};
  const double base = intra_rl(s);
  std::mt19937 rng(3);
  for (int i = 0; i < 20; ++i) {
    std::shuffle(s.begin(), s.end(), rng);
    CHECK(intra_rl(s) == doctest::Approx(base).epsilon(1e-12));
  }
  CHECK(error_code_of([] { intra_rl({"only"}); }) == ErrorCode::kTooFewSamples);
}

TEST_CASE("RL@N takes the best candidate") {
  CHECK(rl_at_n({"nothing", "police kill the gunman"}, "police killed the gunman") ==
        doctest::Approx(0.75));
  CHECK(error_code_of([] { rl_at_n({}, "x"); }) == ErrorCode::kEmptyCandidates);
}

TEST_CASE("classification metrics on a hand-counted fixture") {
  using C = Category;
  const std::vector<CategorySet> gold = {{C::kContext, C::kLength}, {}, {C::kTheme}};
  const std::vector<CategorySet> pred = {{C::kContext}, {C::kStyle}, {C::kTheme}};
  const auto r = classification_metrics(pred, gold);
  CHECK(r.exact_match == doctest::Approx(1.0 / 3.0));
  const auto& len = r.per_category[index_of(C::kLength)];
  CHECK(len.confusion.fn == 1);
  CHECK(len.confusion.tn == 2);
  CHECK(*len.tpr == 0.0);
  const auto& style = r.per_category[index_of(C::kStyle)];
  CHECK(style.confusion.fp == 1);
  CHECK_FALSE(style.tpr.has_value());
  CHECK(*style.tnr == doctest::Approx(2.0 / 3.0));
  CHECK_FALSE(r.per_category[index_of(C::kKeywords)].tpr.has_value());
  CHECK(*r.macro_tpr == doctest::Approx(2.0 / 3.0));
  CHECK(*r.macro_tnr == doctest::Approx(17.0 / 18.0));
  CHECK(r.macro_accuracy == doctest::Approx(8.0 / 9.0));
  CHECK(error_code_of([&] { classification_metrics(pred, {{}}); }) == ErrorCode::kLengthMismatch);
}

TEST_CASE("exact significance on disjoint 5-vs-5 samples") {
  const std::vector<double> a = {0.1, 0.2, 0.3, 0.4, 0.5};
  const std::vector<double> b = {0.6, 0.7, 0.8, 0.9, 1.0};
  const auto r = significance_test(a, b);
  CHECK(r.exact);
  CHECK(r.statistic == 25.0);
  CHECK(r.p_value == doctest::Approx(1.0 / 252.0).epsilon(1e-12));
  CHECK(r.significant);
  const auto reversed = significance_test(b, a);
  CHECK(reversed.p_value == doctest::Approx(1.0));
  CHECK_FALSE(reversed.significant);
}

TEST_CASE("exact p-values match a permutation oracle, ties included") {
  std::mt19937 rng(5);
  std::uniform_int_distribution<int> v(0, 6);
  std::uniform_int_distribution<int> sz(2, 7);
  for (int trial = 0; trial < 60; ++trial) {
    std::vector<double> a(static_cast<std::size_t>(sz(rng))), b(static_cast<std::size_t>(sz(rng)));
    for (auto& x : a) x = v(rng) / 6.0;
    for (auto& x : b) x = v(rng) / 6.0;
    const auto r = significance_test(a, b);
    REQUIRE(r.exact);
    CHECK(r.statistic == doctest::Approx(oracle::pair_u(a, b)));
    CHECK(r.p_value == doctest::Approx(oracle::permutation_p(a, b)).epsilon(1e-9));
  }
}

TEST_CASE("normal approximation is calibrated under the null") {
  std::mt19937 rng(2026);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int rejections = 0;
  const int trials = 300;
  for (int t = 0; t < trials; ++t) {
    std::vector<double> a(20), b(20);
    for (auto& x : a) x = u(rng);
    for (auto& x : b) x = u(rng);
    const auto r = significance_test(a, b);
    CHECK_FALSE(r.exact);
    rejections += r.significant ? 1 : 0;
  }
  CHECK(static_cast<double>(rejections) / trials <= 0.08);
}

TEST_CASE("significance input checks") {
  const std::vector<double> one = {1.0}, two = {1.0, 2.0};
  CHECK(error_code_of([&] { significance_test(one, two); }) == ErrorCode::kTooFewSamples);
  CHECK(error_code_of([&] { significance_test(two, two, 1.5); }) == ErrorCode::kInvalidArgument);
  const std::vector<double> same = {0.5, 0.5, 0.5};
  CHECK(significance_test(same, same).p_value == doctest::Approx(1.0));
}

TEST_CASE("metric fixtures") {
  CHECK(tokenize("The cat sat.") == TokenSeq{"the", "cat", "sat"});
  CHECK(tokenize("").empty());
  CHECK(tokenize("state-of-the-art NLG!") == TokenSeq{"state", "of", "the", "art", "nlg"});
  CHECK(rouge_l("the cat sat", "the cat sat").f1 == doctest::Approx(1.0));
  const auto s = rouge_l("police killed the gunman", "police kill the gunman");
  CHECK(s.precision == doctest::Approx(0.75));
  CHECK(s.recall == doctest::Approx(0.75));
  CHECK(rouge_l("alpha beta", "gamma delta").f1 == 0.0);
  CHECK(intra_rl({"a b c", "a b c", "a b c"}) == doctest::Approx(1.0));
  CHECK(intra_rl({"alpha beta", "gamma delta"}) == 0.0);
  CHECK(intra_rl({"a b", "a b", "x y"}) == doctest::Approx(1.0 / 3.0));
  CHECK(rl_at_n({"a b", "the cat sat"}, "the cat sat") == doctest::Approx(1.0));
  CHECK(rl_at_n({"alpha"}, "beta") == 0.0);
  CHECK(rl_at_n({"police killed the gunman", "foo"}, "police kill the gunman") ==
        doctest::Approx(0.75));
}

TEST_CASE("classification fixtures") {
  using C = Category;
  std::vector<CategorySet> gold;
  for (int i = 0; i < 10; ++i) {
    CategorySet s;
    for (C c : kAllCategories) {
      if ((i + static_cast<int>(index_of(c))) % 3 == 0) s.insert(c);
    }
    gold.push_back(s);
  }
  const auto perfect = classification_metrics(gold, gold);
  CHECK(perfect.exact_match == 1.0);
  CHECK(*perfect.macro_tpr == 1.0);
  CHECK(*perfect.macro_tnr == 1.0);
  CHECK(perfect.macro_accuracy == 1.0);

  const CategorySet all(kAllCategories.begin(), kAllCategories.end());
  const auto everything = classification_metrics(std::vector<CategorySet>(10, all), gold);
  for (const auto& m : everything.per_category) {
    CHECK(*m.tpr == 1.0);
    CHECK(*m.tnr == 0.0);
  }

  const auto r = classification_metrics({{C::kTheme}, {C::kTheme}, {C::kKeywords}},
                                        {{C::kTheme}, {}, {C::kKeywords, C::kTheme}});
  CHECK(r.exact_match == doctest::Approx(1.0 / 3.0));
  const auto& theme = r.per_category[index_of(C::kTheme)].confusion;
  CHECK(theme.tp == 1);
  CHECK(theme.fp == 1);
  CHECK(theme.fn == 1);
  CHECK(theme.tn == 0);
}

TEST_CASE("significance fixtures") {
  const std::vector<double> x = {0.2, 0.4, 0.4, 0.9};
  CHECK_FALSE(significance_test(x, x).significant);
  const std::vector<double> a(5, 0.1), b(5, 0.9);
  const auto r = significance_test(a, b);
  CHECK(r.p_value == doctest::Approx(1.0 / 252.0).epsilon(1e-12));
  CHECK(r.significant);
}
