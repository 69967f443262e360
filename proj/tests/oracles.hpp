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

// Independent reference implementations used to check the library.

#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace oracle {

using Tokens = std::vector<std::string>;

// Longest common subsequence by enumerating every subsequence of the shorter
// sequence. Exponential; only for short inputs.
inline std::size_t brute_lcs(const Tokens& x, const Tokens& y) {
  const Tokens& a = x.size() <= y.size() ? x : y;
  const Tokens& b = x.size() <= y.size() ? y : x;
  std::size_t best = 0;
  const std::uint32_t masks = 1u << a.size();
  for (std::uint32_t m = 0; m < masks; ++m) {
    const auto k = static_cast<std::size_t>(std::popcount(m));
    if (k <= best) continue;
    std::size_t j = 0;
    bool ok = true;
    for (std::size_t i = 0; i < a.size() && ok; ++i) {
      if (!(m & (1u << i))) continue;
      while (j < b.size() && b[j] != a[i]) ++j;
      if (j == b.size()) ok = false;
      else ++j;
    }
    if (ok) best = k;
  }
  return best;
}

inline double f1_from_lcs(std::size_t lcs, std::size_t cand, std::size_t ref) {
  if (lcs == 0 || cand == 0 || ref == 0) return 0.0;
  const double p = static_cast<double>(lcs) / static_cast<double>(cand);
  const double r = static_cast<double>(lcs) / static_cast<double>(ref);
  return 2.0 * p * r / (p + r);
}

// Mann-Whitney U of `b` against `a` by direct pair counting; ties count half.
inline double pair_u(const std::vector<double>& a, const std::vector<double>& b) {
  double u = 0.0;
  for (double y : b) {
    for (double x : a) u += y > x ? 1.0 : (y == x ? 0.5 : 0.0);
  }
  return u;
}

// One-sided permutation p-value P(U_b >= observed) over every relabelling of
// the pooled values into groups of the original sizes.
inline double permutation_p(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> pool(a);
  pool.insert(pool.end(), b.begin(), b.end());
  const double observed = pair_u(a, b);
  const std::size_t n = pool.size();
  const std::size_t k = b.size();
  std::vector<bool> pick(n, false);
  std::fill(pick.end() - static_cast<std::ptrdiff_t>(k), pick.end(), true);
  std::size_t total = 0, tail = 0;
  do {
    std::vector<double> ga, gb;
    for (std::size_t i = 0; i < n; ++i) (pick[i] ? gb : ga).push_back(pool[i]);
    ++total;
    if (pair_u(ga, gb) >= observed - 1e-9) ++tail;
  } while (std::next_permutation(pick.begin(), pick.end()));
  return static_cast<double>(tail) / static_cast<double>(total);
}

}  // namespace oracle
