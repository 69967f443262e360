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
#include <cmath>
#include <numeric>
#include <vector>

#include "ambig/error.hpp"
#include "ambig/metrics.hpp"

namespace ambig::metrics {
namespace {

struct Ranked {
  // Twice the mid-rank, so ranks stay integral.
  std::vector<long> doubled_ranks;
  std::vector<long> tie_sizes;
};

Ranked mid_ranks(const std::vector<double>& values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  Ranked r;
  r.doubled_ranks.assign(n, 0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    // Ranks i+1 .. j+1 share the mid-rank (i+j+2)/2.
    const long doubled = static_cast<long>(i + j + 2);
    for (std::size_t k = i; k <= j; ++k) r.doubled_ranks[order[k]] = doubled;
    r.tie_sizes.push_back(static_cast<long>(j - i + 1));
    i = j + 1;
  }
  return r;
}

// P(sum of n_b ranks drawn without replacement >= observed), by DP over the
// multiset of doubled ranks.
double exact_upper_tail(const std::vector<long>& doubled_ranks, std::size_t n_b,
                        long observed) {
  const long max_sum =
      std::accumulate(doubled_ranks.begin(), doubled_ranks.end(), 0L);
  std::vector<std::vector<double>> ways(
      n_b + 1, std::vector<double>(static_cast<std::size_t>(max_sum) + 1, 0.0));
  ways[0][0] = 1.0;
  for (long r : doubled_ranks) {
    for (std::size_t k = n_b; k >= 1; --k) {
      auto& dst = ways[k];
      const auto& src = ways[k - 1];
      for (long s = max_sum; s >= r; --s) {
        dst[static_cast<std::size_t>(s)] += src[static_cast<std::size_t>(s - r)];
      }
    }
  }
  double total = 0.0, tail = 0.0;
  for (long s = 0; s <= max_sum; ++s) {
    const double w = ways[n_b][static_cast<std::size_t>(s)];
    total += w;
    if (s >= observed) tail += w;
  }
  return total > 0.0 ? tail / total : 1.0;
}

}  // namespace

SignificanceResult significance_test(std::span<const double> samples_a,
                                     std::span<const double> samples_b,
                                     double alpha) {
  if (samples_a.size() < 2 || samples_b.size() < 2) {
    throw Error(ErrorCode::kTooFewSamples,
                "significance test needs at least 2 samples per side");
  }
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "alpha must lie in (0,1)");
  }
  std::vector<double> all(samples_a.begin(), samples_a.end());
  all.insert(all.end(), samples_b.begin(), samples_b.end());
  for (double v : all) {
    if (std::isnan(v)) throw Error(ErrorCode::kInvalidArgument, "NaN sample value");
  }
  const std::size_t n_a = samples_a.size();
  const std::size_t n_b = samples_b.size();
  const std::size_t n = n_a + n_b;
  const Ranked ranked = mid_ranks(all);

  long doubled_sum_b = 0;
  for (std::size_t i = n_a; i < n; ++i) doubled_sum_b += ranked.doubled_ranks[i];
  const double rank_sum_b = static_cast<double>(doubled_sum_b) / 2.0;
  const double nb = static_cast<double>(n_b);
  const double na = static_cast<double>(n_a);

  SignificanceResult r;
  r.alpha = alpha;
  r.statistic = rank_sum_b - nb * (nb + 1.0) / 2.0;

  if (n_a <= kExactMaxPerSide && n_b <= kExactMaxPerSide) {
    r.exact = true;
    r.p_value = exact_upper_tail(ranked.doubled_ranks, n_b, doubled_sum_b);
  } else {
    double tie_term = 0.0;
    for (long t : ranked.tie_sizes) {
      const double td = static_cast<double>(t);
      tie_term += td * td * td - td;
    }
    const double nd = static_cast<double>(n);
    const double var =
        na * nb / 12.0 * ((nd + 1.0) - tie_term / (nd * (nd - 1.0)));
    if (var <= 0.0) {
      r.p_value = 1.0;
    } else {
      const double z = (r.statistic - na * nb / 2.0 - 0.5) / std::sqrt(var);
      r.p_value = 0.5 * std::erfc(z / std::sqrt(2.0));
    }
  }
  r.p_value = std::clamp(r.p_value, 0.0, 1.0);
  r.significant = r.p_value < alpha;
  return r;
}

}  // namespace ambig::metrics
