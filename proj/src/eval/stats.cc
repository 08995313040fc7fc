// Copyright 2026 The sscaf Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "sscaf/eval/stats.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>

#include <boost/math/distributions/students_t.hpp>
#include <fmt/format.h>

#include "sscaf/common/error.h"

namespace sscaf::eval {

namespace {

void CheckInputs(const char* name, std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw InputError(fmt::format("{}: lengths differ ({} vs {})", name, a.size(), b.size()));
  }
  if (a.size() < 3) throw InputError(fmt::format("{}: need at least 3 pairs, got {}", name, a.size()));
}

bool IsConstant(std::span<const double> x) {
  return std::all_of(x.begin(), x.end(), [&](double v) { return v == x[0]; });
}

double PearsonR(std::span<const double> a, std::span<const double> b) {
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

double StudentTPValue(double r, std::size_t n) {
  if (std::abs(r) >= 1.0) return 0.0;
  const double df = static_cast<double>(n) - 2.0;
  const double t = r * std::sqrt(df / (1.0 - r * r));
  const boost::math::students_t dist(df);
  return std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t))));
}

// Fraction of all orderings of b whose |statistic| reaches the observed one.
double PermutationPValue(std::span<const double> a, std::span<const double> b, double observed,
                         const std::function<double(std::span<const double>, std::span<const double>)>& stat) {
  std::vector<std::size_t> perm(b.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<double> shuffled(b.size());
  std::size_t total = 0, extreme = 0;
  const double threshold = std::abs(observed) - 1e-12;
  do {
    for (std::size_t i = 0; i < perm.size(); ++i) shuffled[i] = b[perm[i]];
    ++total;
    if (std::abs(stat(a, shuffled)) >= threshold) ++extreme;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return static_cast<double>(extreme) / static_cast<double>(total);
}

struct KendallCounts {
  double tau = 0.0;
  int64_t s = 0;  // concordant minus discordant
  double variance = 0.0;
};

// Knight's algorithm: sort by (a, b), then count the exchanges a merge sort
// on b needs, which equals the number of discordant pairs.
int64_t MergeCountSwaps(std::vector<double>& v, std::vector<double>& tmp, std::size_t lo, std::size_t hi) {
  if (hi - lo < 2) return 0;
  const std::size_t mid = lo + (hi - lo) / 2;
  int64_t swaps = MergeCountSwaps(v, tmp, lo, mid) + MergeCountSwaps(v, tmp, mid, hi);
  std::size_t i = lo, j = mid, k = lo;
  while (i < mid && j < hi) {
    if (v[j] < v[i]) {
      swaps += static_cast<int64_t>(mid - i);
      tmp[k++] = v[j++];
    } else {
      tmp[k++] = v[i++];
    }
  }
  while (i < mid) tmp[k++] = v[i++];
  while (j < hi) tmp[k++] = v[j++];
  std::copy(tmp.begin() + static_cast<std::ptrdiff_t>(lo), tmp.begin() + static_cast<std::ptrdiff_t>(hi),
            v.begin() + static_cast<std::ptrdiff_t>(lo));
  return swaps;
}

struct TieSums {
  int64_t pairs = 0;     // sum t(t-1)/2
  double v0 = 0.0;       // sum t(t-1)(2t+5)
  double v1 = 0.0;       // sum t(t-1)
  double v2 = 0.0;       // sum t(t-1)(t-2)
};

TieSums SortedTies(const std::vector<double>& sorted) {
  TieSums s;
  std::size_t i = 0;
  while (i < sorted.size()) {
    std::size_t j = i + 1;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    const double t = static_cast<double>(j - i);
    s.pairs += static_cast<int64_t>((j - i) * (j - i - 1) / 2);
    s.v0 += t * (t - 1) * (2 * t + 5);
    s.v1 += t * (t - 1);
    s.v2 += t * (t - 1) * (t - 2);
    i = j;
  }
  return s;
}

KendallCounts Kendall(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = a.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return a[x] != a[y] ? a[x] < a[y] : b[x] < b[y];
  });
  std::vector<double> as(n), bs(n);
  for (std::size_t i = 0; i < n; ++i) {
    as[i] = a[order[i]];
    bs[i] = b[order[i]];
  }
  int64_t joint = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i + 1;
    while (j < n && as[j] == as[i] && bs[j] == bs[i]) ++j;
    joint += static_cast<int64_t>((j - i) * (j - i - 1) / 2);
    i = j;
  }
  const TieSums ta = SortedTies(as);
  std::vector<double> tmp(n);
  const int64_t swaps = MergeCountSwaps(bs, tmp, 0, n);
  const TieSums tb = SortedTies(bs);  // bs is now sorted

  const auto n0 = static_cast<int64_t>(n * (n - 1) / 2);
  KendallCounts out;
  out.s = n0 - ta.pairs - tb.pairs + joint - 2 * swaps;
  const double denom = std::sqrt(static_cast<double>(n0 - ta.pairs) * static_cast<double>(n0 - tb.pairs));
  out.tau = denom > 0 ? std::clamp(static_cast<double>(out.s) / denom, -1.0, 1.0) : 0.0;
  const double nd = static_cast<double>(n);
  out.variance = (nd * (nd - 1) * (2 * nd + 5) - ta.v0 - tb.v0) / 18.0 +
                 ta.v1 * tb.v1 / (2.0 * nd * (nd - 1)) +
                 ta.v2 * tb.v2 / (9.0 * nd * (nd - 1) * (nd - 2));
  return out;
}

}  // namespace

std::vector<double> AverageRanks(std::span<const double> x) {
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return x[i] < x[j]; });
  std::vector<double> ranks(x.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i + 1;
    while (j < order.size() && x[order[j]] == x[order[i]]) ++j;
    const double avg = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = avg;
    i = j;
  }
  return ranks;
}

Correlation Pearson(std::span<const double> a, std::span<const double> b) {
  CheckInputs("pearson", a, b);
  Correlation c;
  c.n = a.size();
  if (IsConstant(a) || IsConstant(b)) return c;
  c.defined = true;
  c.r = PearsonR(a, b);
  c.p = c.n < kExactPermutationBelow ? PermutationPValue(a, b, c.r, PearsonR) : StudentTPValue(c.r, c.n);
  return c;
}

Correlation Spearman(std::span<const double> a, std::span<const double> b) {
  CheckInputs("spearman", a, b);
  Correlation c;
  c.n = a.size();
  if (IsConstant(a) || IsConstant(b)) return c;
  c.defined = true;
  const auto ra = AverageRanks(a);
  const auto rb = AverageRanks(b);
  c.r = PearsonR(ra, rb);
  c.p = c.n < kExactPermutationBelow ? PermutationPValue(ra, rb, c.r, PearsonR) : StudentTPValue(c.r, c.n);
  return c;
}

Correlation KendallTau(std::span<const double> a, std::span<const double> b) {
  CheckInputs("kendall", a, b);
  Correlation c;
  c.n = a.size();
  if (IsConstant(a) || IsConstant(b)) return c;
  c.defined = true;
  const KendallCounts k = Kendall(a, b);
  c.r = k.tau;
  if (c.n < kExactPermutationBelow) {
    c.p = PermutationPValue(a, b, c.r, [](std::span<const double> x, std::span<const double> y) {
      return Kendall(x, y).tau;
    });
  } else {
    const double z = static_cast<double>(k.s) / std::sqrt(k.variance);
    c.p = std::erfc(std::abs(z) / std::sqrt(2.0));
  }
  return c;
}

}  // namespace sscaf::eval
