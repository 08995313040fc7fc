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

#include <algorithm>
#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "sscaf/common/error.h"
#include "sscaf/common/random.h"
#include "sscaf/eval/stats.h"
#include "oracles.h"

namespace sscaf::eval {
namespace {

using testing::BruteKendall;
using testing::BrutePearson;
using testing::BruteRanks;
using testing::TiedSample;

bool IsConstant(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [&](double x) { return x == v[0]; });
}

TEST(RanksTest, AverageRanksMatchExhaustiveCount) {
  const std::vector<double> x = {3.0, 1.0, 3.0, 2.0, 3.0};
  EXPECT_EQ(AverageRanks(x), (std::vector<double>{4.0, 1.0, 4.0, 2.0, 4.0}));
  Rng rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const auto v = TiedSample(rng, 25, 6);
    EXPECT_EQ(AverageRanks(v), BruteRanks(v));
  }
}

TEST(SpearmanTest, IdentityAndReversal) {
  const std::vector<double> a = {0.3, -1.0, 2.5, 7.0, 4.0};
  EXPECT_DOUBLE_EQ(Spearman(a, a).r, 1.0);
  std::vector<double> rev = a;
  for (std::size_t i = 0; i < a.size(); ++i) rev[i] = -a[i];
  EXPECT_DOUBLE_EQ(Spearman(a, rev).r, -1.0);
}

TEST(SpearmanTest, FifteenPointTiedCaseMatchesRankOracle) {
  const std::vector<double> a = {1, 2, 2, 3, 5, 5, 5, 6, 7, 8, 8, 9, 10, 11, 12};
  const std::vector<double> b = {2, 1, 4, 4, 3, 6, 6, 5, 9, 7, 8, 8, 12, 10, 11};
  const Correlation c = Spearman(a, b);
  EXPECT_TRUE(c.defined);
  EXPECT_EQ(c.n, 15u);
  EXPECT_NEAR(c.r, BrutePearson(BruteRanks(a), BruteRanks(b)), 1e-12);
}

TEST(RankCorrelationTest, RandomTiedInstancesMatchOracles) {
  Rng rng(2024);
  int compared = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const int n = rng.UniformInt(3, 30);
    const auto a = TiedSample(rng, n, rng.UniformInt(2, 8));
    const auto b = TiedSample(rng, n, rng.UniformInt(2, 8));
    const Correlation s = Spearman(a, b);
    const Correlation k = KendallTau(a, b);
    if (IsConstant(a) || IsConstant(b)) {
      EXPECT_FALSE(s.defined);
      EXPECT_FALSE(k.defined);
      continue;
    }
    ++compared;
    EXPECT_NEAR(s.r, BrutePearson(BruteRanks(a), BruteRanks(b)), 1e-12) << "trial " << trial;
    EXPECT_NEAR(k.r, BruteKendall(a, b), 1e-12) << "trial " << trial;
    EXPECT_GE(s.p, 0.0);
    EXPECT_LE(s.p, 1.0);
    EXPECT_GE(k.p, 0.0);
    EXPECT_LE(k.p, 1.0);
  }
  EXPECT_GE(compared, 45);
}

TEST(RankCorrelationTest, SymmetricAndInvariantUnderMonotoneMaps) {
  Rng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = TiedSample(rng, 20, 7);
    const auto b = TiedSample(rng, 20, 5);
    std::vector<double> fa(a.size());
    std::vector<double> gb(b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      fa[i] = std::exp(3.0 * a[i]) + 5.0;
      gb[i] = b[i] * b[i] * b[i] - 2.0;
    }
    EXPECT_EQ(Spearman(a, b).r, Spearman(b, a).r);
    EXPECT_NEAR(Spearman(fa, gb).r, Spearman(a, b).r, 1e-12);
    EXPECT_NEAR(KendallTau(fa, gb).r, KendallTau(a, b).r, 1e-12);
    EXPECT_NEAR(KendallTau(b, a).r, KendallTau(a, b).r, 1e-12);
  }
}

TEST(KendallTest, IdentityAndOneDiscordantPair) {
  const std::vector<double> a = {1, 2, 3, 4};
  EXPECT_DOUBLE_EQ(KendallTau(a, a).r, 1.0);
  // Swapping the last two items makes exactly one of the six pairs discordant.
  const std::vector<double> b = {1, 2, 4, 3};
  EXPECT_NEAR(KendallTau(a, b).r, 2.0 / 3.0, 1e-15);
}

TEST(CorrelationTest, ErrorsAndUndefinedMarker) {
  const std::vector<double> a = {1, 2};
  EXPECT_THROW(Spearman(a, a), InputError);
  const std::vector<double> b = {1, 2, 3};
  const std::vector<double> c = {1, 2, 3, 4};
  EXPECT_THROW(KendallTau(b, c), InputError);
  EXPECT_THROW(Pearson(b, c), InputError);
  const std::vector<double> flat = {2, 2, 2};
  EXPECT_FALSE(Spearman(b, flat).defined);
  EXPECT_FALSE(KendallTau(flat, b).defined);
  EXPECT_FALSE(Pearson(b, flat).defined);
}

TEST(CorrelationTest, PValues) {
  // Exact permutation test for small n: only the identity and the reversal
  // reach |rho| = 1 among the 24 orderings of 4 items.
  const std::vector<double> a = {1, 2, 3, 4};
  EXPECT_NEAR(Spearman(a, a).p, 2.0 / 24.0, 1e-12);
  EXPECT_NEAR(KendallTau(a, a).p, 2.0 / 24.0, 1e-12);
  // Large-sample: r = 0.5 at n = 20 gives t = 2.449 on 18 degrees of freedom.
  Rng rng(1);
  std::vector<double> x(20), y(20);
  for (int i = 0; i < 20; ++i) x[i] = rng.Normal();
  // y = 0.5 x + sqrt(0.75) z with z orthogonalised against x gives r = 0.5.
  std::vector<double> z(20);
  for (int i = 0; i < 20; ++i) z[i] = rng.Normal();
  double mx = 0, mz = 0;
  for (int i = 0; i < 20; ++i) {
    mx += x[i] / 20;
    mz += z[i] / 20;
  }
  double sxz = 0, sxx = 0;
  for (int i = 0; i < 20; ++i) {
    sxz += (x[i] - mx) * (z[i] - mz);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  double szz = 0;
  for (int i = 0; i < 20; ++i) {
    z[i] = z[i] - mz - sxz / sxx * (x[i] - mx);
    szz += z[i] * z[i];
  }
  for (int i = 0; i < 20; ++i) {
    y[i] = 0.5 * (x[i] - mx) / std::sqrt(sxx) + std::sqrt(0.75) * z[i] / std::sqrt(szz);
  }
  const Correlation c = Pearson(x, y);
  EXPECT_NEAR(c.r, 0.5, 1e-12);
  EXPECT_NEAR(c.p, 0.02477, 5e-5);
  // Perfect correlation is maximally significant.
  EXPECT_LT(Pearson(x, x).p, 1e-12);
}

}  // namespace
}  // namespace sscaf::eval
