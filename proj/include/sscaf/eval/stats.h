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

// Correlation statistics with two-sided p-values.
//
// p-values use the usual large-sample approximations (Student t for Pearson
// and Spearman, normal with tie-corrected variance for Kendall) and switch to
// an exact permutation test below kExactPermutationBelow observations.

#ifndef SSCAF_EVAL_STATS_H_
#define SSCAF_EVAL_STATS_H_

#include <cstddef>
#include <span>
#include <vector>

namespace sscaf::eval {

inline constexpr std::size_t kExactPermutationBelow = 10;

struct Correlation {
  double r = 0.0;
  double p = 1.0;
  std::size_t n = 0;
  // False when either input is constant, so the statistic is undefined.
  bool defined = false;
};

// 1-based ranks with ties replaced by their average rank.
std::vector<double> AverageRanks(std::span<const double> x);

// All three throw InputError if the lengths differ or are below 3.
Correlation Pearson(std::span<const double> a, std::span<const double> b);
Correlation Spearman(std::span<const double> a, std::span<const double> b);
// Tau-b, computed in O(n log n).
Correlation KendallTau(std::span<const double> a, std::span<const double> b);

}  // namespace sscaf::eval

#endif  // SSCAF_EVAL_STATS_H_
