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

// Source/annoyance analysis and sound-level regression baselines.

#ifndef SSCAF_EVAL_ANALYSIS_H_
#define SSCAF_EVAL_ANALYSIS_H_

#include <array>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "sscaf/common/labels.h"
#include "sscaf/eval/metrics.h"
#include "sscaf/eval/stats.h"

namespace sscaf::eval {

using LabelRow = std::array<bool, kNumClasses>;

inline constexpr double kSignificanceLevel = 0.01;

struct SourceAnnoyanceRow {
  int source = 0;
  int n_low = 0;   // clips with the source and annoyance <= mu
  int n_high = 0;  // clips with the source and annoyance > mu
  int n_total = 0;
  double p_low = 0.0;   // n_low / n_total
  double p_high = 0.0;  // 1 - p_low
};

struct ProbabilitySplit {
  double mu = 0.0;  // mean annoyance of the set
  std::vector<SourceAnnoyanceRow> rows;
  // Sources that occur in no clip; they get no row.
  std::vector<int> omitted;
};

// Per-source probability that a clip containing the source is rated at most
// the set's mean annoyance. Throws InputError on empty or mismatched input.
ProbabilitySplit AnnoyanceProbabilitySplit(std::span<const LabelRow> labels, std::span<const double> annoyance);

struct Table5Row {
  int source = 0;
  // Spearman between the predicted source probability and the predicted
  // annoyance over all clips.
  Correlation model;
  SourceAnnoyanceRow split;  // from the human labels
  // Pearson between the predicted source probability and the clip level.
  Correlation level;
};

struct Table5Report {
  double mu = 0.0;
  std::vector<Table5Row> rows;
  std::vector<int> omitted;
};

// probs is flat (clips x kNumClasses). Correlations are undefined when there
// are fewer than 3 clips or either side is constant.
Table5Report MakeTable5Report(std::span<const double> probs, std::span<const double> predicted_annoyance,
                              std::span<const LabelRow> labels, std::span<const double> annoyance,
                              std::span<const double> laeq_db);

// "0.123*" with the star at p < kSignificanceLevel; "n/a" when undefined.
std::string FormatCorrelation(const Correlation& c);
std::string FormatTable5(const Table5Report& report);
void WriteTable5Csv(const Table5Report& report, const std::filesystem::path& path);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double operator()(double x) const { return slope * x + intercept; }
};

// Least squares y = slope * x + intercept. Throws InputError for fewer than
// two points and DegenerateError when all x are equal.
LinearFit FitLinear(std::span<const double> x, std::span<const double> y);

// Mean target of the k training points nearest in |x - x_train|, ties broken
// by training order. Throws InputError for an empty training set or k outside
// [1, |train|].
std::vector<double> KnnPredict(std::span<const double> train_x, std::span<const double> train_y,
                               std::span<const double> test_x, int k);

inline constexpr int kDefaultKnnNeighbours = 5;

struct LevelBaselines {
  LinearFit fit;
  ArpMetrics linear;
  ArpMetrics knn;
};

// Level-only annoyance regressors, fitted on train and scored on test.
LevelBaselines EvaluateLevelBaselines(std::span<const double> train_laeq, std::span<const double> train_annoyance,
                                      std::span<const double> test_laeq, std::span<const double> test_annoyance,
                                      int k = kDefaultKnnNeighbours);

}  // namespace sscaf::eval

#endif  // SSCAF_EVAL_ANALYSIS_H_
