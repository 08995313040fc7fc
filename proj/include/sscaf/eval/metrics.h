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

// Classification and regression metrics.
//
// Multi-label data is passed flat and row-major: probs[i * n_classes + c] is
// the score of class c on sample i and labels[...] is 0 or 1.

#ifndef SSCAF_EVAL_METRICS_H_
#define SSCAF_EVAL_METRICS_H_

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace sscaf::eval {

inline constexpr double kDecisionThreshold = 0.5;
inline constexpr double kMinReportedAnnoyance = 1.0;
inline constexpr double kMaxReportedAnnoyance = 10.0;

// Rank-based ROC-AUC: (#concordant + 0.5 * #tied) / (#pos * #neg) over all
// positive/negative pairs. nullopt when the labels have a single class.
// Throws InputError on length mismatch or non-binary labels.
std::optional<double> RocAuc(std::span<const double> scores, std::span<const uint8_t> labels);

struct SscMetrics {
  // Mean of the per-class AUCs that are defined; NaN if none is.
  double auc = 0.0;
  std::vector<std::optional<double>> class_auc;
  // Classes left out of the AUC mean because they have one label value only.
  std::vector<int> auc_skipped;
  // Macro F1 at the decision threshold, percent. A class whose precision and
  // recall are both zero or undefined contributes 0.
  double f_score = 0.0;
  // Mean per-label binary accuracy, percent.
  double acc = 0.0;
};

// A score at or above `threshold` is a positive decision.
SscMetrics ComputeSscMetrics(std::span<const double> probs, std::span<const uint8_t> labels, int n_classes,
                             double threshold = kDecisionThreshold);

struct FScoreAcc {
  double f_score = 0.0;
  double acc = 0.0;
};
FScoreAcc ComputeFScoreAcc(std::span<const double> probs, std::span<const uint8_t> labels, int n_classes,
                           double threshold = kDecisionThreshold);

struct ArpMetrics {
  double mae = 0.0;
  double rmse = 0.0;
};

// Throws InputError on empty input or a length mismatch.
ArpMetrics ComputeArpMetrics(std::span<const double> predicted, std::span<const double> target);

// Annoyance predictions are unbounded during training and clamped to the
// rating scale when reported.
double ClampAnnoyance(double y);

}  // namespace sscaf::eval

#endif  // SSCAF_EVAL_METRICS_H_
