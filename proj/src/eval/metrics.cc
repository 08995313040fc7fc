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

#include "sscaf/eval/metrics.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "sscaf/common/error.h"
#include "sscaf/eval/stats.h"

namespace sscaf::eval {

namespace {

void CheckFlat(std::size_t probs, std::size_t labels, int n_classes) {
  if (n_classes < 1 || probs != labels || probs % static_cast<std::size_t>(n_classes) != 0 || probs == 0) {
    throw InputError(fmt::format("ssc metrics: {} scores and {} labels do not form rows of {} classes", probs,
                                 labels, n_classes));
  }
}

std::vector<double> Column(std::span<const double> flat, int n_classes, int c) {
  std::vector<double> out;
  for (std::size_t i = c; i < flat.size(); i += n_classes) out.push_back(flat[i]);
  return out;
}

std::vector<uint8_t> Column(std::span<const uint8_t> flat, int n_classes, int c) {
  std::vector<uint8_t> out;
  for (std::size_t i = c; i < flat.size(); i += n_classes) out.push_back(flat[i]);
  return out;
}

}  // namespace

std::optional<double> RocAuc(std::span<const double> scores, std::span<const uint8_t> labels) {
  if (scores.size() != labels.size()) {
    throw InputError(fmt::format("roc_auc: {} scores but {} labels", scores.size(), labels.size()));
  }
  double positives = 0.0;
  for (const uint8_t y : labels) {
    if (y > 1) throw InputError(fmt::format("roc_auc: label {} is not 0 or 1", static_cast<int>(y)));
    positives += y;
  }
  const double negatives = static_cast<double>(labels.size()) - positives;
  if (positives == 0.0 || negatives == 0.0) return std::nullopt;
  // Mann-Whitney: the positives' rank sum counts every concordant pair once
  // and every tie half.
  const std::vector<double> ranks = AverageRanks(scores);
  double rank_sum = 0.0;
  for (std::size_t i = 0; i < ranks.size(); ++i) {
    if (labels[i]) rank_sum += ranks[i];
  }
  return (rank_sum - positives * (positives + 1.0) / 2.0) / (positives * negatives);
}

FScoreAcc ComputeFScoreAcc(std::span<const double> probs, std::span<const uint8_t> labels, int n_classes,
                           double threshold) {
  CheckFlat(probs.size(), labels.size(), n_classes);
  double f_sum = 0.0;
  std::size_t correct = 0;
  for (int c = 0; c < n_classes; ++c) {
    std::size_t tp = 0, fp = 0, fn = 0;
    for (std::size_t i = c; i < probs.size(); i += n_classes) {
      const bool pred = probs[i] >= threshold;
      const bool truth = labels[i] != 0;
      tp += pred && truth;
      fp += pred && !truth;
      fn += !pred && truth;
      correct += pred == truth;
    }
    const double precision = tp + fp > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
    const double recall = tp + fn > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
    f_sum += precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
  }
  return {100.0 * f_sum / n_classes, 100.0 * static_cast<double>(correct) / static_cast<double>(probs.size())};
}

SscMetrics ComputeSscMetrics(std::span<const double> probs, std::span<const uint8_t> labels, int n_classes,
                             double threshold) {
  CheckFlat(probs.size(), labels.size(), n_classes);
  SscMetrics m;
  double auc_sum = 0.0;
  int auc_count = 0;
  for (int c = 0; c < n_classes; ++c) {
    const auto auc = RocAuc(Column(probs, n_classes, c), Column(labels, n_classes, c));
    m.class_auc.push_back(auc);
    if (auc) {
      auc_sum += *auc;
      ++auc_count;
    } else {
      m.auc_skipped.push_back(c);
    }
  }
  m.auc = auc_count > 0 ? auc_sum / auc_count : std::numeric_limits<double>::quiet_NaN();
  const FScoreAcc fa = ComputeFScoreAcc(probs, labels, n_classes, threshold);
  m.f_score = fa.f_score;
  m.acc = fa.acc;
  return m;
}

ArpMetrics ComputeArpMetrics(std::span<const double> predicted, std::span<const double> target) {
  if (predicted.empty() || predicted.size() != target.size()) {
    throw InputError(fmt::format("arp metrics: {} predictions for {} targets", predicted.size(), target.size()));
  }
  double abs_sum = 0.0;
  double sq_sum = 0.0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const double e = predicted[i] - target[i];
    abs_sum += std::abs(e);
    sq_sum += e * e;
  }
  const double n = static_cast<double>(predicted.size());
  return {abs_sum / n, std::sqrt(sq_sum / n)};
}

double ClampAnnoyance(double y) { return std::clamp(y, kMinReportedAnnoyance, kMaxReportedAnnoyance); }

}  // namespace sscaf::eval
