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

#include "sscaf/eval/analysis.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include <fmt/format.h>

#include "sscaf/common/error.h"

namespace sscaf::eval {

namespace {

void CheckSameSize(const char* what, std::size_t a, std::size_t b) {
  if (a != b) throw InputError(fmt::format("{}: length mismatch ({} vs {})", what, a, b));
}

Correlation SafeCorrelation(Correlation (*fn)(std::span<const double>, std::span<const double>),
                            std::span<const double> a, std::span<const double> b) {
  if (a.size() < 3) return Correlation{0.0, 1.0, a.size(), false};
  return fn(a, b);
}

std::string PValue(const Correlation& c) { return c.defined ? fmt::format("{:.6g}", c.p) : ""; }
std::string RValue(const Correlation& c) { return c.defined ? fmt::format("{:.6f}", c.r) : ""; }

}  // namespace

ProbabilitySplit AnnoyanceProbabilitySplit(std::span<const LabelRow> labels, std::span<const double> annoyance) {
  if (labels.empty()) throw InputError("probability split: empty set");
  CheckSameSize("probability split", labels.size(), annoyance.size());
  ProbabilitySplit split;
  split.mu = std::accumulate(annoyance.begin(), annoyance.end(), 0.0) / static_cast<double>(annoyance.size());
  for (int s = 0; s < kNumClasses; ++s) {
    SourceAnnoyanceRow row;
    row.source = s;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (!labels[i][s]) continue;
      (annoyance[i] <= split.mu ? row.n_low : row.n_high) += 1;
    }
    row.n_total = row.n_low + row.n_high;
    if (row.n_total == 0) {
      split.omitted.push_back(s);
      continue;
    }
    row.p_low = static_cast<double>(row.n_low) / row.n_total;
    row.p_high = 1.0 - row.p_low;
    split.rows.push_back(row);
  }
  return split;
}

Table5Report MakeTable5Report(std::span<const double> probs, std::span<const double> predicted_annoyance,
                              std::span<const LabelRow> labels, std::span<const double> annoyance,
                              std::span<const double> laeq_db) {
  const std::size_t n = labels.size();
  CheckSameSize("table report probabilities", probs.size(), n * kNumClasses);
  CheckSameSize("table report predictions", predicted_annoyance.size(), n);
  CheckSameSize("table report levels", laeq_db.size(), n);
  const ProbabilitySplit split = AnnoyanceProbabilitySplit(labels, annoyance);
  Table5Report report;
  report.mu = split.mu;
  report.omitted = split.omitted;
  for (const SourceAnnoyanceRow& s : split.rows) {
    std::vector<double> p(n);
    for (std::size_t i = 0; i < n; ++i) p[i] = probs[i * kNumClasses + s.source];
    Table5Row row;
    row.source = s.source;
    row.split = s;
    row.model = SafeCorrelation(&Spearman, p, predicted_annoyance);
    row.level = SafeCorrelation(&Pearson, p, laeq_db);
    report.rows.push_back(row);
  }
  return report;
}

std::string FormatCorrelation(const Correlation& c) {
  if (!c.defined) return "n/a";
  return fmt::format("{:.3f}{}", c.r, c.p < kSignificanceLevel ? "*" : "");
}

std::string FormatTable5(const Table5Report& report) {
  std::string out = fmt::format("mean annoyance mu = {:.3f}\n", report.mu);
  out += fmt::format("{:<18} {:>9} {:>7} {:>7} {:>5} {:>9}\n", "Source", "Model r", "P(<=mu)", "P(>mu)", "N",
                     "Level r");
  for (const Table5Row& row : report.rows) {
    out += fmt::format("{:<18} {:>9} {:>7.3f} {:>7.3f} {:>5} {:>9}\n", kClassDisplayNames[row.source],
                       FormatCorrelation(row.model), row.split.p_low, row.split.p_high, row.split.n_total,
                       FormatCorrelation(row.level));
  }
  out += fmt::format("* p < {}\n", kSignificanceLevel);
  if (!report.omitted.empty()) {
    std::string names;
    for (const int s : report.omitted) names += (names.empty() ? "" : ", ") + std::string(kClassNames[s]);
    out += fmt::format("omitted (absent from every clip): {}\n", names);
  }
  return out;
}

void WriteTable5Csv(const Table5Report& report, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError(fmt::format("cannot write '{}'", path.string()));
  out << "source,model_r,model_p,n_low,n_high,n_total,p_low,p_high,level_r,level_p\n";
  for (const Table5Row& row : report.rows) {
    out << fmt::format("{},{},{},{},{},{},{:.6f},{:.6f},{},{}\n", kClassNames[row.source], RValue(row.model),
                       PValue(row.model), row.split.n_low, row.split.n_high, row.split.n_total, row.split.p_low,
                       row.split.p_high, RValue(row.level), PValue(row.level));
  }
  if (!out) throw IoError(fmt::format("error writing '{}'", path.string()));
}

LinearFit FitLinear(std::span<const double> x, std::span<const double> y) {
  CheckSameSize("linear fit", x.size(), y.size());
  if (x.size() < 2) throw InputError("linear fit: needs at least two points");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw DegenerateError("linear fit: all levels are equal");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  return fit;
}

std::vector<double> KnnPredict(std::span<const double> train_x, std::span<const double> train_y,
                               std::span<const double> test_x, int k) {
  CheckSameSize("knn", train_x.size(), train_y.size());
  if (train_x.empty()) throw InputError("knn: empty training set");
  if (k < 1 || static_cast<std::size_t>(k) > train_x.size()) {
    throw InputError(fmt::format("knn: k = {} outside [1, {}]", k, train_x.size()));
  }
  std::vector<double> out;
  std::vector<std::size_t> order(train_x.size());
  for (const double q : test_x) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return std::abs(train_x[a] - q) < std::abs(train_x[b] - q);
    });
    double sum = 0.0;
    for (int i = 0; i < k; ++i) sum += train_y[order[i]];
    out.push_back(sum / k);
  }
  return out;
}

LevelBaselines EvaluateLevelBaselines(std::span<const double> train_laeq, std::span<const double> train_annoyance,
                                      std::span<const double> test_laeq, std::span<const double> test_annoyance,
                                      int k) {
  LevelBaselines b;
  b.fit = FitLinear(train_laeq, train_annoyance);
  std::vector<double> linear;
  for (const double x : test_laeq) linear.push_back(b.fit(x));
  b.linear = ComputeArpMetrics(linear, test_annoyance);
  b.knn = ComputeArpMetrics(KnnPredict(train_laeq, train_annoyance, test_laeq, k), test_annoyance);
  return b;
}

}  // namespace sscaf::eval
