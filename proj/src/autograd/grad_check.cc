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

#include "sscaf/autograd/grad_check.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "sscaf/autograd/ops.h"
#include "sscaf/common/random.h"

namespace sscaf::ag {

GradCheckReport GradCheck(const std::function<Tensor<double>()>& loss,
                          const NamedTensors<double>& tensors, const GradCheckOptions& options) {
  GradCheckReport report;
  ReluPatternProbe probe;

  for (const auto& nt : tensors) nt.tensor.node()->grad.clear();
  probe.Reset();
  loss().Backward();
  const uint64_t base_pattern = probe.hash();

  std::vector<std::vector<double>> analytic;
  for (const auto& nt : tensors) {
    const auto g = nt.tensor.grad();
    analytic.emplace_back(g.begin(), g.end());
    if (analytic.back().empty()) analytic.back().assign(nt.tensor.numel(), 0.0);
  }

  Rng rng(options.seed);
  NoGradGuard no_grad;
  for (std::size_t t = 0; t < tensors.size(); ++t) {
    Tensor<double> tensor = tensors[t].tensor;
    std::vector<std::size_t> indices(tensor.numel());
    std::iota(indices.begin(), indices.end(), 0);
    if (options.max_entries_per_tensor > 0 && indices.size() > options.max_entries_per_tensor) {
      rng.Shuffle(indices.begin(), indices.end());
      indices.resize(options.max_entries_per_tensor);
      std::sort(indices.begin(), indices.end());
    }
    auto data = tensor.mutable_data();
    for (const std::size_t i : indices) {
      const double original = data[i];
      data[i] = original + options.step;
      probe.Reset();
      const double plus = loss().item();
      const uint64_t plus_pattern = probe.hash();
      data[i] = original - options.step;
      probe.Reset();
      const double minus = loss().item();
      const uint64_t minus_pattern = probe.hash();
      data[i] = original;

      if (options.skip_relu_kinks &&
          (plus_pattern != base_pattern || minus_pattern != base_pattern)) {
        ++report.kink_skipped;
        continue;
      }
      const double numeric = (plus - minus) / (2.0 * options.step);
      const double a = analytic[t][i];
      const double denom =
          std::max({std::abs(a), std::abs(numeric), options.denominator_floor});
      const double rel = std::abs(a - numeric) / denom;
      ++report.checked;
      if (rel > report.max_rel_error || report.worst_tensor.empty()) {
        if (rel >= report.max_rel_error) {
          report.max_rel_error = rel;
          report.worst_tensor = tensors[t].name;
          report.worst_index = i;
          report.worst_analytic = a;
          report.worst_numeric = numeric;
        }
      }
    }
  }
  return report;
}

}  // namespace sscaf::ag
