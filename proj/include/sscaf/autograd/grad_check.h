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

#ifndef SSCAF_AUTOGRAD_GRAD_CHECK_H_
#define SSCAF_AUTOGRAD_GRAD_CHECK_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>

#include "sscaf/autograd/layers.h"
#include "sscaf/autograd/tensor.h"

namespace sscaf::ag {

struct GradCheckOptions {
  double step = 1e-5;
  // 0 checks every entry; otherwise a seeded sample of this many entries per
  // tensor (every tensor is always visited).
  std::size_t max_entries_per_tensor = 0;
  uint64_t seed = 0;
  // Relative error is |a - n| / max(|a|, |n|, denominator_floor).
  double denominator_floor = 1e-6;
  // Entries whose stencil changes any ReLU activation pattern are counted in
  // `kink_skipped` instead of being compared.
  bool skip_relu_kinks = true;
};

struct GradCheckReport {
  double max_rel_error = 0.0;
  std::string worst_tensor;
  std::size_t worst_index = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  std::size_t checked = 0;
  std::size_t kink_skipped = 0;
};

// Compares reverse-mode gradients of the scalar `loss` against central
// differences for the listed tensors. `loss` must be a pure function of the
// tensors' current values.
GradCheckReport GradCheck(const std::function<Tensor<double>()>& loss,
                          const NamedTensors<double>& tensors,
                          const GradCheckOptions& options = {});

}  // namespace sscaf::ag

#endif  // SSCAF_AUTOGRAD_GRAD_CHECK_H_
