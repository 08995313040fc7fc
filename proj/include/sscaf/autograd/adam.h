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

#ifndef SSCAF_AUTOGRAD_ADAM_H_
#define SSCAF_AUTOGRAD_ADAM_H_

#include <cstdint>
#include <vector>

#include "sscaf/autograd/tensor.h"

namespace sscaf::ag {

struct AdamOptions {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Bias-corrected Adam. Parameters without a gradient are treated as having a
// zero gradient.
template <typename T>
class Adam {
 public:
  Adam(std::vector<Tensor<T>> params, AdamOptions options = {});

  // Throws NumericError, leaving every parameter and moment untouched, if any
  // gradient is non-finite.
  void Step();
  void ZeroGrad();

  int64_t step_count() const { return step_; }
  const AdamOptions& options() const { return options_; }
  const std::vector<T>& first_moment(std::size_t i) const { return m_[i]; }
  const std::vector<T>& second_moment(std::size_t i) const { return v_[i]; }

 private:
  std::vector<Tensor<T>> params_;
  AdamOptions options_;
  std::vector<std::vector<T>> m_;
  std::vector<std::vector<T>> v_;
  int64_t step_ = 0;
};

}  // namespace sscaf::ag

#endif  // SSCAF_AUTOGRAD_ADAM_H_
