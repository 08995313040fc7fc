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

#include "sscaf/autograd/adam.h"

#include <cmath>

#include <fmt/format.h>

#include "sscaf/common/error.h"

namespace sscaf::ag {

template <typename T>
Adam<T>::Adam(std::vector<Tensor<T>> params, AdamOptions options)
    : params_(std::move(params)), options_(options) {
  for (const auto& p : params_) {
    m_.emplace_back(p.numel(), T(0));
    v_.emplace_back(p.numel(), T(0));
  }
}

template <typename T>
void Adam<T>::Step() {
  for (std::size_t i = 0; i < params_.size(); ++i) {
    for (const T g : params_[i].grad()) {
      if (!std::isfinite(g)) {
        throw NumericError(fmt::format("adam: non-finite gradient in parameter {} of shape {}", i,
                                       ShapeToString(params_[i].shape())));
      }
    }
  }
  ++step_;
  const double bc1 = 1.0 - std::pow(options_.beta1, static_cast<double>(step_));
  const double bc2 = 1.0 - std::pow(options_.beta2, static_cast<double>(step_));
  const T b1 = static_cast<T>(options_.beta1);
  const T b2 = static_cast<T>(options_.beta2);
  const T lr = static_cast<T>(options_.lr);
  const T eps = static_cast<T>(options_.eps);
  const T inv_bc1 = static_cast<T>(1.0 / bc1);
  const T inv_bc2 = static_cast<T>(1.0 / bc2);
  for (std::size_t i = 0; i < params_.size(); ++i) {
    auto data = params_[i].mutable_data();
    const auto grad = params_[i].grad();
    auto& m = m_[i];
    auto& v = v_[i];
    for (std::size_t j = 0; j < data.size(); ++j) {
      const T g = grad.empty() ? T(0) : grad[j];
      m[j] = b1 * m[j] + (T(1) - b1) * g;
      v[j] = b2 * v[j] + (T(1) - b2) * g * g;
      const T m_hat = m[j] * inv_bc1;
      const T v_hat = v[j] * inv_bc2;
      data[j] -= lr * m_hat / (std::sqrt(v_hat) + eps);
    }
  }
}

template <typename T>
void Adam<T>::ZeroGrad() {
  for (auto& p : params_) p.ZeroGrad();
}

template class Adam<float>;
template class Adam<double>;

}  // namespace sscaf::ag
