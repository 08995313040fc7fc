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

// Differentiable ops. All of them throw ShapeError (naming the op and the
// offending shapes) on incompatible inputs and NumericError when an output
// is not finite. Reductions run in a fixed sequential order, so forward
// values are bitwise reproducible for identical inputs.

#ifndef SSCAF_AUTOGRAD_OPS_H_
#define SSCAF_AUTOGRAD_OPS_H_

#include <cstdint>
#include <span>
#include <vector>

#include "sscaf/autograd/tensor.h"

namespace sscaf::ag {

// Elementwise a + b; shapes must match exactly.
template <typename T>
Tensor<T> Add(const Tensor<T>& a, const Tensor<T>& b);

// x + bias, with bias of shape (x.dim(-1)) broadcast over leading axes.
template <typename T>
Tensor<T> AddBias(const Tensor<T>& x, const Tensor<T>& bias);

template <typename T>
Tensor<T> Scale(const Tensor<T>& x, T factor);

// (..., m, k) x (k, n) -> (..., m, n), or batched (..., m, k) x (..., k, n)
// with identical leading axes.
template <typename T>
Tensor<T> MatMul(const Tensor<T>& a, const Tensor<T>& b);

// x (..., in) * weight (in, out) + bias (out). `bias` may be undefined.
template <typename T>
Tensor<T> Linear(const Tensor<T>& x, const Tensor<T>& weight, const Tensor<T>& bias);

template <typename T>
Tensor<T> Relu(const Tensor<T>& x);

template <typename T>
Tensor<T> Sigmoid(const Tensor<T>& x);

template <typename T>
Tensor<T> Softmax(const Tensor<T>& x, int axis);

template <typename T>
Tensor<T> Concat(const std::vector<Tensor<T>>& parts, int axis);

template <typename T>
Tensor<T> Reshape(const Tensor<T>& x, Shape shape);

// Swaps two axes.
template <typename T>
Tensor<T> Transpose(const Tensor<T>& x, int axis0, int axis1);

// Mean over one axis; the axis is removed. Global average pooling over time or
// frequency is expressed through this.
template <typename T>
Tensor<T> Mean(const Tensor<T>& x, int axis);

// Mean of all elements, shape (1).
template <typename T>
Tensor<T> MeanAll(const Tensor<T>& x);

// 3x3 convolution, stride 1, zero padding 1. x: (B, C, H, W),
// weight: (O, C, 3, 3), bias: (O) or undefined.
template <typename T>
Tensor<T> Conv2d(const Tensor<T>& x, const Tensor<T>& weight, const Tensor<T>& bias);

// Non-overlapping average pooling over (H, W) of a (B, C, H, W) tensor.
// Trailing rows/columns that do not fill a window are dropped.
template <typename T>
Tensor<T> AvgPool2d(const Tensor<T>& x, int pool_h, int pool_w);

// Batch normalization over axis 1 of a (B, C, ...) tensor. In training mode
// batch statistics are used and the running statistics are updated in place:
// running = momentum * running + (1 - momentum) * batch (unbiased variance).
// In inference mode the running statistics are used, making this a fixed
// affine map.
template <typename T>
Tensor<T> BatchNorm(const Tensor<T>& x, const Tensor<T>& gamma, const Tensor<T>& beta,
                    Tensor<T>& running_mean, Tensor<T>& running_var, bool training,
                    T momentum = T(0.9), T eps = T(1e-5));

// Normalization over the last axis.
template <typename T>
Tensor<T> LayerNorm(const Tensor<T>& x, const Tensor<T>& gamma, const Tensor<T>& beta,
                    T eps = T(1e-5));

inline constexpr double kProbClamp = 1e-7;

// Mean binary cross-entropy. Probabilities are clamped to
// [kProbClamp, 1 - kProbClamp]; targets must be exactly 0 or 1.
template <typename T>
Tensor<T> BceLoss(const Tensor<T>& probs, std::span<const T> targets);

// Mean squared error against fixed targets.
template <typename T>
Tensor<T> MseLoss(const Tensor<T>& pred, std::span<const T> targets);

// w_ssc * l_ssc + w_arp * l_arp; both weights default to the plain sum.
template <typename T>
Tensor<T> JointLoss(const Tensor<T>& l_ssc, const Tensor<T>& l_arp, T w_ssc = T(1),
                    T w_arp = T(1));

// While alive, every Relu evaluated on this thread folds its active/inactive
// pattern into a hash. Gradient checking uses it to detect finite-difference
// stencils that straddle a kink, where central differences are not a valid
// oracle.
class ReluPatternProbe {
 public:
  ReluPatternProbe();
  ~ReluPatternProbe();
  ReluPatternProbe(const ReluPatternProbe&) = delete;
  ReluPatternProbe& operator=(const ReluPatternProbe&) = delete;

  void Reset();
  uint64_t hash() const;
};

}  // namespace sscaf::ag

#endif  // SSCAF_AUTOGRAD_OPS_H_
