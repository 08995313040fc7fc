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

// Dense row-major tensors with a reverse-mode tape.
//
// A Tensor is a cheap handle to a shared Node. Every op produces a new Node
// that, when gradients are being recorded, keeps its inputs alive and owns a
// closure that pushes its output gradient back into them. Backward() walks the
// graph reachable from a scalar root in reverse topological order, visiting
// each node exactly once; fan-out is handled by additive accumulation.
//
// The tape is single-threaded. Parallelism lives inside individual ops.

#ifndef SSCAF_AUTOGRAD_TENSOR_H_
#define SSCAF_AUTOGRAD_TENSOR_H_

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace sscaf::ag {

using Shape = std::vector<int>;

std::size_t NumElements(const Shape& shape);
std::string ShapeToString(const Shape& shape);

template <typename T>
struct Node {
  Shape shape;
  std::vector<T> data;
  std::vector<T> grad;  // empty until a gradient flows in
  bool requires_grad = false;
  const char* op = "leaf";
  std::vector<std::shared_ptr<Node>> parents;
  std::function<void(const Node&)> backward;

  std::vector<T>& EnsureGrad() {
    if (grad.empty()) grad.assign(data.size(), T(0));
    return grad;
  }
};

// Whether new ops record backward closures on this thread.
bool GradEnabled();

class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

template <typename T>
class Tensor {
 public:
  using value_type = T;

  Tensor() = default;
  explicit Tensor(std::shared_ptr<Node<T>> node) : node_(std::move(node)) {}

  static Tensor Zeros(Shape shape, bool requires_grad = false);
  static Tensor Full(Shape shape, T value, bool requires_grad = false);
  static Tensor FromData(Shape shape, std::vector<T> data, bool requires_grad = false);
  static Tensor Scalar(T value, bool requires_grad = false);

  bool defined() const { return node_ != nullptr; }
  const Shape& shape() const { return node_->shape; }
  int rank() const { return static_cast<int>(node_->shape.size()); }
  // Negative indices count from the back.
  int dim(int axis) const;
  std::size_t numel() const { return node_->data.size(); }

  std::span<const T> data() const { return node_->data; }
  std::span<T> mutable_data() { return node_->data; }
  const std::vector<T>& vec() const { return node_->data; }

  // Empty when no gradient has reached this tensor.
  std::span<const T> grad() const { return node_->grad; }
  std::span<T> mutable_grad() { return node_->EnsureGrad(); }
  bool has_grad() const { return !node_->grad.empty(); }
  void ZeroGrad() { node_->grad.clear(); }

  bool requires_grad() const { return node_->requires_grad; }
  void set_requires_grad(bool value) { node_->requires_grad = value; }

  const char* op() const { return node_->op; }
  T item() const;

  // Seeds d(this)/d(this) = 1 and propagates. The tensor must hold exactly
  // one element.
  void Backward() const;

  // Copy of the values with no history.
  Tensor Detach() const;

  const std::shared_ptr<Node<T>>& node() const { return node_; }

 private:
  std::shared_ptr<Node<T>> node_;
};

// Builds the result of an op. Validates that every value is finite (throwing
// NumericError naming `op`) and, when recording, links the inputs and the
// backward closure. The closure receives the output node; its `grad` is
// populated and `parents` are the inputs in the order given.
template <typename T>
Tensor<T> MakeResult(const char* op, Shape shape, std::vector<T> data,
                     std::vector<Tensor<T>> inputs,
                     std::function<void(const Node<T>&)> backward);

}  // namespace sscaf::ag

#endif  // SSCAF_AUTOGRAD_TENSOR_H_
