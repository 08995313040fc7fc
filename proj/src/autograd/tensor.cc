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

#include "sscaf/autograd/tensor.h"

#include <cmath>
#include <unordered_set>
#include <utility>

#include <fmt/format.h>

#include "sscaf/common/error.h"

namespace sscaf::ag {

namespace {

thread_local bool g_grad_enabled = true;

}  // namespace

std::size_t NumElements(const Shape& shape) {
  std::size_t n = 1;
  for (int d : shape) {
    if (d <= 0) throw ShapeError(fmt::format("non-positive dimension in shape {}", ShapeToString(shape)));
    n *= static_cast<std::size_t>(d);
  }
  return n;
}

std::string ShapeToString(const Shape& shape) {
  std::string s = "(";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i > 0) s += ", ";
    s += std::to_string(shape[i]);
  }
  return s + ")";
}

bool GradEnabled() { return g_grad_enabled; }

NoGradGuard::NoGradGuard() : previous_(g_grad_enabled) { g_grad_enabled = false; }
NoGradGuard::~NoGradGuard() { g_grad_enabled = previous_; }

template <typename T>
Tensor<T> Tensor<T>::Zeros(Shape shape, bool requires_grad) {
  return Full(std::move(shape), T(0), requires_grad);
}

template <typename T>
Tensor<T> Tensor<T>::Full(Shape shape, T value, bool requires_grad) {
  const std::size_t n = NumElements(shape);
  return FromData(std::move(shape), std::vector<T>(n, value), requires_grad);
}

template <typename T>
Tensor<T> Tensor<T>::FromData(Shape shape, std::vector<T> data, bool requires_grad) {
  if (NumElements(shape) != data.size()) {
    throw ShapeError(fmt::format("tensor data has {} values but shape {} needs {}",
                                 data.size(), ShapeToString(shape), NumElements(shape)));
  }
  auto node = std::make_shared<Node<T>>();
  node->shape = std::move(shape);
  node->data = std::move(data);
  node->requires_grad = requires_grad;
  return Tensor(std::move(node));
}

template <typename T>
Tensor<T> Tensor<T>::Scalar(T value, bool requires_grad) {
  return FromData({1}, {value}, requires_grad);
}

template <typename T>
int Tensor<T>::dim(int axis) const {
  const int r = rank();
  const int a = axis < 0 ? axis + r : axis;
  if (a < 0 || a >= r) {
    throw ShapeError(fmt::format("axis {} out of range for shape {}", axis, ShapeToString(shape())));
  }
  return node_->shape[a];
}

template <typename T>
T Tensor<T>::item() const {
  if (numel() != 1) {
    throw ShapeError(fmt::format("item() on tensor of shape {}", ShapeToString(shape())));
  }
  return node_->data[0];
}

template <typename T>
void Tensor<T>::Backward() const {
  if (numel() != 1) {
    throw ShapeError(fmt::format("Backward() needs a scalar, got shape {}", ShapeToString(shape())));
  }
  // Iterative post-order DFS gives a topological order (parents first).
  std::vector<Node<T>*> order;
  std::unordered_set<Node<T>*> visited;
  std::vector<std::pair<Node<T>*, std::size_t>> stack;
  stack.emplace_back(node_.get(), 0);
  visited.insert(node_.get());
  while (!stack.empty()) {
    auto& [node, next_parent] = stack.back();
    if (next_parent < node->parents.size()) {
      Node<T>* parent = node->parents[next_parent++].get();
      if (parent->requires_grad && visited.insert(parent).second) {
        stack.emplace_back(parent, 0);
      }
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }
  node_->EnsureGrad()[0] += T(1);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node<T>* node = *it;
    if (node->backward && !node->grad.empty()) node->backward(*node);
  }
}

template <typename T>
Tensor<T> Tensor<T>::Detach() const {
  return FromData(node_->shape, node_->data, false);
}

template <typename T>
Tensor<T> MakeResult(const char* op, Shape shape, std::vector<T> data,
                     std::vector<Tensor<T>> inputs,
                     std::function<void(const Node<T>&)> backward) {
  if (NumElements(shape) != data.size()) {
    throw ShapeError(fmt::format("{}: produced {} values for shape {}", op, data.size(),
                                 ShapeToString(shape)));
  }
  for (const T& v : data) {
    if (!std::isfinite(v)) {
      throw NumericError(fmt::format("{}: non-finite value in output of shape {}", op,
                                     ShapeToString(shape)));
    }
  }
  auto node = std::make_shared<Node<T>>();
  node->shape = std::move(shape);
  node->data = std::move(data);
  node->op = op;
  bool needs_grad = false;
  if (GradEnabled()) {
    for (const auto& t : inputs) needs_grad = needs_grad || (t.defined() && t.requires_grad());
  }
  if (needs_grad) {
    node->requires_grad = true;
    node->parents.reserve(inputs.size());
    for (const auto& t : inputs) {
      // Undefined optional inputs keep their slot so closures can index by
      // position; a stand-in leaf without requires_grad is used.
      node->parents.push_back(t.defined() ? t.node() : std::make_shared<Node<T>>());
    }
    node->backward = std::move(backward);
  }
  return Tensor<T>(std::move(node));
}

template class Tensor<float>;
template class Tensor<double>;
template Tensor<float> MakeResult<float>(const char*, Shape, std::vector<float>,
                                         std::vector<Tensor<float>>,
                                         std::function<void(const Node<float>&)>);
template Tensor<double> MakeResult<double>(const char*, Shape, std::vector<double>,
                                           std::vector<Tensor<double>>,
                                           std::function<void(const Node<double>&)>);

}  // namespace sscaf::ag
