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

#ifndef SSCAF_AUTOGRAD_LAYERS_H_
#define SSCAF_AUTOGRAD_LAYERS_H_

#include <string>
#include <vector>

#include "sscaf/autograd/ops.h"
#include "sscaf/autograd/tensor.h"
#include "sscaf/common/random.h"

namespace sscaf::ag {

// A model-owned tensor with its hierarchical name. Non-trainable entries are
// buffers (batch-norm running statistics) that are checkpointed but never
// touched by the optimizer.
template <typename T>
struct NamedTensor {
  std::string name;
  Tensor<T> tensor;
  bool trainable = true;
};

template <typename T>
using NamedTensors = std::vector<NamedTensor<T>>;

// Kaiming-uniform fill, bound sqrt(6 / fan_in).
template <typename T>
Tensor<T> KaimingUniform(Shape shape, int fan_in, Rng& rng);

template <typename T>
class LinearLayer {
 public:
  LinearLayer() = default;
  LinearLayer(int in_features, int out_features, Rng& rng, bool bias = true);

  Tensor<T> operator()(const Tensor<T>& x) const { return Linear(x, weight_, bias_); }

  void Collect(const std::string& prefix, NamedTensors<T>& out) const;

  int in_features() const { return weight_.dim(0); }
  int out_features() const { return weight_.dim(1); }
  Tensor<T>& weight() { return weight_; }
  Tensor<T>& bias() { return bias_; }

 private:
  Tensor<T> weight_;  // (in, out)
  Tensor<T> bias_;
};

template <typename T>
class BatchNormLayer {
 public:
  BatchNormLayer() = default;
  explicit BatchNormLayer(int channels);

  Tensor<T> operator()(const Tensor<T>& x, bool training) {
    return BatchNorm(x, gamma_, beta_, running_mean_, running_var_, training);
  }

  void Collect(const std::string& prefix, NamedTensors<T>& out) const;

 private:
  Tensor<T> gamma_;
  Tensor<T> beta_;
  Tensor<T> running_mean_;
  Tensor<T> running_var_;
};

template <typename T>
class LayerNormLayer {
 public:
  LayerNormLayer() = default;
  explicit LayerNormLayer(int features);

  Tensor<T> operator()(const Tensor<T>& x) const { return LayerNorm(x, gamma_, beta_); }

  void Collect(const std::string& prefix, NamedTensors<T>& out) const;

 private:
  Tensor<T> gamma_;
  Tensor<T> beta_;
};

// conv3x3 -> batch norm -> ReLU. The convolution has no bias because the
// batch norm shift subsumes it.
template <typename T>
class ConvBnRelu {
 public:
  ConvBnRelu() = default;
  ConvBnRelu(int in_channels, int out_channels, Rng& rng);

  Tensor<T> operator()(const Tensor<T>& x, bool training) {
    return Relu(bn_(Conv2d(x, weight_, Tensor<T>()), training));
  }

  void Collect(const std::string& prefix, NamedTensors<T>& out) const;

  int out_channels() const { return weight_.dim(0); }

 private:
  Tensor<T> weight_;  // (out, in, 3, 3)
  BatchNormLayer<T> bn_;
};

template <typename T>
struct AttentionOutput {
  Tensor<T> output;     // (B, Tq, d_model)
  Tensor<T> attention;  // (B, heads, Tq, Tk), rows sum to 1
};

// Multi-head attention. Per head i with d_k = d_model / heads:
//   head_i = softmax((Q Wq_i)(K Wk_i)^T / sqrt(d_k)) (V Wv_i)
//   out    = concat(head_1..head_h) Wo
// The per-head projections are the column blocks of the full d_model x
// d_model matrices Wq, Wk, Wv.
template <typename T>
class MultiHeadAttention {
 public:
  MultiHeadAttention() = default;
  MultiHeadAttention(int d_model, int heads, Rng& rng);

  // Inputs are (B, T, d_model) or unbatched (T, d_model); K and V must share
  // their sequence length.
  AttentionOutput<T> operator()(const Tensor<T>& q, const Tensor<T>& k, const Tensor<T>& v) const;

  void Collect(const std::string& prefix, NamedTensors<T>& out) const;

  int d_model() const { return d_model_; }
  int heads() const { return heads_; }
  LinearLayer<T>& query() { return wq_; }
  LinearLayer<T>& key() { return wk_; }
  LinearLayer<T>& value() { return wv_; }
  LinearLayer<T>& output() { return wo_; }

 private:
  int d_model_ = 0;
  int heads_ = 0;
  LinearLayer<T> wq_;
  LinearLayer<T> wk_;
  LinearLayer<T> wv_;
  LinearLayer<T> wo_;
};

}  // namespace sscaf::ag

#endif  // SSCAF_AUTOGRAD_LAYERS_H_
