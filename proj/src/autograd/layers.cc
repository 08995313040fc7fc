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

#include "sscaf/autograd/layers.h"

#include <cmath>

#include <fmt/format.h>

#include "sscaf/common/error.h"

namespace sscaf::ag {

template <typename T>
Tensor<T> KaimingUniform(Shape shape, int fan_in, Rng& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(fan_in));
  std::vector<T> data(NumElements(shape));
  for (auto& v : data) v = static_cast<T>(rng.Uniform(-bound, bound));
  return Tensor<T>::FromData(std::move(shape), std::move(data), true);
}

template <typename T>
LinearLayer<T>::LinearLayer(int in_features, int out_features, Rng& rng, bool bias)
    : weight_(KaimingUniform<T>({in_features, out_features}, in_features, rng)) {
  if (bias) bias_ = Tensor<T>::Zeros({out_features}, true);
}

template <typename T>
void LinearLayer<T>::Collect(const std::string& prefix, NamedTensors<T>& out) const {
  out.push_back({prefix + ".weight", weight_, true});
  if (bias_.defined()) out.push_back({prefix + ".bias", bias_, true});
}

template <typename T>
BatchNormLayer<T>::BatchNormLayer(int channels)
    : gamma_(Tensor<T>::Full({channels}, T(1), true)),
      beta_(Tensor<T>::Zeros({channels}, true)),
      running_mean_(Tensor<T>::Zeros({channels})),
      running_var_(Tensor<T>::Full({channels}, T(1))) {}

template <typename T>
void BatchNormLayer<T>::Collect(const std::string& prefix, NamedTensors<T>& out) const {
  out.push_back({prefix + ".gamma", gamma_, true});
  out.push_back({prefix + ".beta", beta_, true});
  out.push_back({prefix + ".running_mean", running_mean_, false});
  out.push_back({prefix + ".running_var", running_var_, false});
}

template <typename T>
LayerNormLayer<T>::LayerNormLayer(int features)
    : gamma_(Tensor<T>::Full({features}, T(1), true)),
      beta_(Tensor<T>::Zeros({features}, true)) {}

template <typename T>
void LayerNormLayer<T>::Collect(const std::string& prefix, NamedTensors<T>& out) const {
  out.push_back({prefix + ".gamma", gamma_, true});
  out.push_back({prefix + ".beta", beta_, true});
}

template <typename T>
ConvBnRelu<T>::ConvBnRelu(int in_channels, int out_channels, Rng& rng)
    : weight_(KaimingUniform<T>({out_channels, in_channels, 3, 3}, in_channels * 9, rng)),
      bn_(out_channels) {}

template <typename T>
void ConvBnRelu<T>::Collect(const std::string& prefix, NamedTensors<T>& out) const {
  out.push_back({prefix + ".conv.weight", weight_, true});
  bn_.Collect(prefix + ".bn", out);
}

template <typename T>
MultiHeadAttention<T>::MultiHeadAttention(int d_model, int heads, Rng& rng)
    : d_model_(d_model), heads_(heads) {
  if (heads < 1 || d_model % heads != 0) {
    throw ConfigError(fmt::format("mha: d_model {} is not divisible by {} heads", d_model, heads));
  }
  wq_ = LinearLayer<T>(d_model, d_model, rng);
  wk_ = LinearLayer<T>(d_model, d_model, rng);
  wv_ = LinearLayer<T>(d_model, d_model, rng);
  wo_ = LinearLayer<T>(d_model, d_model, rng);
}

template <typename T>
AttentionOutput<T> MultiHeadAttention<T>::operator()(const Tensor<T>& q, const Tensor<T>& k,
                                                     const Tensor<T>& v) const {
  const bool unbatched = q.rank() == 2;
  const auto bad = [&] {
    return ShapeError(fmt::format("mha: incompatible Q {} K {} V {} for d_model {}",
                                  ShapeToString(q.shape()), ShapeToString(k.shape()),
                                  ShapeToString(v.shape()), d_model_));
  };
  if ((q.rank() != 2 && q.rank() != 3) || k.rank() != q.rank() || v.rank() != q.rank()) throw bad();
  if (q.dim(-1) != d_model_ || k.dim(-1) != d_model_ || v.dim(-1) != d_model_) throw bad();
  if (k.dim(-2) != v.dim(-2)) throw bad();
  if (!unbatched && (k.dim(0) != q.dim(0) || v.dim(0) != q.dim(0))) throw bad();

  const int batch = unbatched ? 1 : q.dim(0);
  const int tq = q.dim(-2);
  const int tk = k.dim(-2);
  const int dk = d_model_ / heads_;

  // (B, T, d) -> (B, h, T, dk)
  const auto split_heads = [&](const Tensor<T>& x, int t) {
    return Transpose(Reshape(x, {batch, t, heads_, dk}), 1, 2);
  };
  const Tensor<T> qh = split_heads(wq_(q), tq);
  const Tensor<T> kh = split_heads(wk_(k), tk);
  const Tensor<T> vh = split_heads(wv_(v), tk);

  const T inv_sqrt_dk = T(1) / std::sqrt(static_cast<T>(dk));
  const Tensor<T> scores = Scale(MatMul(qh, Transpose(kh, 2, 3)), inv_sqrt_dk);
  Tensor<T> attention = Softmax(scores, -1);
  const Tensor<T> context = MatMul(attention, vh);  // (B, h, Tq, dk)
  Tensor<T> merged = Reshape(Transpose(context, 1, 2), {batch, tq, d_model_});
  Tensor<T> out = wo_(merged);
  if (unbatched) {
    out = Reshape(out, {tq, d_model_});
    attention = Reshape(attention, {heads_, tq, tk});
  }
  return {out, attention};
}

template <typename T>
void MultiHeadAttention<T>::Collect(const std::string& prefix, NamedTensors<T>& out) const {
  wq_.Collect(prefix + ".w_q", out);
  wk_.Collect(prefix + ".w_k", out);
  wv_.Collect(prefix + ".w_v", out);
  wo_.Collect(prefix + ".w_o", out);
}

template Tensor<float> KaimingUniform<float>(Shape, int, Rng&);
template Tensor<double> KaimingUniform<double>(Shape, int, Rng&);
template class LinearLayer<float>;
template class LinearLayer<double>;
template class BatchNormLayer<float>;
template class BatchNormLayer<double>;
template class LayerNormLayer<float>;
template class LayerNormLayer<double>;
template class ConvBnRelu<float>;
template class ConvBnRelu<double>;
template class MultiHeadAttention<float>;
template class MultiHeadAttention<double>;

}  // namespace sscaf::ag
