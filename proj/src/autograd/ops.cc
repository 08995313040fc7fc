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

#include "sscaf/autograd/ops.h"

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <numeric>

#include <Eigen/Core>
#include <fmt/format.h>

#include "sscaf/common/error.h"
#include "sscaf/common/parallel.h"
#include "sscaf/common/random.h"

namespace sscaf::ag {

namespace {

template <typename T>
using RowMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using MapMat = Eigen::Map<RowMat<T>>;
template <typename T>
using ConstMapMat = Eigen::Map<const RowMat<T>>;

thread_local bool g_probe_active = false;
thread_local uint64_t g_probe_hash = 0;

int NormalizeAxis(int axis, int rank, const char* op) {
  const int a = axis < 0 ? axis + rank : axis;
  if (a < 0 || a >= rank) {
    throw ShapeError(fmt::format("{}: axis {} out of range for rank {}", op, axis, rank));
  }
  return a;
}

// Splits `shape` around `axis` into (outer, n, inner) extents.
struct AxisSplit {
  std::size_t outer = 1;
  std::size_t n = 1;
  std::size_t inner = 1;
};

AxisSplit SplitAt(const Shape& shape, int axis) {
  AxisSplit s;
  for (int i = 0; i < axis; ++i) s.outer *= static_cast<std::size_t>(shape[i]);
  s.n = static_cast<std::size_t>(shape[axis]);
  for (std::size_t i = axis + 1; i < shape.size(); ++i) {
    s.inner *= static_cast<std::size_t>(shape[i]);
  }
  return s;
}

template <typename T>
bool Wants(const std::shared_ptr<Node<T>>& parent) {
  return parent && parent->requires_grad;
}

// Fixed sample-group size for deterministic weight-gradient reductions,
// independent of the number of worker threads.
constexpr int kConvGroup = 8;

}  // namespace

template <typename T>
Tensor<T> Add(const Tensor<T>& a, const Tensor<T>& b) {
  if (a.shape() != b.shape()) {
    throw ShapeError(fmt::format("add: shape mismatch {} vs {}", ShapeToString(a.shape()),
                                 ShapeToString(b.shape())));
  }
  std::vector<T> out(a.numel());
  const auto& x = a.vec();
  const auto& y = b.vec();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = x[i] + y[i];
  return MakeResult<T>("add", a.shape(), std::move(out), {a, b}, [](const Node<T>& self) {
    for (const auto& p : self.parents) {
      if (!Wants(p)) continue;
      auto& g = p->EnsureGrad();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
    }
  });
}

template <typename T>
Tensor<T> AddBias(const Tensor<T>& x, const Tensor<T>& bias) {
  if (bias.rank() != 1 || bias.dim(0) != x.dim(-1)) {
    throw ShapeError(fmt::format("add_bias: bias {} does not match last axis of {}",
                                 ShapeToString(bias.shape()), ShapeToString(x.shape())));
  }
  const std::size_t n = static_cast<std::size_t>(bias.dim(0));
  const std::size_t rows = x.numel() / n;
  std::vector<T> out(x.numel());
  const auto& xv = x.vec();
  const auto& bv = bias.vec();
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t j = 0; j < n; ++j) out[r * n + j] = xv[r * n + j] + bv[j];
  }
  return MakeResult<T>("add_bias", x.shape(), std::move(out), {x, bias},
                       [rows, n](const Node<T>& self) {
                         const auto& px = self.parents[0];
                         const auto& pb = self.parents[1];
                         if (Wants(px)) {
                           auto& g = px->EnsureGrad();
                           for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
                         }
                         if (Wants(pb)) {
                           auto& g = pb->EnsureGrad();
                           for (std::size_t r = 0; r < rows; ++r) {
                             for (std::size_t j = 0; j < n; ++j) g[j] += self.grad[r * n + j];
                           }
                         }
                       });
}

template <typename T>
Tensor<T> Scale(const Tensor<T>& x, T factor) {
  std::vector<T> out(x.numel());
  const auto& xv = x.vec();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = xv[i] * factor;
  return MakeResult<T>("scale", x.shape(), std::move(out), {x}, [factor](const Node<T>& self) {
    const auto& p = self.parents[0];
    if (!Wants(p)) return;
    auto& g = p->EnsureGrad();
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * factor;
  });
}

template <typename T>
Tensor<T> MatMul(const Tensor<T>& a, const Tensor<T>& b) {
  const auto mismatch = [&] {
    return ShapeError(fmt::format("matmul: incompatible shapes {} and {}",
                                  ShapeToString(a.shape()), ShapeToString(b.shape())));
  };
  if (a.rank() < 2 || b.rank() < 2) throw mismatch();
  const int m = a.dim(-2);
  const int k = a.dim(-1);
  if (b.dim(-2) != k) throw mismatch();
  const int n = b.dim(-1);
  Shape out_shape(a.shape().begin(), a.shape().end() - 1);
  out_shape.push_back(n);

  if (b.rank() == 2) {
    // Shared right operand: fold the leading axes into one GEMM.
    const int rows = static_cast<int>(a.numel() / static_cast<std::size_t>(k));
    std::vector<T> out(static_cast<std::size_t>(rows) * n);
    MapMat<T>(out.data(), rows, n).noalias() =
        ConstMapMat<T>(a.vec().data(), rows, k) * ConstMapMat<T>(b.vec().data(), k, n);
    return MakeResult<T>(
        "matmul", std::move(out_shape), std::move(out), {a, b},
        [rows, k, n](const Node<T>& self) {
          const auto& pa = self.parents[0];
          const auto& pb = self.parents[1];
          ConstMapMat<T> dc(self.grad.data(), rows, n);
          if (Wants(pa)) {
            MapMat<T>(pa->EnsureGrad().data(), rows, k).noalias() +=
                dc * ConstMapMat<T>(pb->data.data(), k, n).transpose();
          }
          if (Wants(pb)) {
            MapMat<T>(pb->EnsureGrad().data(), k, n).noalias() +=
                ConstMapMat<T>(pa->data.data(), rows, k).transpose() * dc;
          }
        });
  }

  if (a.rank() != b.rank() ||
      !std::equal(a.shape().begin(), a.shape().end() - 2, b.shape().begin())) {
    throw mismatch();
  }
  const std::size_t batch = a.numel() / (static_cast<std::size_t>(m) * k);
  std::vector<T> out(batch * m * n);
  for (std::size_t i = 0; i < batch; ++i) {
    MapMat<T>(out.data() + i * m * n, m, n).noalias() =
        ConstMapMat<T>(a.vec().data() + i * m * k, m, k) *
        ConstMapMat<T>(b.vec().data() + i * k * n, k, n);
  }
  return MakeResult<T>(
      "matmul", std::move(out_shape), std::move(out), {a, b},
      [batch, m, k, n](const Node<T>& self) {
        const auto& pa = self.parents[0];
        const auto& pb = self.parents[1];
        for (std::size_t i = 0; i < batch; ++i) {
          ConstMapMat<T> dc(self.grad.data() + i * m * n, m, n);
          if (Wants(pa)) {
            MapMat<T>(pa->EnsureGrad().data() + i * m * k, m, k).noalias() +=
                dc * ConstMapMat<T>(pb->data.data() + i * k * n, k, n).transpose();
          }
          if (Wants(pb)) {
            MapMat<T>(pb->EnsureGrad().data() + i * k * n, k, n).noalias() +=
                ConstMapMat<T>(pa->data.data() + i * m * k, m, k).transpose() * dc;
          }
        }
      });
}

template <typename T>
Tensor<T> Linear(const Tensor<T>& x, const Tensor<T>& weight, const Tensor<T>& bias) {
  if (weight.rank() != 2 || x.dim(-1) != weight.dim(0)) {
    throw ShapeError(fmt::format("linear: input {} does not match weight {}",
                                 ShapeToString(x.shape()), ShapeToString(weight.shape())));
  }
  Tensor<T> y = MatMul(x, weight);
  return bias.defined() ? AddBias(y, bias) : y;
}

template <typename T>
Tensor<T> Relu(const Tensor<T>& x) {
  std::vector<T> out(x.numel());
  const auto& xv = x.vec();
  // Written so that NaN inputs propagate (and are then rejected) instead of
  // silently becoming zero.
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = xv[i] < T(0) ? T(0) : xv[i];
  if (g_probe_active) {
    uint64_t word = 0;
    for (std::size_t i = 0; i < out.size(); ++i) {
      word = (word << 1) | (xv[i] > T(0) ? 1u : 0u);
      if ((i & 63) == 63 || i + 1 == out.size()) {
        g_probe_hash = SplitMix64(g_probe_hash ^ word ^ (i * 0x9E3779B97F4A7C15ULL));
        word = 0;
      }
    }
  }
  return MakeResult<T>("relu", x.shape(), std::move(out), {x}, [](const Node<T>& self) {
    const auto& p = self.parents[0];
    if (!Wants(p)) return;
    auto& g = p->EnsureGrad();
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (self.data[i] > T(0)) g[i] += self.grad[i];
    }
  });
}

template <typename T>
Tensor<T> Sigmoid(const Tensor<T>& x) {
  std::vector<T> out(x.numel());
  const auto& xv = x.vec();
  for (std::size_t i = 0; i < out.size(); ++i) {
    const T v = xv[i];
    if (v >= T(0)) {
      out[i] = T(1) / (T(1) + std::exp(-v));
    } else {
      const T e = std::exp(v);
      out[i] = e / (T(1) + e);
    }
  }
  return MakeResult<T>("sigmoid", x.shape(), std::move(out), {x}, [](const Node<T>& self) {
    const auto& p = self.parents[0];
    if (!Wants(p)) return;
    auto& g = p->EnsureGrad();
    for (std::size_t i = 0; i < g.size(); ++i) {
      const T y = self.data[i];
      g[i] += self.grad[i] * y * (T(1) - y);
    }
  });
}

template <typename T>
Tensor<T> Softmax(const Tensor<T>& x, int axis) {
  const int a = NormalizeAxis(axis, x.rank(), "softmax");
  const AxisSplit s = SplitAt(x.shape(), a);
  std::vector<T> out(x.numel());
  const auto& xv = x.vec();
  for (std::size_t o = 0; o < s.outer; ++o) {
    for (std::size_t i = 0; i < s.inner; ++i) {
      const std::size_t base = o * s.n * s.inner + i;
      T max_v = xv[base];
      for (std::size_t j = 1; j < s.n; ++j) max_v = std::max(max_v, xv[base + j * s.inner]);
      T sum = T(0);
      for (std::size_t j = 0; j < s.n; ++j) {
        const T e = std::exp(xv[base + j * s.inner] - max_v);
        out[base + j * s.inner] = e;
        sum += e;
      }
      for (std::size_t j = 0; j < s.n; ++j) out[base + j * s.inner] /= sum;
    }
  }
  return MakeResult<T>("softmax", x.shape(), std::move(out), {x}, [s](const Node<T>& self) {
    const auto& p = self.parents[0];
    if (!Wants(p)) return;
    auto& g = p->EnsureGrad();
    for (std::size_t o = 0; o < s.outer; ++o) {
      for (std::size_t i = 0; i < s.inner; ++i) {
        const std::size_t base = o * s.n * s.inner + i;
        T dot = T(0);
        for (std::size_t j = 0; j < s.n; ++j) {
          dot += self.grad[base + j * s.inner] * self.data[base + j * s.inner];
        }
        for (std::size_t j = 0; j < s.n; ++j) {
          const std::size_t idx = base + j * s.inner;
          g[idx] += self.data[idx] * (self.grad[idx] - dot);
        }
      }
    }
  });
}

template <typename T>
Tensor<T> Concat(const std::vector<Tensor<T>>& parts, int axis) {
  if (parts.empty()) throw ShapeError("concat: no inputs");
  const int a = NormalizeAxis(axis, parts[0].rank(), "concat");
  Shape out_shape = parts[0].shape();
  out_shape[a] = 0;
  for (const auto& t : parts) {
    Shape probe = t.shape();
    if (probe.size() != out_shape.size()) {
      throw ShapeError(fmt::format("concat: rank mismatch {} vs {}",
                                   ShapeToString(parts[0].shape()), ShapeToString(t.shape())));
    }
    probe[a] = parts[0].dim(a);
    Shape ref = parts[0].shape();
    if (probe != ref) {
      throw ShapeError(fmt::format("concat: shapes {} and {} differ off axis {}",
                                   ShapeToString(parts[0].shape()), ShapeToString(t.shape()), a));
    }
    out_shape[a] += t.dim(a);
  }
  const AxisSplit s = SplitAt(out_shape, a);
  std::vector<std::size_t> widths;  // contiguous run length per part
  for (const auto& t : parts) widths.push_back(static_cast<std::size_t>(t.dim(a)) * s.inner);
  const std::size_t row = s.n * s.inner;
  std::vector<T> out(s.outer * row);
  for (std::size_t o = 0; o < s.outer; ++o) {
    std::size_t offset = 0;
    for (std::size_t p = 0; p < parts.size(); ++p) {
      std::copy_n(parts[p].vec().data() + o * widths[p], widths[p],
                  out.data() + o * row + offset);
      offset += widths[p];
    }
  }
  return MakeResult<T>("concat", std::move(out_shape), std::move(out), parts,
                       [widths, row, outer = s.outer](const Node<T>& self) {
                         std::size_t offset = 0;
                         for (std::size_t p = 0; p < widths.size(); ++p) {
                           const auto& parent = self.parents[p];
                           if (Wants(parent)) {
                             auto& g = parent->EnsureGrad();
                             for (std::size_t o = 0; o < outer; ++o) {
                               for (std::size_t i = 0; i < widths[p]; ++i) {
                                 g[o * widths[p] + i] += self.grad[o * row + offset + i];
                               }
                             }
                           }
                           offset += widths[p];
                         }
                       });
}

template <typename T>
Tensor<T> Reshape(const Tensor<T>& x, Shape shape) {
  if (NumElements(shape) != x.numel()) {
    throw ShapeError(fmt::format("reshape: cannot view {} as {}", ShapeToString(x.shape()),
                                 ShapeToString(shape)));
  }
  return MakeResult<T>("reshape", std::move(shape), x.vec(), {x}, [](const Node<T>& self) {
    const auto& p = self.parents[0];
    if (!Wants(p)) return;
    auto& g = p->EnsureGrad();
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
  });
}

namespace {

// Gathers `src` (shape `in_shape`) into the layout with axes a0/a1 swapped.
// With accumulate = true the data is added into dst instead.
template <typename T>
void SwapAxesCopy(const T* src, T* dst, const Shape& in_shape, int a0, int a1, bool accumulate) {
  const int rank = static_cast<int>(in_shape.size());
  std::vector<std::size_t> in_strides(rank, 1);
  for (int i = rank - 2; i >= 0; --i) in_strides[i] = in_strides[i + 1] * in_shape[i + 1];
  Shape out_shape = in_shape;
  std::swap(out_shape[a0], out_shape[a1]);
  // Input stride seen when stepping each output axis.
  std::vector<std::size_t> step(in_strides);
  std::swap(step[a0], step[a1]);
  const std::size_t total = NumElements(in_shape);
  std::vector<int> idx(rank, 0);
  std::size_t src_off = 0;
  for (std::size_t o = 0; o < total; ++o) {
    if (accumulate) {
      dst[src_off] += src[o];
    } else {
      dst[o] = src[src_off];
    }
    for (int d = rank - 1; d >= 0; --d) {
      if (++idx[d] < out_shape[d]) {
        src_off += step[d];
        break;
      }
      src_off -= step[d] * static_cast<std::size_t>(out_shape[d] - 1);
      idx[d] = 0;
    }
  }
}

}  // namespace

template <typename T>
Tensor<T> Transpose(const Tensor<T>& x, int axis0, int axis1) {
  const int a0 = NormalizeAxis(axis0, x.rank(), "transpose");
  const int a1 = NormalizeAxis(axis1, x.rank(), "transpose");
  Shape out_shape = x.shape();
  std::swap(out_shape[a0], out_shape[a1]);
  std::vector<T> out(x.numel());
  SwapAxesCopy(x.vec().data(), out.data(), x.shape(), a0, a1, false);
  return MakeResult<T>("transpose", std::move(out_shape), std::move(out), {x},
                       [a0, a1, in_shape = x.shape()](const Node<T>& self) {
                         const auto& p = self.parents[0];
                         if (!Wants(p)) return;
                         // self.grad is laid out in the swapped shape; scatter
                         // each element back to its source position.
                         SwapAxesCopy(self.grad.data(), p->EnsureGrad().data(), in_shape, a0, a1,
                                      true);
                       });
}

template <typename T>
Tensor<T> Mean(const Tensor<T>& x, int axis) {
  const int a = NormalizeAxis(axis, x.rank(), "mean");
  const AxisSplit s = SplitAt(x.shape(), a);
  Shape out_shape = x.shape();
  out_shape.erase(out_shape.begin() + a);
  if (out_shape.empty()) out_shape.push_back(1);
  std::vector<T> out(s.outer * s.inner, T(0));
  const auto& xv = x.vec();
  const T inv = T(1) / static_cast<T>(s.n);
  for (std::size_t o = 0; o < s.outer; ++o) {
    for (std::size_t j = 0; j < s.n; ++j) {
      const T* src = xv.data() + (o * s.n + j) * s.inner;
      T* dst = out.data() + o * s.inner;
      for (std::size_t i = 0; i < s.inner; ++i) dst[i] += src[i];
    }
  }
  for (auto& v : out) v *= inv;
  return MakeResult<T>("mean", std::move(out_shape), std::move(out), {x},
                       [s, inv](const Node<T>& self) {
                         const auto& p = self.parents[0];
                         if (!Wants(p)) return;
                         auto& g = p->EnsureGrad();
                         for (std::size_t o = 0; o < s.outer; ++o) {
                           for (std::size_t j = 0; j < s.n; ++j) {
                             T* dst = g.data() + (o * s.n + j) * s.inner;
                             const T* src = self.grad.data() + o * s.inner;
                             for (std::size_t i = 0; i < s.inner; ++i) dst[i] += src[i] * inv;
                           }
                         }
                       });
}

template <typename T>
Tensor<T> MeanAll(const Tensor<T>& x) {
  T sum = T(0);
  for (const T v : x.vec()) sum += v;
  const T inv = T(1) / static_cast<T>(x.numel());
  return MakeResult<T>("mean_all", {1}, {sum * inv}, {x}, [inv](const Node<T>& self) {
    const auto& p = self.parents[0];
    if (!Wants(p)) return;
    auto& g = p->EnsureGrad();
    const T d = self.grad[0] * inv;
    for (auto& v : g) v += d;
  });
}

namespace {

// cols[(c * 9 + ky * 3 + kx) * hw + y * w + x] = img[c, y + ky - 1, x + kx - 1].
template <typename T>
void Im2Col3x3(const T* img, int c, int h, int w, T* cols) {
  const std::size_t hw = static_cast<std::size_t>(h) * w;
  for (int ch = 0; ch < c; ++ch) {
    const T* plane = img + ch * hw;
    for (int ky = 0; ky < 3; ++ky) {
      for (int kx = 0; kx < 3; ++kx) {
        T* row = cols + (static_cast<std::size_t>(ch) * 9 + ky * 3 + kx) * hw;
        for (int y = 0; y < h; ++y) {
          const int sy = y + ky - 1;
          T* dst = row + static_cast<std::size_t>(y) * w;
          if (sy < 0 || sy >= h) {
            std::fill_n(dst, w, T(0));
            continue;
          }
          const T* src = plane + static_cast<std::size_t>(sy) * w;
          for (int x = 0; x < w; ++x) {
            const int sx = x + kx - 1;
            dst[x] = (sx >= 0 && sx < w) ? src[sx] : T(0);
          }
        }
      }
    }
  }
}

template <typename T>
void Col2Im3x3Add(const T* cols, int c, int h, int w, T* img) {
  const std::size_t hw = static_cast<std::size_t>(h) * w;
  for (int ch = 0; ch < c; ++ch) {
    T* plane = img + ch * hw;
    for (int ky = 0; ky < 3; ++ky) {
      for (int kx = 0; kx < 3; ++kx) {
        const T* row = cols + (static_cast<std::size_t>(ch) * 9 + ky * 3 + kx) * hw;
        for (int y = 0; y < h; ++y) {
          const int sy = y + ky - 1;
          if (sy < 0 || sy >= h) continue;
          const T* src = row + static_cast<std::size_t>(y) * w;
          T* dst = plane + static_cast<std::size_t>(sy) * w;
          for (int x = 0; x < w; ++x) {
            const int sx = x + kx - 1;
            if (sx >= 0 && sx < w) dst[sx] += src[x];
          }
        }
      }
    }
  }
}

}  // namespace

template <typename T>
Tensor<T> Conv2d(const Tensor<T>& x, const Tensor<T>& weight, const Tensor<T>& bias) {
  if (x.rank() != 4 || weight.rank() != 4 || weight.dim(1) != x.dim(1) || weight.dim(2) != 3 ||
      weight.dim(3) != 3 || (bias.defined() && (bias.rank() != 1 || bias.dim(0) != weight.dim(0)))) {
    throw ShapeError(fmt::format("conv2d: input {} incompatible with weight {}{}",
                                 ShapeToString(x.shape()), ShapeToString(weight.shape()),
                                 bias.defined() ? " / bias " + ShapeToString(bias.shape()) : ""));
  }
  const int batch = x.dim(0);
  const int cin = x.dim(1);
  const int h = x.dim(2);
  const int w = x.dim(3);
  const int cout = weight.dim(0);
  const int k = cin * 9;
  const std::size_t hw = static_cast<std::size_t>(h) * w;
  const std::size_t in_stride = static_cast<std::size_t>(cin) * hw;
  const std::size_t out_stride = static_cast<std::size_t>(cout) * hw;

  std::vector<T> out(static_cast<std::size_t>(batch) * out_stride);
  const T* xd = x.vec().data();
  const T* wd = weight.vec().data();
  const T* bd = bias.defined() ? bias.vec().data() : nullptr;
  ParallelFor(static_cast<std::size_t>(batch), [&](std::size_t b) {
    std::vector<T> cols(static_cast<std::size_t>(k) * hw);
    Im2Col3x3(xd + b * in_stride, cin, h, w, cols.data());
    MapMat<T> y(out.data() + b * out_stride, cout, static_cast<Eigen::Index>(hw));
    y.noalias() = ConstMapMat<T>(wd, cout, k) * ConstMapMat<T>(cols.data(), k, hw);
    if (bd != nullptr) {
      for (int o = 0; o < cout; ++o) y.row(o).array() += bd[o];
    }
  });

  return MakeResult<T>(
      "conv2d", {batch, cout, h, w}, std::move(out), {x, weight, bias},
      [=](const Node<T>& self) {
        const auto& px = self.parents[0];
        const auto& pw = self.parents[1];
        const auto& pb = self.parents[2];
        const bool want_x = Wants(px);
        const bool want_w = Wants(pw);
        const bool want_b = Wants(pb);
        const std::size_t wsize = static_cast<std::size_t>(cout) * k;
        const std::size_t groups = (static_cast<std::size_t>(batch) + kConvGroup - 1) / kConvGroup;
        std::vector<std::vector<T>> dw_parts(want_w ? groups : 0);
        std::vector<std::vector<T>> db_parts(want_b ? groups : 0);
        T* dx = want_x ? px->EnsureGrad().data() : nullptr;
        ParallelFor(groups, [&](std::size_t gi) {
          std::vector<T> cols(static_cast<std::size_t>(k) * hw);
          std::vector<T> dcols;
          if (want_x) dcols.resize(cols.size());
          if (want_w) dw_parts[gi].assign(wsize, T(0));
          if (want_b) db_parts[gi].assign(cout, T(0));
          const std::size_t end = std::min<std::size_t>(batch, (gi + 1) * kConvGroup);
          for (std::size_t b = gi * kConvGroup; b < end; ++b) {
            ConstMapMat<T> dy(self.grad.data() + b * out_stride, cout, hw);
            if (want_w) {
              Im2Col3x3(px->data.data() + b * in_stride, cin, h, w, cols.data());
              MapMat<T>(dw_parts[gi].data(), cout, k).noalias() +=
                  dy * ConstMapMat<T>(cols.data(), k, hw).transpose();
            }
            if (want_b) {
              for (int o = 0; o < cout; ++o) db_parts[gi][o] += dy.row(o).sum();
            }
            if (want_x) {
              MapMat<T>(dcols.data(), k, hw).noalias() =
                  ConstMapMat<T>(pw->data.data(), cout, k).transpose() * dy;
              Col2Im3x3Add(dcols.data(), cin, h, w, dx + b * in_stride);
            }
          }
        });
        if (want_w) {
          auto& g = pw->EnsureGrad();
          for (const auto& part : dw_parts) {
            for (std::size_t i = 0; i < wsize; ++i) g[i] += part[i];
          }
        }
        if (want_b) {
          auto& g = pb->EnsureGrad();
          for (const auto& part : db_parts) {
            for (int o = 0; o < cout; ++o) g[o] += part[o];
          }
        }
      });
}

template <typename T>
Tensor<T> AvgPool2d(const Tensor<T>& x, int pool_h, int pool_w) {
  if (x.rank() != 4 || pool_h < 1 || pool_w < 1 || x.dim(2) < pool_h || x.dim(3) < pool_w) {
    throw ShapeError(fmt::format("avg_pool2d: cannot pool {} by ({}, {})",
                                 ShapeToString(x.shape()), pool_h, pool_w));
  }
  const int planes = x.dim(0) * x.dim(1);
  const int h = x.dim(2);
  const int w = x.dim(3);
  const int oh = h / pool_h;
  const int ow = w / pool_w;
  const T inv = T(1) / static_cast<T>(pool_h * pool_w);
  std::vector<T> out(static_cast<std::size_t>(planes) * oh * ow);
  const auto& xv = x.vec();
  for (int p = 0; p < planes; ++p) {
    const T* src = xv.data() + static_cast<std::size_t>(p) * h * w;
    T* dst = out.data() + static_cast<std::size_t>(p) * oh * ow;
    for (int oy = 0; oy < oh; ++oy) {
      for (int ox = 0; ox < ow; ++ox) {
        T sum = T(0);
        for (int dy = 0; dy < pool_h; ++dy) {
          for (int dx = 0; dx < pool_w; ++dx) {
            sum += src[(oy * pool_h + dy) * w + ox * pool_w + dx];
          }
        }
        dst[oy * ow + ox] = sum * inv;
      }
    }
  }
  return MakeResult<T>(
      "avg_pool2d", {x.dim(0), x.dim(1), oh, ow}, std::move(out), {x},
      [=](const Node<T>& self) {
        const auto& p = self.parents[0];
        if (!Wants(p)) return;
        auto& g = p->EnsureGrad();
        for (int pl = 0; pl < planes; ++pl) {
          T* dst = g.data() + static_cast<std::size_t>(pl) * h * w;
          const T* src = self.grad.data() + static_cast<std::size_t>(pl) * oh * ow;
          for (int oy = 0; oy < oh; ++oy) {
            for (int ox = 0; ox < ow; ++ox) {
              const T d = src[oy * ow + ox] * inv;
              for (int dy = 0; dy < pool_h; ++dy) {
                for (int dx = 0; dx < pool_w; ++dx) {
                  dst[(oy * pool_h + dy) * w + ox * pool_w + dx] += d;
                }
              }
            }
          }
        }
      });
}

template <typename T>
Tensor<T> BatchNorm(const Tensor<T>& x, const Tensor<T>& gamma, const Tensor<T>& beta,
                    Tensor<T>& running_mean, Tensor<T>& running_var, bool training, T momentum,
                    T eps) {
  if (x.rank() < 2) {
    throw ShapeError(fmt::format("batch_norm: input {} has no channel axis",
                                 ShapeToString(x.shape())));
  }
  const int c = x.dim(1);
  for (const Tensor<T>* t : std::initializer_list<const Tensor<T>*>{&gamma, &beta, &running_mean, &running_var}) {
    if (t->rank() != 1 || t->dim(0) != c) {
      throw ShapeError(fmt::format("batch_norm: parameter {} does not match channels of {}",
                                   ShapeToString(t->shape()), ShapeToString(x.shape())));
    }
  }
  const std::size_t batch = static_cast<std::size_t>(x.dim(0));
  const std::size_t inner = x.numel() / (batch * c);
  const std::size_t count = batch * inner;
  if (training && count < 2) {
    throw ShapeError(fmt::format("batch_norm: training needs more than one value per channel, "
                                 "got input {}", ShapeToString(x.shape())));
  }
  const auto& xv = x.vec();
  std::vector<T> mean(c, T(0));
  std::vector<T> invstd(c, T(0));
  if (training) {
    auto rm = running_mean.mutable_data();
    auto rv = running_var.mutable_data();
    for (int ch = 0; ch < c; ++ch) {
      T sum = T(0);
      for (std::size_t b = 0; b < batch; ++b) {
        const T* src = xv.data() + (b * c + ch) * inner;
        for (std::size_t i = 0; i < inner; ++i) sum += src[i];
      }
      const T mu = sum / static_cast<T>(count);
      T sq = T(0);
      for (std::size_t b = 0; b < batch; ++b) {
        const T* src = xv.data() + (b * c + ch) * inner;
        for (std::size_t i = 0; i < inner; ++i) sq += (src[i] - mu) * (src[i] - mu);
      }
      const T var = sq / static_cast<T>(count);
      mean[ch] = mu;
      invstd[ch] = T(1) / std::sqrt(var + eps);
      const T unbiased = sq / static_cast<T>(count - 1);
      rm[ch] = momentum * rm[ch] + (T(1) - momentum) * mu;
      rv[ch] = momentum * rv[ch] + (T(1) - momentum) * unbiased;
    }
  } else {
    for (int ch = 0; ch < c; ++ch) {
      mean[ch] = running_mean.vec()[ch];
      invstd[ch] = T(1) / std::sqrt(running_var.vec()[ch] + eps);
    }
  }
  std::vector<T> out(x.numel());
  const auto& gv = gamma.vec();
  const auto& bv = beta.vec();
  for (std::size_t b = 0; b < batch; ++b) {
    for (int ch = 0; ch < c; ++ch) {
      const std::size_t off = (b * c + ch) * inner;
      const T scale = gv[ch] * invstd[ch];
      const T shift = bv[ch] - mean[ch] * scale;
      for (std::size_t i = 0; i < inner; ++i) out[off + i] = xv[off + i] * scale + shift;
    }
  }
  return MakeResult<T>(
      "batch_norm", x.shape(), std::move(out), {x, gamma, beta},
      [=, mean = std::move(mean), invstd = std::move(invstd)](const Node<T>& self) {
        const auto& px = self.parents[0];
        const auto& pg = self.parents[1];
        const auto& pbeta = self.parents[2];
        const T n = static_cast<T>(count);
        for (int ch = 0; ch < c; ++ch) {
          T sum_dy = T(0);
          T sum_dy_xhat = T(0);
          for (std::size_t b = 0; b < batch; ++b) {
            const std::size_t off = (b * c + ch) * inner;
            for (std::size_t i = 0; i < inner; ++i) {
              const T xhat = (px->data[off + i] - mean[ch]) * invstd[ch];
              sum_dy += self.grad[off + i];
              sum_dy_xhat += self.grad[off + i] * xhat;
            }
          }
          if (Wants(pg)) pg->EnsureGrad()[ch] += sum_dy_xhat;
          if (Wants(pbeta)) pbeta->EnsureGrad()[ch] += sum_dy;
          if (!Wants(px)) continue;
          auto& g = px->EnsureGrad();
          const T gscale = pg->data[ch] * invstd[ch];
          for (std::size_t b = 0; b < batch; ++b) {
            const std::size_t off = (b * c + ch) * inner;
            for (std::size_t i = 0; i < inner; ++i) {
              if (training) {
                const T xhat = (px->data[off + i] - mean[ch]) * invstd[ch];
                g[off + i] += gscale / n * (n * self.grad[off + i] - sum_dy - xhat * sum_dy_xhat);
              } else {
                g[off + i] += gscale * self.grad[off + i];
              }
            }
          }
        }
      });
}

template <typename T>
Tensor<T> LayerNorm(const Tensor<T>& x, const Tensor<T>& gamma, const Tensor<T>& beta, T eps) {
  const int d = x.dim(-1);
  if (gamma.rank() != 1 || gamma.dim(0) != d || beta.rank() != 1 || beta.dim(0) != d) {
    throw ShapeError(fmt::format("layer_norm: parameters {} / {} do not match input {}",
                                 ShapeToString(gamma.shape()), ShapeToString(beta.shape()),
                                 ShapeToString(x.shape())));
  }
  const std::size_t rows = x.numel() / d;
  const auto& xv = x.vec();
  std::vector<T> out(x.numel());
  std::vector<T> invstd(rows);
  std::vector<T> means(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    const T* src = xv.data() + r * d;
    T sum = T(0);
    for (int i = 0; i < d; ++i) sum += src[i];
    const T mu = sum / static_cast<T>(d);
    T sq = T(0);
    for (int i = 0; i < d; ++i) sq += (src[i] - mu) * (src[i] - mu);
    means[r] = mu;
    invstd[r] = T(1) / std::sqrt(sq / static_cast<T>(d) + eps);
    for (int i = 0; i < d; ++i) {
      out[r * d + i] = (src[i] - mu) * invstd[r] * gamma.vec()[i] + beta.vec()[i];
    }
  }
  return MakeResult<T>(
      "layer_norm", x.shape(), std::move(out), {x, gamma, beta},
      [rows, d, means = std::move(means), invstd = std::move(invstd)](const Node<T>& self) {
        const auto& px = self.parents[0];
        const auto& pg = self.parents[1];
        const auto& pb = self.parents[2];
        std::vector<T> xhat(d);
        std::vector<T> dxhat(d);
        for (std::size_t r = 0; r < rows; ++r) {
          const T* dy = self.grad.data() + r * d;
          T sum_dxhat = T(0);
          T sum_dxhat_xhat = T(0);
          for (int i = 0; i < d; ++i) {
            xhat[i] = (px->data[r * d + i] - means[r]) * invstd[r];
            dxhat[i] = dy[i] * pg->data[i];
            sum_dxhat += dxhat[i];
            sum_dxhat_xhat += dxhat[i] * xhat[i];
          }
          if (Wants(pg)) {
            auto& g = pg->EnsureGrad();
            for (int i = 0; i < d; ++i) g[i] += dy[i] * xhat[i];
          }
          if (Wants(pb)) {
            auto& g = pb->EnsureGrad();
            for (int i = 0; i < d; ++i) g[i] += dy[i];
          }
          if (Wants(px)) {
            auto& g = px->EnsureGrad();
            const T n = static_cast<T>(d);
            for (int i = 0; i < d; ++i) {
              g[r * d + i] +=
                  invstd[r] / n * (n * dxhat[i] - sum_dxhat - xhat[i] * sum_dxhat_xhat);
            }
          }
        }
      });
}

template <typename T>
Tensor<T> BceLoss(const Tensor<T>& probs, std::span<const T> targets) {
  if (targets.size() != probs.numel()) {
    throw ShapeError(fmt::format("bce_loss: {} targets for predictions of shape {}",
                                 targets.size(), ShapeToString(probs.shape())));
  }
  for (const T y : targets) {
    if (y != T(0) && y != T(1)) {
      throw InputError(fmt::format("bce_loss: label {} is not 0 or 1", static_cast<double>(y)));
    }
  }
  const T lo = static_cast<T>(kProbClamp);
  const T hi = T(1) - static_cast<T>(kProbClamp);
  const std::size_t n = probs.numel();
  double total = 0.0;
  const auto& pv = probs.vec();
  for (std::size_t i = 0; i < n; ++i) {
    const double p = std::clamp(pv[i], lo, hi);
    total -= targets[i] == T(1) ? std::log(p) : std::log1p(-p);
  }
  std::vector<T> ys(targets.begin(), targets.end());
  return MakeResult<T>(
      "bce_loss", {1}, {static_cast<T>(total / static_cast<double>(n))}, {probs},
      [ys = std::move(ys), lo, hi](const Node<T>& self) {
        const auto& p = self.parents[0];
        if (!Wants(p)) return;
        auto& g = p->EnsureGrad();
        const T scale = self.grad[0] / static_cast<T>(ys.size());
        for (std::size_t i = 0; i < ys.size(); ++i) {
          const T q = std::clamp(p->data[i], lo, hi);
          g[i] += ys[i] == T(1) ? -scale / q : scale / (T(1) - q);
        }
      });
}

template <typename T>
Tensor<T> MseLoss(const Tensor<T>& pred, std::span<const T> targets) {
  if (targets.size() != pred.numel()) {
    throw ShapeError(fmt::format("mse_loss: {} targets for predictions of shape {}",
                                 targets.size(), ShapeToString(pred.shape())));
  }
  const std::size_t n = pred.numel();
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = static_cast<double>(pred.vec()[i]) - static_cast<double>(targets[i]);
    total += e * e;
  }
  std::vector<T> ys(targets.begin(), targets.end());
  return MakeResult<T>("mse_loss", {1}, {static_cast<T>(total / static_cast<double>(n))}, {pred},
                       [ys = std::move(ys)](const Node<T>& self) {
                         const auto& p = self.parents[0];
                         if (!Wants(p)) return;
                         auto& g = p->EnsureGrad();
                         const T scale = T(2) * self.grad[0] / static_cast<T>(ys.size());
                         for (std::size_t i = 0; i < ys.size(); ++i) {
                           g[i] += scale * (p->data[i] - ys[i]);
                         }
                       });
}

template <typename T>
Tensor<T> JointLoss(const Tensor<T>& l_ssc, const Tensor<T>& l_arp, T w_ssc, T w_arp) {
  if (l_ssc.numel() != 1 || l_arp.numel() != 1) {
    throw ShapeError(fmt::format("joint_loss: expects scalars, got {} and {}",
                                 ShapeToString(l_ssc.shape()), ShapeToString(l_arp.shape())));
  }
  const T value = w_ssc * l_ssc.item() + w_arp * l_arp.item();
  return MakeResult<T>("joint_loss", {1}, {value}, {l_ssc, l_arp},
                       [w_ssc, w_arp](const Node<T>& self) {
                         if (Wants(self.parents[0])) {
                           self.parents[0]->EnsureGrad()[0] += w_ssc * self.grad[0];
                         }
                         if (Wants(self.parents[1])) {
                           self.parents[1]->EnsureGrad()[0] += w_arp * self.grad[0];
                         }
                       });
}

ReluPatternProbe::ReluPatternProbe() {
  g_probe_active = true;
  g_probe_hash = 0;
}

ReluPatternProbe::~ReluPatternProbe() { g_probe_active = false; }

void ReluPatternProbe::Reset() { g_probe_hash = 0; }

uint64_t ReluPatternProbe::hash() const { return g_probe_hash; }

#define SSCAF_INSTANTIATE_OPS(T)                                                              \
  template Tensor<T> Add(const Tensor<T>&, const Tensor<T>&);                                 \
  template Tensor<T> AddBias(const Tensor<T>&, const Tensor<T>&);                             \
  template Tensor<T> Scale(const Tensor<T>&, T);                                              \
  template Tensor<T> MatMul(const Tensor<T>&, const Tensor<T>&);                              \
  template Tensor<T> Linear(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&);            \
  template Tensor<T> Relu(const Tensor<T>&);                                                  \
  template Tensor<T> Sigmoid(const Tensor<T>&);                                               \
  template Tensor<T> Softmax(const Tensor<T>&, int);                                          \
  template Tensor<T> Concat(const std::vector<Tensor<T>>&, int);                              \
  template Tensor<T> Reshape(const Tensor<T>&, Shape);                                        \
  template Tensor<T> Transpose(const Tensor<T>&, int, int);                                   \
  template Tensor<T> Mean(const Tensor<T>&, int);                                             \
  template Tensor<T> MeanAll(const Tensor<T>&);                                               \
  template Tensor<T> Conv2d(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&);            \
  template Tensor<T> AvgPool2d(const Tensor<T>&, int, int);                                   \
  template Tensor<T> BatchNorm(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&,          \
                               Tensor<T>&, Tensor<T>&, bool, T, T);                           \
  template Tensor<T> LayerNorm(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&, T);      \
  template Tensor<T> BceLoss(const Tensor<T>&, std::span<const T>);                           \
  template Tensor<T> MseLoss(const Tensor<T>&, std::span<const T>);                           \
  template Tensor<T> JointLoss(const Tensor<T>&, const Tensor<T>&, T, T);

SSCAF_INSTANTIATE_OPS(float)
SSCAF_INSTANTIATE_OPS(double)

#undef SSCAF_INSTANTIATE_OPS

}  // namespace sscaf::ag
