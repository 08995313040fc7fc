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

#ifndef SSCAF_MODEL_MODEL_H_
#define SSCAF_MODEL_MODEL_H_

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "sscaf/autograd/layers.h"
#include "sscaf/autograd/tensor.h"
#include "sscaf/model/config.h"

namespace sscaf::model {

// One named intermediate of the forward pass and its per-sample shape (the
// batch axis is implicit).
struct ShapeLedgerEntry {
  std::string name;
  ag::Shape shape;
};

template <typename T>
struct ModelOutput {
  ag::Tensor<T> probs;      // (B, n_classes) sigmoid outputs
  ag::Tensor<T> annoyance;  // (B) regression output
  // Populated by the cross-attention models only.
  ag::Tensor<T> r_mel;       // (B, T', d_model)
  ag::Tensor<T> r_rms;       // (B, T', d_model)
  ag::Tensor<T> attention1;  // (B, heads, T', T'): Mel queries over RMS keys
  ag::Tensor<T> attention2;  // (B, heads, T', T'): RMS queries over Mel keys
};

// Joint SSC/ARP network. Inputs are log-Mel features (B, 1, n_frames, n_mels)
// and frame RMS (B, 1, n_frames, 1).
template <typename T>
class Model {
 public:
  virtual ~Model() = default;

  virtual ModelKind kind() const = 0;

  // Training mode uses batch statistics in batch norm and updates its running
  // statistics. Every ledger entry is checked; a mismatch throws ShapeError.
  virtual ModelOutput<T> Forward(const ag::Tensor<T>& mel, const ag::Tensor<T>& rms, bool training) = 0;

  // Every model-owned tensor in a fixed order, buffers included.
  virtual ag::NamedTensors<T> Parameters() const = 0;

  // Nominal configuration (as built) and the one with tiny scaling applied.
  const DcnnCafConfig& config() const { return config_; }
  const DcnnCafConfig& effective_config() const { return effective_; }
  const std::vector<ShapeLedgerEntry>& shape_ledger() const { return ledger_; }

  // Trainable tensors in Parameters() order.
  std::vector<ag::Tensor<T>> TrainableTensors() const;
  std::size_t NumTrainableParameters() const;
  // Trainable scalar count of the Mel branch plus the classification head;
  // what a classification-only network would need.
  std::size_t NumSscParameters() const;

  // Ledger shape of `name`; throws InputError if absent.
  const ag::Shape& LedgerShape(const std::string& name) const;

 protected:
  explicit Model(const DcnnCafConfig& config) : config_(config), effective_(config.Effective()) {}

  void AddLedger(const std::string& name, ag::Shape shape);
  // Throws ShapeError unless `t` is (batch, ledger shape of name...).
  void CheckLedger(const std::string& name, const ag::Tensor<T>& t, int batch) const;

 private:
  DcnnCafConfig config_;
  DcnnCafConfig effective_;
  std::vector<ShapeLedgerEntry> ledger_;
};

template <typename T>
struct CrossAttentionOutput {
  ag::Tensor<T> out_mel;     // mha1(Q = R_mel, K = V = R_rms)
  ag::Tensor<T> out_rms;     // mha2(Q = R_rms, K = V = R_mel)
  ag::Tensor<T> attention1;
  ag::Tensor<T> attention2;
};

// The two cross-attention blocks of the fusion stage.
template <typename T>
CrossAttentionOutput<T> CrossAttend(const ag::MultiHeadAttention<T>& mha1,
                                    const ag::MultiHeadAttention<T>& mha2,
                                    const ag::Tensor<T>& r_mel, const ag::Tensor<T>& r_rms);

// Builds a model with parameters initialised from `seed`. Each sub-module
// draws from its own stream keyed by its name, so identically named
// sub-modules of different model kinds start out equal. `config` is the
// nominal configuration; tiny scaling is applied here.
template <typename T>
std::unique_ptr<Model<T>> BuildModel(ModelKind kind, const DcnnCafConfig& config, uint64_t seed);

// Checks the input pair against the configuration: mel (B, 1, n_frames,
// n_mels), rms (B, 1, n_frames, 1), same B >= 1. Throws ShapeError.
void CheckInputShapes(const ag::Shape& mel, const ag::Shape& rms, const DcnnCafConfig& effective);

}  // namespace sscaf::model

#endif  // SSCAF_MODEL_MODEL_H_
