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

#ifndef SSCAF_MODEL_CONFIG_H_
#define SSCAF_MODEL_CONFIG_H_

#include <string>
#include <vector>

#include "sscaf/common/kv_config.h"

namespace sscaf::model {

enum class ModelKind { kDcnnCaf, kMelOnly, kRmsOnly, kDnn, kCnn, kCnnTransformer };

// "dcnn-caf", "mel-only", "rms-only", "dnn", "cnn", "cnn-transformer".
std::string ModelKindName(ModelKind kind);
// Throws ConfigError for an unknown name.
ModelKind ParseModelKind(const std::string& name);

inline constexpr int kTinyDivisor = 16;

// Architecture hyper-parameters. Widths are nominal; with `tiny` set every
// width w becomes max(1, w / 16) (heads are kept, or reduced to the largest
// divisor of the width when a tiny width is too narrow).
struct DcnnCafConfig {
  std::vector<int> conv_filters = {64, 128, 256, 512};
  int n_mels = 64;
  int n_frames = 480;
  int d_model = 512;
  int heads = 8;
  int n_classes = 24;
  int embedding_dim = 128;
  int fusion_dim = 512;
  bool tiny = false;
  // Average pooling of the Mel branch also halves the frequency axis (2x2
  // windows) while it is at least 2 wide; time is halved by every block
  // either way. Off means time-only pooling.
  bool pool_freq = true;

  // Baselines.
  std::vector<int> dnn_widths = {64, 128, 256, 512};
  std::vector<int> cnn_filters = {32, 64};
  int encoder_heads = 8;
  int encoder_ffn_multiplier = 2;

  // Copy with tiny scaling applied and `tiny` cleared.
  DcnnCafConfig Effective() const;

  // Throws ConfigError on an inconsistent configuration.
  void Validate() const;

  static DcnnCafConfig Tiny();
  static DcnnCafConfig FromKeyValue(const KeyValueConfig& kv);
  void ToKeyValue(KeyValueConfig& kv) const;

  bool operator==(const DcnnCafConfig&) const = default;
};

// Largest divisor of `width` that does not exceed `heads`.
int FitHeads(int heads, int width);

}  // namespace sscaf::model

#endif  // SSCAF_MODEL_CONFIG_H_
