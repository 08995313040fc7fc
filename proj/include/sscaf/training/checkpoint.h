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

#ifndef SSCAF_TRAINING_CHECKPOINT_H_
#define SSCAF_TRAINING_CHECKPOINT_H_

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "sscaf/model/model.h"

namespace sscaf::training {

struct CheckpointInfo {
  int epoch = 0;
  uint64_t seed = 0;
  // Metrics snapshot, e.g. {"val_mae", 0.9}.
  std::vector<std::pair<std::string, double>> metrics;
};

// Stores the model kind, its nominal configuration, its shape ledger, `info`
// and every model tensor (batch-norm running statistics included).
void SaveCheckpoint(const model::Model<float>& model, const CheckpointInfo& info,
                    const std::filesystem::path& path);

struct LoadedCheckpoint {
  std::unique_ptr<model::Model<float>> model;
  model::ModelKind kind = model::ModelKind::kDcnnCaf;
  CheckpointInfo info;
};

// Rebuilds the model from the stored configuration and fills its tensors.
// Throws LoadError if the container is invalid or the stored tensors or
// shape ledger do not match the rebuilt model; nothing is returned then.
LoadedCheckpoint LoadCheckpoint(const std::filesystem::path& path);

}  // namespace sscaf::training

#endif  // SSCAF_TRAINING_CHECKPOINT_H_
