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

#ifndef SSCAF_TRAINING_TRAINER_H_
#define SSCAF_TRAINING_TRAINER_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "sscaf/common/kv_config.h"
#include "sscaf/eval/metrics.h"
#include "sscaf/model/model.h"
#include "sscaf/training/dataset.h"

namespace sscaf::training {

struct TrainConfig {
  int batch_size = 64;
  double lr = 1e-3;
  int epochs = 100;
  uint64_t seed = 0;
  double w_ssc = 1.0;
  double w_arp = 1.0;
  // Evaluate on the validation set after every epoch (otherwise only after
  // the last one, which is then the selected epoch).
  bool eval_every_epoch = true;
  // Only float32 training is implemented.
  std::string precision = "float32";

  // Throws ConfigError on an invalid value.
  void Validate() const;
  static TrainConfig FromKeyValue(const KeyValueConfig& kv);
  void ToKeyValue(KeyValueConfig& kv) const;
};

struct EpochRecord {
  int epoch = 0;            // 1-based
  double train_loss = 0.0;  // sample-weighted mean joint loss over the epoch
  double train_bce = 0.0;
  double train_mse = 0.0;
  bool evaluated = false;   // validation metrics below are set
  double val_mae = 0.0;
  double val_rmse = 0.0;
  double val_auc = 0.0;
  double val_f1 = 0.0;
  double val_acc = 0.0;
  double selection = 0.0;  // val MAE + (1 - val AUC); lower is better
};

struct TrainResult {
  std::vector<EpochRecord> history;
  int best_epoch = 0;
};

struct Predictions {
  std::vector<double> probs;      // clips x n_classes
  std::vector<double> annoyance;  // raw regression output
};

// Inference-mode forward over the whole set in batches.
Predictions Predict(model::Model<float>& model, const FeatureSet& set, int batch_size = 64);

struct EvalMetrics {
  eval::SscMetrics ssc;
  eval::ArpMetrics arp;  // on predictions clamped to the rating scale
};

EvalMetrics Evaluate(const Predictions& predictions, const FeatureSet& set, int n_classes = kNumClasses);

// Model selection score: val MAE + (1 - val AUC), with an undefined AUC
// counted as 0.5.
double SelectionScore(const EvalMetrics& m);

using EpochCallback = std::function<void(const EpochRecord&)>;

// Adam on the joint loss w_ssc * BCE + w_arp * MSE with batches from
// MakeBatches(seed, epoch). With a non-empty validation set the parameters of
// the epoch with the lowest selection score (earliest on ties) are restored at
// the end; otherwise the last epoch is kept. Throws NumericError naming the
// epoch and batch if the loss or a gradient becomes non-finite.
TrainResult Train(model::Model<float>& model, const FeatureSet& train, const FeatureSet& val,
                  const TrainConfig& config, const EpochCallback& on_epoch = {});

// Header: epoch,train_loss,val_mae,val_rmse,val_auc,val_f1,val_acc
void WriteHistoryCsv(const std::vector<EpochRecord>& history, const std::filesystem::path& path);

}  // namespace sscaf::training

#endif  // SSCAF_TRAINING_TRAINER_H_
