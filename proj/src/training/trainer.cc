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

#include "sscaf/training/trainer.h"

#include <cmath>
#include <fstream>
#include <numeric>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "sscaf/autograd/adam.h"
#include "sscaf/autograd/ops.h"
#include "sscaf/common/error.h"

namespace sscaf::training {

void TrainConfig::Validate() const {
  if (batch_size < 1) throw ConfigError(fmt::format("train: batch_size must be >= 1, got {}", batch_size));
  if (epochs < 1) throw ConfigError(fmt::format("train: epochs must be >= 1, got {}", epochs));
  if (!(lr > 0.0) || !std::isfinite(lr)) throw ConfigError(fmt::format("train: lr must be positive, got {}", lr));
  if (!(w_ssc >= 0.0) || !(w_arp >= 0.0) || w_ssc + w_arp == 0.0) {
    throw ConfigError("train: loss weights must be non-negative and not both zero");
  }
  if (precision != "float32") {
    throw ConfigError(fmt::format("train: precision '{}' is not supported (only float32)", precision));
  }
}

TrainConfig TrainConfig::FromKeyValue(const KeyValueConfig& kv) {
  TrainConfig c;
  c.batch_size = kv.GetInt("train.batch_size", c.batch_size);
  c.lr = kv.GetDouble("train.lr", c.lr);
  c.epochs = kv.GetInt("train.epochs", c.epochs);
  const std::string seed = kv.GetString("train.seed", std::to_string(c.seed));
  try {
    std::size_t used = 0;
    c.seed = std::stoull(seed, &used);
    if (used != seed.size()) throw std::invalid_argument(seed);
  } catch (const std::exception&) {
    throw ConfigError(fmt::format("config key 'train.seed': '{}' is not an unsigned integer", seed));
  }
  c.w_ssc = kv.GetDouble("train.w_ssc", c.w_ssc);
  c.w_arp = kv.GetDouble("train.w_arp", c.w_arp);
  c.eval_every_epoch = kv.GetBool("train.eval_every_epoch", c.eval_every_epoch);
  c.precision = kv.GetString("train.precision", c.precision);
  c.Validate();
  return c;
}

void TrainConfig::ToKeyValue(KeyValueConfig& kv) const {
  kv.Set("train.batch_size", batch_size);
  kv.Set("train.lr", lr);
  kv.Set("train.epochs", epochs);
  kv.Set("train.seed", std::to_string(seed));
  kv.Set("train.w_ssc", w_ssc);
  kv.Set("train.w_arp", w_arp);
  kv.Set("train.eval_every_epoch", std::string(eval_every_epoch ? "true" : "false"));
  kv.Set("train.precision", precision);
}

Predictions Predict(model::Model<float>& model, const FeatureSet& set, int batch_size) {
  ag::NoGradGuard no_grad;
  Predictions p;
  std::vector<std::size_t> all(set.size());
  std::iota(all.begin(), all.end(), 0);
  for (std::size_t start = 0; start < all.size(); start += batch_size) {
    const std::size_t end = std::min(all.size(), start + static_cast<std::size_t>(batch_size));
    const Batch batch = AssembleBatch(set, std::span<const std::size_t>(all).subspan(start, end - start));
    const auto out = model.Forward(batch.mel, batch.rms, false);
    p.probs.insert(p.probs.end(), out.probs.data().begin(), out.probs.data().end());
    p.annoyance.insert(p.annoyance.end(), out.annoyance.data().begin(), out.annoyance.data().end());
  }
  return p;
}

EvalMetrics Evaluate(const Predictions& predictions, const FeatureSet& set, int n_classes) {
  EvalMetrics m;
  m.ssc = eval::ComputeSscMetrics(predictions.probs, set.FlatLabels(), n_classes);
  std::vector<double> clamped;
  for (const double y : predictions.annoyance) clamped.push_back(eval::ClampAnnoyance(y));
  m.arp = eval::ComputeArpMetrics(clamped, set.annoyance);
  return m;
}

double SelectionScore(const EvalMetrics& m) {
  const double auc = std::isnan(m.ssc.auc) ? 0.5 : m.ssc.auc;
  return m.arp.mae + (1.0 - auc);
}

TrainResult Train(model::Model<float>& model, const FeatureSet& train, const FeatureSet& val,
                  const TrainConfig& config, const EpochCallback& on_epoch) {
  config.Validate();
  if (train.size() == 0) throw InputError("train: the training set is empty");
  const auto& e = model.effective_config();
  if (e.n_frames != features::kNumFrames || e.n_mels != features::kNumMels || e.n_classes != kNumClasses) {
    throw ConfigError(fmt::format("train: model expects {}x{} inputs and {} classes; features are {}x{} with {}",
                                  e.n_frames, e.n_mels, e.n_classes, features::kNumFrames, features::kNumMels,
                                  kNumClasses));
  }
  ag::Adam<float> adam(model.TrainableTensors(), ag::AdamOptions{.lr = config.lr});
  auto params = model.Parameters();
  std::vector<std::vector<float>> best;
  TrainResult result;
  double best_score = 0.0;

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    const auto batches = MakeBatches(train.size(), config.batch_size, config.seed, epoch);
    EpochRecord rec;
    rec.epoch = epoch;
    for (std::size_t bi = 0; bi < batches.size(); ++bi) {
      const Batch batch = AssembleBatch(train, batches[bi]);
      const double weight = static_cast<double>(batches[bi].size()) / static_cast<double>(train.size());
      try {
        adam.ZeroGrad();
        const auto out = model.Forward(batch.mel, batch.rms, true);
        const auto bce = ag::BceLoss(out.probs, std::span<const float>(batch.y_source));
        const auto mse = ag::MseLoss(out.annoyance, std::span<const float>(batch.y_annoyance));
        const auto loss = ag::JointLoss(bce, mse, static_cast<float>(config.w_ssc), static_cast<float>(config.w_arp));
        if (!std::isfinite(loss.item())) throw NumericError("loss is not finite");
        loss.Backward();
        adam.Step();
        rec.train_loss += weight * loss.item();
        rec.train_bce += weight * bce.item();
        rec.train_mse += weight * mse.item();
      } catch (const NumericError& err) {
        throw NumericError(fmt::format("training aborted at epoch {} batch {}: {}", epoch, bi + 1, err.what()));
      }
    }
    adam.ZeroGrad();

    const bool last = epoch == config.epochs;
    if (val.size() > 0 && (config.eval_every_epoch || last)) {
      const EvalMetrics m = Evaluate(Predict(model, val), val);
      rec.evaluated = true;
      rec.val_mae = m.arp.mae;
      rec.val_rmse = m.arp.rmse;
      rec.val_auc = m.ssc.auc;
      rec.val_f1 = m.ssc.f_score;
      rec.val_acc = m.ssc.acc;
      rec.selection = SelectionScore(m);
      if (result.best_epoch == 0 || rec.selection < best_score) {
        best_score = rec.selection;
        result.best_epoch = epoch;
        best.clear();
        for (const auto& nt : params) best.push_back(nt.tensor.vec());
      }
    }
    spdlog::info("epoch {}/{}: loss {:.4f} (bce {:.4f}, mse {:.4f}){}", epoch, config.epochs, rec.train_loss,
                 rec.train_bce, rec.train_mse,
                 rec.evaluated ? fmt::format(" val mae {:.3f} auc {:.3f}", rec.val_mae, rec.val_auc) : "");
    result.history.push_back(rec);
    if (on_epoch) on_epoch(rec);
  }

  if (best.empty()) {
    result.best_epoch = config.epochs;
  } else {
    for (std::size_t i = 0; i < params.size(); ++i) {
      std::copy(best[i].begin(), best[i].end(), params[i].tensor.mutable_data().begin());
    }
  }
  return result;
}

void WriteHistoryCsv(const std::vector<EpochRecord>& history, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError(fmt::format("cannot write '{}'", path.string()));
  out << "epoch,train_loss,val_mae,val_rmse,val_auc,val_f1,val_acc\n";
  for (const EpochRecord& r : history) {
    if (r.evaluated) {
      out << fmt::format("{},{},{},{},{},{},{}\n", r.epoch, FormatDouble(r.train_loss), FormatDouble(r.val_mae),
                         FormatDouble(r.val_rmse), FormatDouble(r.val_auc), FormatDouble(r.val_f1),
                         FormatDouble(r.val_acc));
    } else {
      out << fmt::format("{},{},,,,,\n", r.epoch, FormatDouble(r.train_loss));
    }
  }
  if (!out) throw IoError(fmt::format("error writing '{}'", path.string()));
}

}  // namespace sscaf::training
