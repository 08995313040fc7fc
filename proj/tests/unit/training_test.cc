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

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <gtest/gtest.h>

#include "sscaf/audio/synth.h"
#include "sscaf/audio/wav.h"
#include "sscaf/autograd/adam.h"
#include "sscaf/autograd/ops.h"
#include "sscaf/common/error.h"
#include "sscaf/model/model.h"
#include "sscaf/training/checkpoint.h"
#include "sscaf/training/dataset.h"
#include "sscaf/training/tensor_archive.h"
#include "sscaf/training/trainer.h"
#include "test_util.h"

namespace sscaf::training {
namespace {

using model::BuildModel;
using model::DcnnCafConfig;
using model::ModelKind;

// A small synthetic feature set, built once per process.
const FeatureSet& SmallSet() {
  static const FeatureSet set = [] {
    const audio::SynthConfig config;
    std::vector<audio::ClipRecord> records;
    std::vector<audio::AudioClip> clips;
    for (auto& c : audio::GenerateSplit(config, 3, "train", 8)) {
      records.push_back(c.record);
      clips.push_back(std::move(c.audio));
    }
    return MakeFeatureSet(records, clips);
  }();
  return set;
}

std::vector<uint8_t> ReadBytes(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void WriteBytes(const std::filesystem::path& p, const std::vector<uint8_t>& bytes) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

// ------------------------------------------------------------- batching

TEST(MakeBatchesTest, SizesDeterminismAndPartition) {
  const auto batches = MakeBatches(10, 4, 7, 1);
  ASSERT_EQ(batches.size(), 3u);
  EXPECT_EQ(batches[0].size(), 4u);
  EXPECT_EQ(batches[1].size(), 4u);
  EXPECT_EQ(batches[2].size(), 2u);
  EXPECT_EQ(MakeBatches(10, 4, 7, 1), batches);
  EXPECT_NE(MakeBatches(10, 4, 7, 2), batches);
  EXPECT_NE(MakeBatches(10, 4, 8, 1), batches);
  std::multiset<std::size_t> seen;
  for (const auto& b : batches) seen.insert(b.begin(), b.end());
  EXPECT_EQ(seen.size(), 10u);
  for (std::size_t i = 0; i < 10; ++i) EXPECT_EQ(seen.count(i), 1u);
  EXPECT_THROW(MakeBatches(10, 0, 1, 1), ConfigError);
  EXPECT_TRUE(MakeBatches(0, 4, 1, 1).empty());
}

TEST(AssembleBatchTest, LayoutAndTargets) {
  const FeatureSet& set = SmallSet();
  const std::vector<std::size_t> idx = {5, 2};
  const Batch b = AssembleBatch(set, idx);
  EXPECT_EQ(b.mel.shape(), (ag::Shape{2, 1, 480, 64}));
  EXPECT_EQ(b.rms.shape(), (ag::Shape{2, 1, 480, 1}));
  EXPECT_EQ(b.mel.data()[480 * 64 + 3], set.features[2].mel[3]);
  EXPECT_EQ(b.rms.data()[17], set.features[5].rms[17]);
  EXPECT_EQ(b.y_annoyance[1], static_cast<float>(set.annoyance[2]));
  for (int k = 0; k < kNumClasses; ++k) EXPECT_EQ(b.y_source[kNumClasses + k], set.labels[2][k] ? 1.0f : 0.0f);
  EXPECT_THROW(AssembleBatch(set, std::vector<std::size_t>{99}), InputError);
}

// ------------------------------------------------------ feature loading

TEST(FeatureSetTest, LoadsManifestUsesCacheAndNamesMissingClips) {
  const auto dir = sscaf::testing::TempDir("feature_set");
  audio::DatasetManifest manifest;
  manifest.base_dir = dir;
  const audio::SynthConfig config;
  for (int i = 0; i < 3; ++i) {
    auto c = audio::GenerateClip(config, 11, fmt::format("c{}", i), fmt::format("c{}.wav", i));
    audio::WriteWav(c.audio, dir / c.record.path);
    manifest.records.push_back(c.record);
  }
  const FeatureSet fresh = LoadFeatureSet(manifest);
  const FeatureSet first = LoadFeatureSet(manifest, dir / "cache");
  EXPECT_TRUE(std::filesystem::exists(dir / "cache" / "c1.feat"));
  const FeatureSet cached = LoadFeatureSet(manifest, dir / "cache");
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(fresh.features[i], cached.features[i]);
    EXPECT_EQ(first.laeq_db[i], cached.laeq_db[i]);
    EXPECT_NEAR(fresh.laeq_db[i], cached.laeq_db[i], 1e-4);
  }
  EXPECT_EQ(cached.clip_ids, (std::vector<std::string>{"c0", "c1", "c2"}));

  manifest.records[1].path = "missing.wav";
  try {
    LoadFeatureSet(manifest);
    FAIL() << "expected an error";
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("c1"), std::string::npos) << e.what();
  }
}

TEST(FeatureSetTest, NonCanonicalRateIsResampled) {
  audio::AudioClip clip;
  clip.sample_rate = 8000;
  clip.samples.assign(8000 * 15, 0.25f);
  const ClipFeatures f = ComputeClipFeatures(clip);
  EXPECT_EQ(f.pair.rms.size(), 480u);
  EXPECT_NEAR(f.pair.rms[100], 0.25f, 1e-6);
}

// ------------------------------------------------------------- archives

TEST(TensorArchiveTest, RoundTripAndValidation) {
  const auto dir = sscaf::testing::TempDir("archive");
  TensorArchive a;
  a.meta = {{"content", "test"}, {"note", "two words"}};
  a.tensors.push_back({"w", {2, 3}, {1, 2, 3, 4, 5, -6.5f}});
  a.tensors.push_back({"s", {}, {std::numeric_limits<float>::denorm_min()}});
  WriteTensorArchive(a, dir / "a.bin");
  const auto bytes = ReadBytes(dir / "a.bin");
  EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 8), "DCAFCKPT");
  const TensorArchive b = ReadTensorArchive(dir / "a.bin");
  EXPECT_EQ(b.Meta("note"), "two words");
  EXPECT_EQ(b.Tensor("w").shape, (ag::Shape{2, 3}));
  EXPECT_EQ(b.Tensor("w").data, a.tensors[0].data);
  EXPECT_EQ(b.Tensor("s").data, a.tensors[1].data);
  EXPECT_THROW(b.Tensor("x"), LoadError);

  auto truncated = bytes;
  truncated.pop_back();
  WriteBytes(dir / "t.bin", truncated);
  EXPECT_THROW(ReadTensorArchive(dir / "t.bin"), LoadError);
  auto extended = bytes;
  extended.push_back(0);
  WriteBytes(dir / "e.bin", extended);
  EXPECT_THROW(ReadTensorArchive(dir / "e.bin"), LoadError);
  auto bad_magic = bytes;
  bad_magic[0] = 'X';
  WriteBytes(dir / "m.bin", bad_magic);
  EXPECT_THROW(ReadTensorArchive(dir / "m.bin"), LoadError);
  std::string text(bytes.begin(), bytes.end());
  text.replace(text.find("format_version=1"), 16, "format_version=9");
  WriteBytes(dir / "v.bin", std::vector<uint8_t>(text.begin(), text.end()));
  EXPECT_THROW(ReadTensorArchive(dir / "v.bin"), LoadError);
  EXPECT_THROW(ReadTensorArchive(dir / "absent.bin"), IoError);

  TensorArchive reserved;
  reserved.meta = {{"tensor", "x"}};
  EXPECT_THROW(WriteTensorArchive(reserved, dir / "r.bin"), InputError);
}

// ---------------------------------------------------------- checkpoints

TEST(CheckpointTest, RoundTripIsBitwise) {
  const auto dir = sscaf::testing::TempDir("checkpoint");
  for (const auto kind : {ModelKind::kDcnnCaf, ModelKind::kRmsOnly, ModelKind::kCnnTransformer}) {
    auto model = BuildModel<float>(kind, DcnnCafConfig::Tiny(), 4);
    const Batch batch = AssembleBatch(SmallSet(), std::vector<std::size_t>{0, 1, 2});
    model->Forward(batch.mel, batch.rms, true);  // moves the running statistics off their init
    const auto before = model->Forward(batch.mel, batch.rms, false);
    const auto path = dir / (model::ModelKindName(kind) + ".ckpt");
    SaveCheckpoint(*model, CheckpointInfo{3, 4, {{"val_mae", 1.25}}}, path);

    const TensorArchive archive = ReadTensorArchive(path);
    EXPECT_EQ(archive.tensors.size(), model->Parameters().size());

    const LoadedCheckpoint loaded = LoadCheckpoint(path);
    EXPECT_EQ(loaded.kind, kind);
    EXPECT_EQ(loaded.info.epoch, 3);
    EXPECT_EQ(loaded.info.metrics.at(0).second, 1.25);
    EXPECT_EQ(loaded.model->config(), model->config());
    const auto after = loaded.model->Forward(batch.mel, batch.rms, false);
    EXPECT_EQ(before.probs.vec(), after.probs.vec());
    EXPECT_EQ(before.annoyance.vec(), after.annoyance.vec());
  }
}

TEST(CheckpointTest, CorruptedOrMismatchedFilesAreRejected) {
  const auto dir = sscaf::testing::TempDir("checkpoint_bad");
  auto model = BuildModel<float>(ModelKind::kDcnnCaf, DcnnCafConfig::Tiny(), 4);
  SaveCheckpoint(*model, {}, dir / "m.ckpt");
  auto bytes = ReadBytes(dir / "m.ckpt");
  bytes.resize(bytes.size() / 2);
  WriteBytes(dir / "half.ckpt", bytes);
  EXPECT_THROW(LoadCheckpoint(dir / "half.ckpt"), LoadError);

  TensorArchive a = ReadTensorArchive(dir / "m.ckpt");
  TensorArchive dropped = a;
  dropped.tensors.pop_back();
  WriteTensorArchive(dropped, dir / "dropped.ckpt");
  EXPECT_THROW(LoadCheckpoint(dir / "dropped.ckpt"), LoadError);

  TensorArchive reshaped = a;
  reshaped.tensors[0].shape = {static_cast<int>(reshaped.tensors[0].data.size())};
  WriteTensorArchive(reshaped, dir / "reshaped.ckpt");
  EXPECT_THROW(LoadCheckpoint(dir / "reshaped.ckpt"), LoadError);

  TensorArchive ledger = a;
  for (auto& [k, v] : ledger.meta) {
    if (k == "ledger.mel_branch.repr") v = "(30, 64)";
  }
  WriteTensorArchive(ledger, dir / "ledger.ckpt");
  EXPECT_THROW(LoadCheckpoint(dir / "ledger.ckpt"), LoadError);

  TensorArchive features;
  features.meta = {{"content", "features"}};
  WriteTensorArchive(features, dir / "features.ckpt");
  EXPECT_THROW(LoadCheckpoint(dir / "features.ckpt"), LoadError);
}

// ------------------------------------------------------------- training

TEST(TrainConfigTest, ValidationAndKeyValueRoundTrip) {
  TrainConfig c;
  c.batch_size = 0;
  EXPECT_THROW(c.Validate(), ConfigError);
  c = TrainConfig();
  c.epochs = 0;
  EXPECT_THROW(c.Validate(), ConfigError);
  c = TrainConfig();
  c.precision = "float64";
  EXPECT_THROW(c.Validate(), ConfigError);
  c = TrainConfig();
  c.seed = 18446744073709551615ULL;
  c.lr = 3e-4;
  c.w_arp = 0.5;
  KeyValueConfig kv;
  c.ToKeyValue(kv);
  const TrainConfig back = TrainConfig::FromKeyValue(kv);
  EXPECT_EQ(back.seed, c.seed);
  EXPECT_EQ(back.lr, c.lr);
  EXPECT_EQ(back.w_arp, c.w_arp);
  EXPECT_EQ(back.batch_size, 64);
  EXPECT_EQ(back.epochs, 100);
}

TEST(TrainTest, OneAdamStepMovesEachParameterByAtMostTheLearningRate) {
  auto model = BuildModel<float>(ModelKind::kDcnnCaf, DcnnCafConfig::Tiny(), 1);
  std::vector<std::vector<float>> before;
  for (const auto& t : model->TrainableTensors()) before.push_back(t.vec());
  const Batch batch = AssembleBatch(SmallSet(), std::vector<std::size_t>{0, 1, 2, 3});
  const auto out = model->Forward(batch.mel, batch.rms, true);
  const auto loss = ag::JointLoss(ag::BceLoss(out.probs, std::span<const float>(batch.y_source)),
                                  ag::MseLoss(out.annoyance, std::span<const float>(batch.y_annoyance)));
  loss.Backward();
  const double lr = 1e-3;
  ag::Adam<float> adam(model->TrainableTensors(), {.lr = lr});
  adam.Step();
  const auto after = model->TrainableTensors();
  double max_step = 0.0;
  for (std::size_t i = 0; i < after.size(); ++i) {
    for (std::size_t j = 0; j < before[i].size(); ++j) {
      max_step = std::max(max_step, std::abs(double(after[i].vec()[j]) - double(before[i][j])));
    }
  }
  EXPECT_LE(max_step, lr * (1 + 1e-3));
  EXPECT_GT(max_step, lr * 0.5);
}

TEST(TrainTest, HistoryIsReproducibleAndBestEpochIsRestored) {
  const FeatureSet& set = SmallSet();
  const std::vector<std::size_t> tr = {0, 1, 2, 3, 4};
  const std::vector<std::size_t> va = {5, 6, 7};
  const FeatureSet train = set.Subset(tr);
  const FeatureSet val = set.Subset(va);
  TrainConfig config;
  config.epochs = 4;
  config.batch_size = 2;
  config.seed = 9;
  std::vector<TrainResult> results;
  std::vector<std::unique_ptr<model::Model<float>>> models;
  for (int run = 0; run < 2; ++run) {
    models.push_back(BuildModel<float>(ModelKind::kDcnnCaf, DcnnCafConfig::Tiny(), 2));
    int callbacks = 0;
    results.push_back(Train(*models.back(), train, val, config, [&](const EpochRecord&) { ++callbacks; }));
    EXPECT_EQ(callbacks, 4);
  }
  ASSERT_EQ(results[0].history.size(), 4u);
  for (std::size_t e = 0; e < 4; ++e) {
    const EpochRecord& a = results[0].history[e];
    const EpochRecord& b = results[1].history[e];
    EXPECT_EQ(a.train_loss, b.train_loss);
    EXPECT_EQ(a.val_mae, b.val_mae);
    EXPECT_EQ(a.val_auc, b.val_auc);
    EXPECT_TRUE(std::isfinite(a.train_loss));
  }
  EXPECT_LT(results[0].history.back().train_loss, results[0].history.front().train_loss);
  const auto pa = models[0]->Parameters();
  const auto pb = models[1]->Parameters();
  for (std::size_t i = 0; i < pa.size(); ++i) EXPECT_EQ(pa[i].tensor.vec(), pb[i].tensor.vec());

  // The restored parameters reproduce the selected epoch's validation metrics.
  const int best = results[0].best_epoch;
  ASSERT_GE(best, 1);
  const EpochRecord& chosen = results[0].history[best - 1];
  for (const auto& r : results[0].history) EXPECT_LE(chosen.selection, r.selection);
  const EvalMetrics m = Evaluate(Predict(*models[0], val), val);
  EXPECT_EQ(m.arp.mae, chosen.val_mae);
  EXPECT_EQ(m.ssc.auc, chosen.val_auc);

  const auto dir = sscaf::testing::TempDir("history");
  WriteHistoryCsv(results[0].history, dir / "history.csv");
  std::ifstream in(dir / "history.csv");
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "epoch,train_loss,val_mae,val_rmse,val_auc,val_f1,val_acc");
}

TEST(TrainTest, NonFiniteInputAbortsNamingEpochAndBatch) {
  FeatureSet set = SmallSet().Subset(std::vector<std::size_t>{0, 1, 2, 3});
  set.features[2].mel[10] = std::numeric_limits<float>::quiet_NaN();
  auto model = BuildModel<float>(ModelKind::kDcnnCaf, DcnnCafConfig::Tiny(), 1);
  TrainConfig config;
  config.epochs = 1;
  config.batch_size = 4;
  try {
    Train(*model, set, FeatureSet{}, config);
    FAIL() << "expected NumericError";
  } catch (const NumericError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("epoch 1"), std::string::npos) << msg;
    EXPECT_NE(msg.find("batch 1"), std::string::npos) << msg;
  }
}

TEST(TrainTest, RejectsIncompatibleModelAndEmptyData) {
  DcnnCafConfig small = DcnnCafConfig::Tiny();
  small.n_frames = 32;
  auto model = BuildModel<float>(ModelKind::kDcnnCaf, small, 1);
  EXPECT_THROW(Train(*model, SmallSet(), FeatureSet{}, TrainConfig{}), ConfigError);
  auto ok = BuildModel<float>(ModelKind::kDcnnCaf, DcnnCafConfig::Tiny(), 1);
  EXPECT_THROW(Train(*ok, FeatureSet{}, FeatureSet{}, TrainConfig{}), InputError);
}

}  // namespace
}  // namespace sscaf::training
