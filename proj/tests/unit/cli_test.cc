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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "sscaf/cli/cli.h"
#include "sscaf/common/kv_config.h"
#include "sscaf/common/labels.h"
#include "test_util.h"

namespace sscaf::cli {
namespace {

namespace fs = std::filesystem;

struct CliResult {
  int status = 0;
  std::string out;
  std::string err;
};

CliResult RunTool(std::vector<std::string> args) {
  args.insert(args.begin(), "sscaf");
  args.push_back("--log-level");
  args.push_back("warn");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  CliResult r;
  r.status = RunCli(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::vector<std::vector<std::string>> ReadCsv(const fs::path& path) {
  std::ifstream in(path);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) rows.push_back(SplitString(line, ','));
  }
  return rows;
}

std::set<std::string> ListTree(const fs::path& dir) {
  std::set<std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(dir)) files.insert(e.path().string());
  return files;
}

std::string MetricValue(const fs::path& metrics_csv, const std::string& name) {
  for (const auto& row : ReadCsv(metrics_csv)) {
    if (row.size() == 2 && row[0] == name) return row[1];
  }
  return "";
}

void WriteText(const fs::path& path, const std::string& text) {
  std::ofstream(path) << text;
}

// A tiny corpus and a one-epoch tiny model shared by the end-to-end tests.
class CliPipelineTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    root_ = new fs::path(testing::TempDir("cli_pipeline"));
    WriteText(*root_ / "synth.cfg", "synth.train_clips = 6\nsynth.val_clips = 3\nsynth.test_clips = 4\n");
    const auto synth = RunTool({"synth", "--config", (*root_ / "synth.cfg").string(), "--seed", "5", "--out-dir",
                            (*root_ / "data").string()});
    ASSERT_EQ(synth.status, 0) << synth.err;
    const auto train = RunTool({"train", "--train", Data("train.csv"), "--val", Data("val.csv"), "--tiny",
                            "--epochs", "1", "--batch-size", "4", "--seed", "2", "--out-dir", Dir("run")});
    ASSERT_EQ(train.status, 0) << train.err;
  }
  static void TearDownTestSuite() { delete root_; }

  static std::string Data(const std::string& name) { return (*root_ / "data" / name).string(); }
  static std::string Dir(const std::string& name) { return (*root_ / name).string(); }
  static std::string Checkpoint() { return Dir("run") + "/model.ckpt"; }

  static fs::path* root_;
};

fs::path* CliPipelineTest::root_ = nullptr;

TEST_F(CliPipelineTest, SynthAndTrainWriteTheirArtifacts) {
  for (const char* f : {"train.csv", "val.csv", "test.csv", "resolved_config.txt"}) {
    EXPECT_TRUE(fs::exists(Data(f))) << f;
  }
  EXPECT_TRUE(fs::is_directory(Data("noise/engine")));
  EXPECT_TRUE(fs::is_directory(Data("noise/water_drip")));
  for (const char* f : {"model.ckpt", "history.csv", "resolved_config.txt"}) {
    EXPECT_TRUE(fs::exists(Dir("run") + "/" + f)) << f;
  }
  const auto resolved = KeyValueConfig::Load(Dir("run") + "/resolved_config.txt");
  EXPECT_EQ(resolved.GetInt("train.epochs", 0), 1);
  EXPECT_EQ(resolved.GetInt("train.batch_size", 0), 4);
  EXPECT_TRUE(resolved.GetBool("model.tiny", false));
  EXPECT_EQ(resolved.GetString("model.kind", ""), "dcnn-caf");
  EXPECT_EQ(ReadCsv(Dir("run") + "/history.csv").size(), 2u);
}

TEST_F(CliPipelineTest, EvalFromCheckpointMatchesEvalFromPredictions) {
  const auto a = RunTool({"eval", "--checkpoint", Checkpoint(), "--manifest", Data("test.csv"), "--out-dir",
                      Dir("eval_ckpt"), "--cache-dir", Dir("run") + "/cache"});
  ASSERT_EQ(a.status, 0) << a.err;
  const fs::path metrics = Dir("eval_ckpt") + "/metrics.csv";
  EXPECT_EQ(MetricValue(metrics, "clips"), "4");
  const auto per_class = ReadCsv(Dir("eval_ckpt") + "/per_class_auc.csv");
  EXPECT_EQ(per_class.size(), static_cast<std::size_t>(kNumClasses) + 1);
  const auto preds = ReadCsv(Dir("eval_ckpt") + "/predictions.csv");
  ASSERT_EQ(preds.size(), 5u);
  EXPECT_EQ(preds[0].size(), static_cast<std::size_t>(kNumClasses) + 2);

  const auto b = RunTool({"eval", "--predictions", Dir("eval_ckpt") + "/predictions.csv", "--manifest",
                      Data("test.csv"), "--out-dir", Dir("eval_pred")});
  ASSERT_EQ(b.status, 0) << b.err;
  for (const char* m : {"auc", "f_score", "acc", "mae", "rmse"}) {
    EXPECT_EQ(MetricValue(metrics, m), MetricValue(Dir("eval_pred") + "/metrics.csv", m)) << m;
  }
}

TEST_F(CliPipelineTest, AnalyzeWritesTablesAndBaselines) {
  const auto r = RunTool({"analyze", "--checkpoint", Checkpoint(), "--manifest", Data("test.csv"), "--train-manifest",
                      Data("train.csv"), "--out-dir", Dir("analyze"), "--cache-dir", Dir("run") + "/cache"});
  ASSERT_EQ(r.status, 0) << r.err;
  for (const char* f : {"table5.csv", "table5.txt", "level_baselines.csv", "level_correlation.csv"}) {
    EXPECT_TRUE(fs::exists(Dir("analyze") + "/" + f)) << f;
  }
  const auto baselines = ReadCsv(Dir("analyze") + "/level_baselines.csv");
  ASSERT_EQ(baselines.size(), 3u);
  EXPECT_EQ(baselines[1][0], "linear");
  EXPECT_NE(r.out.find("Kendall tau"), std::string::npos);
}

TEST_F(CliPipelineTest, MixWithoutNoiseChangesNothing) {
  const auto r = RunTool({"mix", "--checkpoint", Checkpoint(), "--manifest", Data("test.csv"), "--noise-dir",
                      Data("noise"), "--sources", "engine,water_drip", "--snr-db", "inf", "--no-audio",
                      "--out-dir", Dir("mix_inf")});
  ASSERT_EQ(r.status, 0) << r.err;
  const auto summary = ReadCsv(Dir("mix_inf") + "/mix_summary.csv");
  ASSERT_EQ(summary.size(), 3u);
  for (std::size_t i = 1; i < summary.size(); ++i) {
    EXPECT_EQ(summary[i][3], summary[i][4]);
    EXPECT_EQ(std::stod(summary[i][5]), 0.0);
  }
  EXPECT_FALSE(fs::exists(Dir("mix_inf") + "/mixed"));
}

TEST_F(CliPipelineTest, MixWritesMixedClipsAndManifests) {
  const auto r = RunTool({"mix", "--checkpoint", Checkpoint(), "--manifest", Data("test.csv"), "--noise-dir",
                      Data("noise"), "--sources", "engine", "--snr-db", "0", "--seed", "4", "--out-dir",
                      Dir("mix_0")});
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_EQ(ReadCsv(Dir("mix_0") + "/mix_predictions.csv").size(), 5u);
  EXPECT_EQ(ReadCsv(Dir("mix_0") + "/mixed/engine/manifest.csv").size(), 5u);
  EXPECT_TRUE(fs::exists(Dir("mix_0") + "/mixed/engine/test_0000.wav"));
  // The mixed set is a valid input to the other subcommands.
  const auto e = RunTool({"eval", "--checkpoint", Checkpoint(), "--manifest", Dir("mix_0") + "/mixed/engine/manifest.csv",
                      "--out-dir", Dir("mix_0_eval"), "--no-cache"});
  EXPECT_EQ(e.status, 0) << e.err;
}

TEST_F(CliPipelineTest, PredictWritesNormalisedAttentionMaps) {
  const auto r = RunTool({"predict", "--checkpoint", Checkpoint(), "--wav", Data("audio/test/test_0000.wav"),
                      "--attention", "--out-dir", Dir("predict")});
  ASSERT_EQ(r.status, 0) << r.err;
  const auto pred = ReadCsv(Dir("predict") + "/prediction.csv");
  ASSERT_EQ(pred.size(), 2u);
  EXPECT_EQ(pred[1][0], "test_0000");
  int maps = 0;
  for (const char* block : {"mha1", "mha2"}) {
    for (int h = 0;; ++h) {
      const fs::path path = fs::path(Dir("predict")) / ("attention_" + std::string(block) + "_head" +
                                                       std::to_string(h) + ".csv");
      if (!fs::exists(path)) break;
      ++maps;
      const auto rows = ReadCsv(path);
      ASSERT_FALSE(rows.empty());
      for (const auto& row : rows) {
        EXPECT_EQ(row.size(), rows.size());
        double sum = 0.0;
        for (const auto& v : row) sum += std::stod(v);
        EXPECT_NEAR(sum, 1.0, 1e-5);
      }
    }
  }
  EXPECT_GT(maps, 0);
  EXPECT_EQ(maps % 2, 0);
}

TEST_F(CliPipelineTest, CommandsWriteOnlyInsideTheirOutputDirectory) {
  const auto before = ListTree(*root_ / "data");
  const auto r = RunTool({"eval", "--checkpoint", Checkpoint(), "--manifest", Data("test.csv"), "--out-dir",
                      Dir("contained")});
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_EQ(ListTree(*root_ / "data"), before);
  EXPECT_TRUE(fs::exists(Dir("contained") + "/cache"));
  EXPECT_TRUE(fs::exists(Dir("contained") + "/resolved_config.txt"));
}

TEST_F(CliPipelineTest, FlagsOverrideTheSettingsFile) {
  const fs::path cfg = *root_ / "train.cfg";
  WriteText(cfg, "data.train = " + Data("train.csv") + "\nmodel.kind = rms-only\nmodel.tiny = true\n" +
                     "train.epochs = 7\ntrain.lr = 0.01\n");
  const auto r = RunTool({"train", "--config", cfg.string(), "--epochs", "1", "--out-dir", Dir("override"),
                      "--cache-dir", Dir("run") + "/cache"});
  ASSERT_EQ(r.status, 0) << r.err;
  const auto resolved = KeyValueConfig::Load(Dir("override") + "/resolved_config.txt");
  EXPECT_EQ(resolved.GetInt("train.epochs", 0), 1);
  EXPECT_DOUBLE_EQ(resolved.GetDouble("train.lr", 0.0), 0.01);
  EXPECT_EQ(resolved.GetString("model.kind", ""), "rms-only");
}

TEST(CliErrorTest, FailuresAreOneLineWithNonzeroStatus) {
  const fs::path dir = testing::TempDir("cli_errors");
  const std::vector<std::vector<std::string>> cases = {
      {"train", "--out-dir", (dir / "a").string()},
      {"train", "--train", (dir / "missing.csv").string(), "--out-dir", (dir / "b").string()},
      {"train", "--train", (dir / "missing.csv").string(), "--model", "lstm", "--out-dir", (dir / "c").string()},
      {"eval", "--predictions", (dir / "p.csv").string(), "--manifest", (dir / "m.csv").string(), "--out-dir",
       (dir / "d").string()},
      {"mix", "--checkpoint", (dir / "x.ckpt").string(), "--manifest", (dir / "m.csv").string(), "--noise-dir",
       dir.string(), "--sources", "engine", "--snr-db", "loud", "--out-dir", (dir / "e").string()},
  };
  for (const auto& args : cases) {
    const auto r = RunTool(args);
    EXPECT_NE(r.status, 0) << args[0];
    EXPECT_EQ(r.err.rfind("sscaf: error: ", 0), 0u) << r.err;
    EXPECT_EQ(r.err.find('\n'), r.err.size() - 1) << r.err;
  }
}

TEST(CliErrorTest, UsageErrorsAreRejected) {
  EXPECT_NE(RunTool({}).status, 0);
  EXPECT_NE(RunTool({"frobnicate"}).status, 0);
  EXPECT_NE(RunTool({"eval", "--manifest", "m.csv", "--out-dir", "x"}).status, 0);
  EXPECT_NE(RunTool({"predict", "--wav", "a.wav"}).status, 0);
}

}  // namespace
}  // namespace sscaf::cli
