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

#include "sscaf/cli/cli.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "sscaf/audio/manifest.h"
#include "sscaf/audio/mix.h"
#include "sscaf/audio/resample.h"
#include "sscaf/audio/synth.h"
#include "sscaf/audio/wav.h"
#include "sscaf/common/error.h"
#include "sscaf/common/kv_config.h"
#include "sscaf/common/labels.h"
#include "sscaf/common/parallel.h"
#include "sscaf/eval/analysis.h"
#include "sscaf/eval/metrics.h"
#include "sscaf/eval/stats.h"
#include "sscaf/model/config.h"
#include "sscaf/model/model.h"
#include "sscaf/training/checkpoint.h"
#include "sscaf/training/dataset.h"
#include "sscaf/training/experiments.h"
#include "sscaf/training/trainer.h"

namespace sscaf::cli {
namespace {

namespace fs = std::filesystem;

constexpr const char* kResolvedConfigFile = "resolved_config.txt";

// Settings file merged first; flags given on the command line override it.
KeyValueConfig LoadBaseConfig(const std::string& path) {
  if (path.empty()) return {};
  return KeyValueConfig::Load(path);
}

void PrepareOutDir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError(fmt::format("cannot create output directory '{}': {}", dir.string(), ec.message()));
}

std::ofstream OpenOutput(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError(fmt::format("cannot write '{}'", path.string()));
  return out;
}

void CloseOutput(std::ofstream& out, const fs::path& path) {
  out.close();
  if (!out) throw IoError(fmt::format("error writing '{}'", path.string()));
}

std::string OptionalValue(const std::optional<double>& v) { return v ? FormatDouble(*v) : "n/a"; }

double ParseSnr(const std::string& text) {
  const std::string t = Trim(text);
  if (t == "inf" || t == "+inf" || t == "none") return audio::kNoNoiseSnr;
  try {
    std::size_t used = 0;
    const double v = std::stod(t, &used);
    if (used == t.size() && std::isfinite(v)) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError(fmt::format("invalid SNR '{}': expected a number of dB or 'inf'", text));
}

// A set carrying only the ground truth of a manifest, for scoring stored
// predictions without computing features.
training::FeatureSet GroundTruth(const audio::DatasetManifest& manifest) {
  training::FeatureSet set;
  for (const auto& r : manifest.records) {
    set.clip_ids.push_back(r.clip_id);
    set.labels.push_back(r.labels);
    set.annoyance.push_back(r.annoyance);
  }
  return set;
}

std::optional<fs::path> CacheDir(const std::string& flag, bool disabled, const fs::path& out_dir) {
  if (disabled) return std::nullopt;
  if (!flag.empty()) return fs::path(flag);
  return out_dir / "cache";
}

training::Predictions PredictionsFor(const std::string& checkpoint, const std::string& predictions_csv,
                                     const training::FeatureSet& set) {
  if (!predictions_csv.empty()) return training::ReadPredictionsCsv(predictions_csv, set.clip_ids);
  auto loaded = training::LoadCheckpoint(checkpoint);
  return training::Predict(*loaded.model, set);
}

void WriteMetrics(const training::EvalMetrics& m, std::size_t n_clips, const fs::path& dir) {
  {
    const fs::path path = dir / "metrics.csv";
    auto out = OpenOutput(path);
    out << "metric,value\n";
    out << "clips," << n_clips << '\n';
    out << "auc," << FormatDouble(m.ssc.auc) << '\n';
    out << "f_score," << FormatDouble(m.ssc.f_score) << '\n';
    out << "acc," << FormatDouble(m.ssc.acc) << '\n';
    out << "mae," << FormatDouble(m.arp.mae) << '\n';
    out << "rmse," << FormatDouble(m.arp.rmse) << '\n';
    out << "auc_skipped_classes," << m.ssc.auc_skipped.size() << '\n';
    CloseOutput(out, path);
  }
  const fs::path path = dir / "per_class_auc.csv";
  auto out = OpenOutput(path);
  out << "class,auc\n";
  for (int k = 0; k < kNumClasses; ++k) {
    const bool known = k < static_cast<int>(m.ssc.class_auc.size());
    out << kClassNames[k] << ',' << (known ? OptionalValue(m.ssc.class_auc[k]) : "n/a") << '\n';
  }
  CloseOutput(out, path);
}

// ---------------------------------------------------------------- synth

struct SynthArgs {
  std::string config;
  uint64_t seed = 0;
  std::string out_dir;
};

void RunSynth(const SynthArgs& a, const CLI::App& cmd, std::ostream& out) {
  KeyValueConfig kv = LoadBaseConfig(a.config);
  if (cmd.count("--seed") > 0) kv.Set("synth.seed", std::to_string(a.seed));
  const uint64_t seed = std::stoull(kv.GetString("synth.seed", "0"));
  const auto config = audio::SynthConfig::FromKeyValue(kv);
  const fs::path dir = a.out_dir;
  PrepareOutDir(dir);
  const auto dataset = audio::WriteSyntheticDataset(config, seed, dir);
  KeyValueConfig resolved;
  config.ToKeyValue(resolved);
  resolved.Set("synth.seed", std::to_string(seed));
  resolved.Save(dir / kResolvedConfigFile);
  out << fmt::format("wrote {} train, {} val and {} test clips to {}\n", dataset.train.records.size(),
                     dataset.val.records.size(), dataset.test.records.size(), dir.string());
}

// ---------------------------------------------------------------- extract

struct ExtractArgs {
  std::string manifest;
  std::string out_dir;
};

void RunExtract(const ExtractArgs& a, std::ostream& out) {
  const fs::path dir = a.out_dir;
  PrepareOutDir(dir);
  const auto manifest = audio::LoadManifest(a.manifest);
  const auto set = training::LoadFeatureSet(manifest, dir / "cache");
  const fs::path path = dir / "levels.csv";
  auto csv = OpenOutput(path);
  csv << "clip_id,laeq_db,annoyance\n";
  for (std::size_t i = 0; i < set.size(); ++i) {
    csv << set.clip_ids[i] << ',' << FormatDouble(set.laeq_db[i]) << ',' << FormatDouble(set.annoyance[i])
        << '\n';
  }
  CloseOutput(csv, path);
  KeyValueConfig resolved;
  resolved.Set("data.manifest", a.manifest);
  resolved.Save(dir / kResolvedConfigFile);
  out << fmt::format("extracted features for {} clips into {}\n", set.size(), (dir / "cache").string());
}

// ---------------------------------------------------------------- train

struct TrainArgs {
  std::string config;
  std::string train;
  std::string val;
  std::string model;
  bool tiny = false;
  int epochs = 0;
  int batch_size = 0;
  double lr = 0.0;
  uint64_t seed = 0;
  std::string out_dir;
  std::string cache_dir;
  bool no_cache = false;
};

void RunTrain(const TrainArgs& a, const CLI::App& cmd, std::ostream& out) {
  KeyValueConfig kv = LoadBaseConfig(a.config);
  if (cmd.count("--train") > 0) kv.Set("data.train", a.train);
  if (cmd.count("--val") > 0) kv.Set("data.val", a.val);
  if (cmd.count("--model") > 0) kv.Set("model.kind", a.model);
  if (cmd.count("--tiny") > 0) kv.Set("model.tiny", std::string("true"));
  if (cmd.count("--epochs") > 0) kv.Set("train.epochs", a.epochs);
  if (cmd.count("--batch-size") > 0) kv.Set("train.batch_size", a.batch_size);
  if (cmd.count("--lr") > 0) kv.Set("train.lr", a.lr);
  if (cmd.count("--seed") > 0) kv.Set("train.seed", std::to_string(a.seed));

  const std::string train_path = kv.GetString("data.train", "");
  if (train_path.empty()) throw ConfigError("no training manifest: pass --train or set data.train");
  const std::string val_path = kv.GetString("data.val", "");
  const auto kind = model::ParseModelKind(kv.GetString("model.kind", "dcnn-caf"));
  const auto model_config = model::DcnnCafConfig::FromKeyValue(kv);
  model_config.Effective().Validate();
  const auto train_config = training::TrainConfig::FromKeyValue(kv);
  train_config.Validate();

  const fs::path dir = a.out_dir;
  PrepareOutDir(dir);
  KeyValueConfig resolved;
  resolved.Set("data.train", train_path);
  resolved.Set("data.val", val_path);
  resolved.Set("model.kind", std::string(model::ModelKindName(kind)));
  model_config.ToKeyValue(resolved);
  train_config.ToKeyValue(resolved);
  resolved.Save(dir / kResolvedConfigFile);

  const auto cache = CacheDir(a.cache_dir, a.no_cache, dir);
  const auto train_set = training::LoadFeatureSet(audio::LoadManifest(train_path), cache);
  training::FeatureSet val_set;
  if (!val_path.empty()) val_set = training::LoadFeatureSet(audio::LoadManifest(val_path), cache);

  auto model = model::BuildModel<float>(kind, model_config, train_config.seed);
  out << fmt::format("training {} ({} trainable parameters) on {} clips\n", model::ModelKindName(kind),
                     model->NumTrainableParameters(), train_set.size());
  const auto result = training::Train(*model, train_set, val_set, train_config);
  training::WriteHistoryCsv(result.history, dir / "history.csv");

  training::CheckpointInfo info;
  info.epoch = result.best_epoch;
  info.seed = train_config.seed;
  for (const auto& e : result.history) {
    if (e.epoch != result.best_epoch) continue;
    info.metrics.push_back({"train_loss", e.train_loss});
    if (e.evaluated) {
      info.metrics.push_back({"val_mae", e.val_mae});
      info.metrics.push_back({"val_auc", e.val_auc});
    }
  }
  training::SaveCheckpoint(*model, info, dir / "model.ckpt");
  out << fmt::format("kept epoch {}; wrote {}\n", result.best_epoch, (dir / "model.ckpt").string());
}

// ---------------------------------------------------------------- eval

struct EvalArgs {
  std::string checkpoint;
  std::string predictions;
  std::string manifest;
  std::string out_dir;
  std::string cache_dir;
  bool no_cache = false;
};

void RunEval(const EvalArgs& a, std::ostream& out) {
  const fs::path dir = a.out_dir;
  PrepareOutDir(dir);
  const auto manifest = audio::LoadManifest(a.manifest);
  training::FeatureSet set;
  training::Predictions predictions;
  if (!a.predictions.empty()) {
    set = GroundTruth(manifest);
    predictions = training::ReadPredictionsCsv(a.predictions, set.clip_ids);
  } else {
    set = training::LoadFeatureSet(manifest, CacheDir(a.cache_dir, a.no_cache, dir));
    predictions = PredictionsFor(a.checkpoint, "", set);
  }
  const auto metrics = training::Evaluate(predictions, set);
  training::WritePredictionsCsv(set.clip_ids, predictions, dir / "predictions.csv");
  WriteMetrics(metrics, set.size(), dir);
  KeyValueConfig resolved;
  resolved.Set("data.manifest", a.manifest);
  resolved.Set(a.predictions.empty() ? "eval.checkpoint" : "eval.predictions",
               a.predictions.empty() ? a.checkpoint : a.predictions);
  resolved.Save(dir / kResolvedConfigFile);
  out << fmt::format("clips {}  AUC {:.4f}  F1 {:.4f}  ACC {:.4f}  MAE {:.4f}  RMSE {:.4f}\n", set.size(),
                     metrics.ssc.auc, metrics.ssc.f_score, metrics.ssc.acc, metrics.arp.mae, metrics.arp.rmse);
}

// ---------------------------------------------------------------- analyze

struct AnalyzeArgs {
  std::string checkpoint;
  std::string predictions;
  std::string manifest;
  std::string train_manifest;
  std::string out_dir;
  std::string cache_dir;
  bool no_cache = false;
};

void RunAnalyze(const AnalyzeArgs& a, std::ostream& out) {
  const fs::path dir = a.out_dir;
  PrepareOutDir(dir);
  const auto cache = CacheDir(a.cache_dir, a.no_cache, dir);
  const auto set = training::LoadFeatureSet(audio::LoadManifest(a.manifest), cache);
  const auto predictions = PredictionsFor(a.checkpoint, a.predictions, set);

  const auto report = eval::MakeTable5Report(predictions.probs, predictions.annoyance, set.labels,
                                             set.annoyance, set.laeq_db);
  eval::WriteTable5Csv(report, dir / "table5.csv");
  const std::string table = eval::FormatTable5(report);
  {
    const fs::path path = dir / "table5.txt";
    auto txt = OpenOutput(path);
    txt << table;
    CloseOutput(txt, path);
  }
  out << table;

  const auto tau = eval::KendallTau(set.laeq_db, set.annoyance);
  {
    const fs::path path = dir / "level_correlation.csv";
    auto csv = OpenOutput(path);
    csv << "statistic,value,p,n\n";
    csv << "kendall_tau_laeq_annoyance," << (tau.defined ? FormatDouble(tau.r) : "n/a") << ','
        << (tau.defined ? FormatDouble(tau.p) : "n/a") << ',' << tau.n << '\n';
    CloseOutput(csv, path);
  }
  out << fmt::format("Kendall tau between L_Aeq and annoyance: {}\n", eval::FormatCorrelation(tau));

  KeyValueConfig resolved;
  resolved.Set("data.manifest", a.manifest);
  if (!a.train_manifest.empty()) {
    const auto train = training::LoadFeatureSet(audio::LoadManifest(a.train_manifest), cache);
    const auto baselines =
        eval::EvaluateLevelBaselines(train.laeq_db, train.annoyance, set.laeq_db, set.annoyance);
    const fs::path path = dir / "level_baselines.csv";
    auto csv = OpenOutput(path);
    csv << "method,mae,rmse,slope,intercept\n";
    csv << "linear," << FormatDouble(baselines.linear.mae) << ',' << FormatDouble(baselines.linear.rmse) << ','
        << FormatDouble(baselines.fit.slope) << ',' << FormatDouble(baselines.fit.intercept) << '\n';
    csv << "knn" << eval::kDefaultKnnNeighbours << ',' << FormatDouble(baselines.knn.mae) << ','
        << FormatDouble(baselines.knn.rmse) << ",,\n";
    CloseOutput(csv, path);
    resolved.Set("data.train_manifest", a.train_manifest);
    out << fmt::format("level-only baselines: linear MAE {:.4f}, {}-NN MAE {:.4f}\n", baselines.linear.mae,
                       eval::kDefaultKnnNeighbours, baselines.knn.mae);
  }
  resolved.Save(dir / kResolvedConfigFile);
}

// ---------------------------------------------------------------- mix

struct MixArgs {
  std::string checkpoint;
  std::string manifest;
  std::string noise_dir;
  std::vector<std::string> sources;
  std::string snr_db = "0";
  uint64_t seed = 0;
  std::string out_dir;
  bool no_audio = false;
};

std::vector<audio::AudioClip> LoadNoisePool(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".wav") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw InputError(fmt::format("noise directory '{}' has no .wav files", dir.string()));
  std::vector<audio::AudioClip> pool;
  for (const auto& f : files) pool.push_back(audio::Resample(audio::LoadWav(f), kCanonicalSampleRate));
  return pool;
}

double Mean(const std::vector<double>& v) {
  double s = 0.0;
  for (const double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

void RunMix(const MixArgs& a, std::ostream& out) {
  const double snr = ParseSnr(a.snr_db);
  const fs::path noise_dir = a.noise_dir;
  std::vector<std::string> sources = a.sources;
  if (sources.empty()) {
    if (!fs::is_directory(noise_dir)) throw InputError(fmt::format("'{}' is not a directory", a.noise_dir));
    for (const auto& entry : fs::directory_iterator(noise_dir)) {
      if (entry.is_directory()) sources.push_back(entry.path().filename().string());
    }
    std::sort(sources.begin(), sources.end());
    if (sources.empty()) throw InputError(fmt::format("'{}' has no per-source subdirectories", a.noise_dir));
  }
  const fs::path dir = a.out_dir;
  PrepareOutDir(dir);

  const auto manifest = audio::LoadManifest(a.manifest);
  std::vector<audio::AudioClip> clips(manifest.records.size());
  std::vector<std::string> ids;
  for (const auto& r : manifest.records) ids.push_back(r.clip_id);
  ParallelFor(clips.size(), [&](std::size_t i) {
    clips[i] = audio::Resample(audio::LoadWav(audio::ResolveClipPath(manifest, manifest.records[i])),
                               kCanonicalSampleRate);
  });
  auto loaded = training::LoadCheckpoint(a.checkpoint);
  const auto clean = training::Predict(*loaded.model, training::MakeFeatureSet(manifest.records, clips));
  const double mean_clean = Mean(clean.annoyance);

  const fs::path summary_path = dir / "mix_summary.csv";
  auto summary = OpenOutput(summary_path);
  summary << "source,snr_db,clips,mean_clean,mean_mixed,delta\n";
  const fs::path detail_path = dir / "mix_predictions.csv";
  auto detail = OpenOutput(detail_path);
  detail << "source,clip_id,clean,mixed\n";
  for (const auto& source : sources) {
    const auto pool = LoadNoisePool(noise_dir / source);
    const auto mixed = training::MixIntoClips(clips, ids, pool, snr, a.seed);
    const auto pred = training::Predict(*loaded.model, training::MakeFeatureSet(manifest.records, mixed));
    const double mean_mixed = Mean(pred.annoyance);
    summary << source << ',' << FormatDouble(snr) << ',' << clips.size() << ',' << FormatDouble(mean_clean)
            << ',' << FormatDouble(mean_mixed) << ',' << FormatDouble(mean_mixed - mean_clean) << '\n';
    for (std::size_t i = 0; i < ids.size(); ++i) {
      detail << source << ',' << ids[i] << ',' << FormatDouble(clean.annoyance[i]) << ','
             << FormatDouble(pred.annoyance[i]) << '\n';
    }
    if (!a.no_audio) {
      const fs::path source_dir = dir / "mixed" / source;
      PrepareOutDir(source_dir);
      audio::DatasetManifest mixed_manifest;
      mixed_manifest.split = source;
      for (std::size_t i = 0; i < ids.size(); ++i) {
        audio::ClipRecord r = manifest.records[i];
        r.path = ids[i] + ".wav";
        audio::WriteWav(mixed[i], source_dir / r.path);
        mixed_manifest.records.push_back(r);
      }
      audio::SaveManifest(mixed_manifest, source_dir / "manifest.csv");
    }
    out << fmt::format("{:>16}  mean annoyance {:.4f} -> {:.4f} ({:+.4f})\n", source, mean_clean, mean_mixed,
                       mean_mixed - mean_clean);
  }
  CloseOutput(summary, summary_path);
  CloseOutput(detail, detail_path);

  KeyValueConfig resolved;
  resolved.Set("mix.checkpoint", a.checkpoint);
  resolved.Set("mix.manifest", a.manifest);
  resolved.Set("mix.noise_dir", a.noise_dir);
  std::string joined;
  for (const auto& s : sources) joined += (joined.empty() ? "" : ",") + s;
  resolved.Set("mix.sources", joined);
  resolved.Set("mix.snr_db", std::isinf(snr) ? std::string("inf") : FormatDouble(snr));
  resolved.Set("mix.seed", std::to_string(a.seed));
  resolved.Save(dir / kResolvedConfigFile);
}

// ---------------------------------------------------------------- predict

struct PredictArgs {
  std::string checkpoint;
  std::string wav;
  std::string out_dir;
  bool attention = false;
};

void WriteAttention(const ag::Tensor<float>& att, const std::string& tag, const fs::path& dir) {
  const int heads = att.dim(1);
  const int rows = att.dim(2);
  const int cols = att.dim(3);
  const auto data = att.data();
  for (int h = 0; h < heads; ++h) {
    const fs::path path = dir / fmt::format("attention_{}_head{}.csv", tag, h);
    auto csv = OpenOutput(path);
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) {
        if (c > 0) csv << ',';
        csv << FormatDouble(data[(static_cast<std::size_t>(h) * rows + r) * cols + c]);
      }
      csv << '\n';
    }
    CloseOutput(csv, path);
  }
}

void RunPredict(const PredictArgs& a, std::ostream& out) {
  const fs::path dir = a.out_dir;
  auto loaded = training::LoadCheckpoint(a.checkpoint);
  if (a.attention && loaded.kind != model::ModelKind::kDcnnCaf) {
    throw InputError(fmt::format("model '{}' has no cross-attention maps", model::ModelKindName(loaded.kind)));
  }
  audio::ClipRecord record;
  record.clip_id = fs::path(a.wav).stem().string();
  const std::vector<audio::ClipRecord> records{record};
  const std::vector<audio::AudioClip> clips{audio::LoadWav(a.wav)};
  const auto set = training::MakeFeatureSet(records, clips);
  PrepareOutDir(dir);

  const std::vector<std::size_t> index{0};
  const auto batch = training::AssembleBatch(set, index);
  ag::NoGradGuard no_grad;
  const auto output = loaded.model->Forward(batch.mel, batch.rms, /*training=*/false);
  training::Predictions p;
  for (const float v : output.probs.data()) p.probs.push_back(v);
  p.annoyance.push_back(output.annoyance.data()[0]);
  training::WritePredictionsCsv(set.clip_ids, p, dir / "prediction.csv");
  if (a.attention) {
    WriteAttention(output.attention1, "mha1", dir);
    WriteAttention(output.attention2, "mha2", dir);
  }
  KeyValueConfig resolved;
  resolved.Set("predict.checkpoint", a.checkpoint);
  resolved.Set("predict.wav", a.wav);
  resolved.Save(dir / kResolvedConfigFile);

  out << fmt::format("{}: annoyance {:.3f} (L_Aeq {:.1f} dBFS)\n", record.clip_id, p.annoyance[0],
                     set.laeq_db[0]);
  std::vector<int> order(kNumClasses);
  for (int k = 0; k < kNumClasses; ++k) order[k] = k;
  std::stable_sort(order.begin(), order.end(), [&](int x, int y) { return p.probs[x] > p.probs[y]; });
  for (int i = 0; i < 5; ++i) {
    out << fmt::format("  {:<20} {:.3f}\n", kClassDisplayNames[order[i]], p.probs[order[i]]);
  }
}

void AddCacheOptions(CLI::App* cmd, std::string& cache_dir, bool& no_cache) {
  cmd->add_option("--cache-dir", cache_dir, "Feature cache directory (default: <out-dir>/cache)");
  cmd->add_flag("--no-cache", no_cache, "Recompute features without caching them");
}

}  // namespace

int RunCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Joint sound-source classification and annoyance rating prediction", "sscaf"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", "sscaf 0.1.0");
  std::string log_level = "info";
  app.add_option("--log-level", log_level, "trace, debug, info, warn, error or off")
      ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "off"}));

  std::function<void()> action;

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "Generate the synthetic corpus, noise bank and manifests");
  synth_cmd->add_option("--config", synth.config, "Settings file (synth.* keys)");
  synth_cmd->add_option("--seed", synth.seed, "Corpus seed");
  synth_cmd->add_option("--out-dir", synth.out_dir, "Output directory")->required();
  synth_cmd->callback([&] { action = [&] { RunSynth(synth, *synth_cmd, out); }; });

  ExtractArgs extract;
  auto* extract_cmd = app.add_subcommand("extract", "Compute and cache features and A-weighted levels");
  extract_cmd->add_option("--manifest", extract.manifest, "Clip manifest (CSV)")->required();
  extract_cmd->add_option("--out-dir", extract.out_dir, "Output directory")->required();
  extract_cmd->callback([&] { action = [&] { RunExtract(extract, out); }; });

  TrainArgs train;
  auto* train_cmd = app.add_subcommand("train", "Train a model and save its best checkpoint");
  train_cmd->add_option("--config", train.config, "Settings file (data.*, model.*, train.* keys)");
  train_cmd->add_option("--train", train.train, "Training manifest");
  train_cmd->add_option("--val", train.val, "Validation manifest used for model selection");
  train_cmd->add_option("--model", train.model, "dcnn-caf, mel-only, rms-only, dnn, cnn or cnn-transformer");
  train_cmd->add_flag("--tiny", train.tiny, "Divide every layer width by 16");
  train_cmd->add_option("--epochs", train.epochs, "Number of epochs");
  train_cmd->add_option("--batch-size", train.batch_size, "Mini-batch size");
  train_cmd->add_option("--lr", train.lr, "Adam learning rate");
  train_cmd->add_option("--seed", train.seed, "Initialisation and shuffling seed");
  train_cmd->add_option("--out-dir", train.out_dir, "Output directory")->required();
  AddCacheOptions(train_cmd, train.cache_dir, train.no_cache);
  train_cmd->callback([&] { action = [&] { RunTrain(train, *train_cmd, out); }; });

  EvalArgs ev;
  auto* eval_cmd = app.add_subcommand("eval", "Score a checkpoint or a predictions file on a manifest");
  auto* ev_ckpt = eval_cmd->add_option("--checkpoint", ev.checkpoint, "Model checkpoint");
  auto* ev_pred = eval_cmd->add_option("--predictions", ev.predictions, "Predictions CSV");
  ev_ckpt->excludes(ev_pred);
  eval_cmd->add_option("--manifest", ev.manifest, "Manifest with the reference labels")->required();
  eval_cmd->add_option("--out-dir", ev.out_dir, "Output directory")->required();
  AddCacheOptions(eval_cmd, ev.cache_dir, ev.no_cache);
  eval_cmd->callback([&] {
    if (ev.checkpoint.empty() && ev.predictions.empty()) {
      throw CLI::ValidationError("eval", "one of --checkpoint or --predictions is required");
    }
    action = [&] { RunEval(ev, out); };
  });

  AnalyzeArgs an;
  auto* analyze_cmd = app.add_subcommand("analyze", "Per-source correlation table and level-only baselines");
  auto* an_ckpt = analyze_cmd->add_option("--checkpoint", an.checkpoint, "Model checkpoint");
  auto* an_pred = analyze_cmd->add_option("--predictions", an.predictions, "Predictions CSV");
  an_ckpt->excludes(an_pred);
  analyze_cmd->add_option("--manifest", an.manifest, "Manifest to analyse")->required();
  analyze_cmd->add_option("--train-manifest", an.train_manifest, "Manifest for fitting level-only baselines");
  analyze_cmd->add_option("--out-dir", an.out_dir, "Output directory")->required();
  AddCacheOptions(analyze_cmd, an.cache_dir, an.no_cache);
  analyze_cmd->callback([&] {
    if (an.checkpoint.empty() && an.predictions.empty()) {
      throw CLI::ValidationError("analyze", "one of --checkpoint or --predictions is required");
    }
    action = [&] { RunAnalyze(an, out); };
  });

  MixArgs mix;
  auto* mix_cmd = app.add_subcommand("mix", "Insert source recordings into clips and compare predictions");
  mix_cmd->add_option("--checkpoint", mix.checkpoint, "Model checkpoint")->required();
  mix_cmd->add_option("--manifest", mix.manifest, "Clips to mix into")->required();
  mix_cmd->add_option("--noise-dir", mix.noise_dir, "Directory with one subdirectory of .wav files per source")
      ->required();
  mix_cmd->add_option("--sources", mix.sources, "Subdirectories to use (default: all)")->delimiter(',');
  mix_cmd->add_option("--snr-db", mix.snr_db, "Clip-to-insert SNR in dB, or 'inf' for no insertion");
  mix_cmd->add_option("--seed", mix.seed, "Seed for segment choice and placement");
  mix_cmd->add_option("--out-dir", mix.out_dir, "Output directory")->required();
  mix_cmd->add_flag("--no-audio", mix.no_audio, "Do not write the mixed clips");
  mix_cmd->callback([&] { action = [&] { RunMix(mix, out); }; });

  PredictArgs pr;
  auto* predict_cmd = app.add_subcommand("predict", "Predict sources and annoyance for one WAV file");
  predict_cmd->add_option("--checkpoint", pr.checkpoint, "Model checkpoint")->required();
  predict_cmd->add_option("--wav", pr.wav, "Input WAV file")->required();
  predict_cmd->add_option("--out-dir", pr.out_dir, "Output directory")->required();
  predict_cmd->add_flag("--attention", pr.attention, "Also write the cross-attention maps");
  predict_cmd->callback([&] { action = [&] { RunPredict(pr, out); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }
  spdlog::set_level(spdlog::level::from_str(log_level));
  try {
    if (action) action();
  } catch (const std::exception& e) {
    err << "sscaf: error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace sscaf::cli
