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

#include "sscaf/training/dataset.h"

#include <algorithm>
#include <chrono>
#include <numeric>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "sscaf/audio/resample.h"
#include "sscaf/audio/wav.h"
#include "sscaf/common/error.h"
#include "sscaf/common/parallel.h"
#include "sscaf/common/random.h"
#include "sscaf/features/level.h"
#include "sscaf/training/tensor_archive.h"

namespace sscaf::training {

namespace {

// Identifies the source file a cache entry was computed from.
std::string SourceStamp(const std::filesystem::path& path) {
  const auto size = std::filesystem::file_size(path);
  const auto mtime = std::filesystem::last_write_time(path).time_since_epoch();
  return fmt::format("{}:{}", size, std::chrono::duration_cast<std::chrono::nanoseconds>(mtime).count());
}

std::optional<ClipFeatures> ReadCache(const std::filesystem::path& file, const std::string& stamp) {
  if (!std::filesystem::exists(file)) return std::nullopt;
  try {
    const TensorArchive a = ReadTensorArchive(file);
    if (!a.HasMeta("source") || a.Meta("source") != stamp) return std::nullopt;
    ClipFeatures f;
    f.pair.mel = a.Tensor("mel").data;
    f.pair.rms = a.Tensor("rms").data;
    f.laeq_db = a.Tensor("laeq_db").data.at(0);
    if (f.pair.mel.size() != static_cast<std::size_t>(features::kNumFrames * features::kNumMels) ||
        f.pair.rms.size() != static_cast<std::size_t>(features::kNumFrames)) {
      return std::nullopt;
    }
    return f;
  } catch (const Error& e) {
    spdlog::debug("ignoring unusable feature cache {}: {}", file.string(), e.what());
    return std::nullopt;
  }
}

void WriteCache(const std::filesystem::path& file, const std::string& stamp, const ClipFeatures& f) {
  TensorArchive a;
  a.meta.emplace_back("content", "features");
  a.meta.emplace_back("source", stamp);
  a.tensors.push_back({"mel", {features::kNumFrames, features::kNumMels}, f.pair.mel});
  a.tensors.push_back({"rms", {features::kNumFrames}, f.pair.rms});
  // The level is stored rounded to float32 like everything else in the
  // container; it is recomputed identically on every run.
  a.tensors.push_back({"laeq_db", {1}, {static_cast<float>(f.laeq_db)}});
  WriteTensorArchive(a, file);
}

}  // namespace

std::vector<uint8_t> FeatureSet::FlatLabels() const {
  std::vector<uint8_t> out;
  out.reserve(labels.size() * kNumClasses);
  for (const auto& row : labels) {
    for (const bool b : row) out.push_back(b ? 1 : 0);
  }
  return out;
}

FeatureSet FeatureSet::Subset(std::span<const std::size_t> indices) const {
  FeatureSet out;
  for (const std::size_t i : indices) {
    out.clip_ids.push_back(clip_ids.at(i));
    out.features.push_back(features[i]);
    out.labels.push_back(labels[i]);
    out.annoyance.push_back(annoyance[i]);
    out.laeq_db.push_back(laeq_db[i]);
  }
  return out;
}

ClipFeatures ComputeClipFeatures(const audio::AudioClip& clip) {
  const audio::AudioClip canonical =
      clip.sample_rate == kCanonicalSampleRate ? clip : audio::Resample(clip, kCanonicalSampleRate);
  ClipFeatures f;
  f.pair = features::ExtractFeatures(canonical);
  f.laeq_db = features::AWeightedLeq(canonical);
  return f;
}

FeatureSet LoadFeatureSet(const audio::DatasetManifest& manifest,
                          const std::optional<std::filesystem::path>& cache_dir) {
  const std::size_t n = manifest.records.size();
  std::vector<ClipFeatures> computed(n);
  if (cache_dir) std::filesystem::create_directories(*cache_dir);
  ParallelFor(n, [&](std::size_t i) {
    const audio::ClipRecord& r = manifest.records[i];
    try {
      const std::filesystem::path source = audio::ResolveClipPath(manifest, r);
      if (!std::filesystem::exists(source)) throw IoError(fmt::format("missing audio file '{}'", source.string()));
      std::string stamp;
      std::filesystem::path cache_file;
      if (cache_dir) {
        stamp = SourceStamp(source);
        cache_file = *cache_dir / (r.clip_id + ".feat");
        if (auto cached = ReadCache(cache_file, stamp)) {
          computed[i] = std::move(*cached);
          return;
        }
      }
      computed[i] = ComputeClipFeatures(audio::LoadWav(source));
      if (cache_dir) {
        WriteCache(cache_file, stamp, computed[i]);
        // Reuse the float32-rounded level so cached and fresh runs agree.
        computed[i].laeq_db = static_cast<float>(computed[i].laeq_db);
      }
    } catch (const Error& e) {
      throw InputError(fmt::format("clip '{}': {}", r.clip_id, e.what()));
    }
  });
  FeatureSet set;
  for (std::size_t i = 0; i < n; ++i) {
    const audio::ClipRecord& r = manifest.records[i];
    set.clip_ids.push_back(r.clip_id);
    set.features.push_back(std::move(computed[i].pair));
    set.labels.push_back(r.labels);
    set.annoyance.push_back(r.annoyance);
    set.laeq_db.push_back(computed[i].laeq_db);
  }
  return set;
}

FeatureSet MakeFeatureSet(std::span<const audio::ClipRecord> records, std::span<const audio::AudioClip> clips) {
  if (records.size() != clips.size()) {
    throw InputError(fmt::format("feature set: {} records but {} clips", records.size(), clips.size()));
  }
  std::vector<ClipFeatures> computed(records.size());
  ParallelFor(records.size(), [&](std::size_t i) {
    try {
      computed[i] = ComputeClipFeatures(clips[i]);
    } catch (const Error& e) {
      throw InputError(fmt::format("clip '{}': {}", records[i].clip_id, e.what()));
    }
  });
  FeatureSet set;
  for (std::size_t i = 0; i < records.size(); ++i) {
    set.clip_ids.push_back(records[i].clip_id);
    set.features.push_back(std::move(computed[i].pair));
    set.labels.push_back(records[i].labels);
    set.annoyance.push_back(records[i].annoyance);
    set.laeq_db.push_back(computed[i].laeq_db);
  }
  return set;
}

std::vector<std::vector<std::size_t>> MakeBatches(std::size_t n, int batch_size, uint64_t seed, int epoch) {
  if (batch_size < 1) throw ConfigError(fmt::format("batch size must be at least 1, got {}", batch_size));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(MixSeed(MixSeed(seed, "shuffle"), static_cast<uint64_t>(epoch)));
  rng.Shuffle(order.begin(), order.end());
  std::vector<std::vector<std::size_t>> batches;
  for (std::size_t start = 0; start < n; start += batch_size) {
    const std::size_t end = std::min(n, start + static_cast<std::size_t>(batch_size));
    batches.emplace_back(order.begin() + start, order.begin() + end);
  }
  return batches;
}

Batch AssembleBatch(const FeatureSet& set, std::span<const std::size_t> indices) {
  const int b = static_cast<int>(indices.size());
  if (b == 0) throw InputError("empty batch");
  const std::size_t mel_size = static_cast<std::size_t>(features::kNumFrames) * features::kNumMels;
  std::vector<float> mel;
  std::vector<float> rms;
  mel.reserve(b * mel_size);
  rms.reserve(b * features::kNumFrames);
  Batch batch;
  for (const std::size_t i : indices) {
    if (i >= set.size()) throw InputError(fmt::format("batch index {} out of range {}", i, set.size()));
    const features::FeaturePair& f = set.features[i];
    if (f.mel.size() != mel_size || f.rms.size() != static_cast<std::size_t>(features::kNumFrames)) {
      throw InputError(fmt::format("clip '{}': features have the wrong size", set.clip_ids[i]));
    }
    mel.insert(mel.end(), f.mel.begin(), f.mel.end());
    rms.insert(rms.end(), f.rms.begin(), f.rms.end());
    for (const bool l : set.labels[i]) batch.y_source.push_back(l ? 1.0f : 0.0f);
    batch.y_annoyance.push_back(static_cast<float>(set.annoyance[i]));
  }
  batch.mel = ag::Tensor<float>::FromData({b, 1, features::kNumFrames, features::kNumMels}, std::move(mel));
  batch.rms = ag::Tensor<float>::FromData({b, 1, features::kNumFrames, 1}, std::move(rms));
  return batch;
}

}  // namespace sscaf::training
