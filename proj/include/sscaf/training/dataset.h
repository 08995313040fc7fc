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

#ifndef SSCAF_TRAINING_DATASET_H_
#define SSCAF_TRAINING_DATASET_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sscaf/audio/audio_clip.h"
#include "sscaf/audio/manifest.h"
#include "sscaf/autograd/tensor.h"
#include "sscaf/eval/analysis.h"
#include "sscaf/features/features.h"

namespace sscaf::training {

// Features, targets and level of every clip of a split, in manifest order.
struct FeatureSet {
  std::vector<std::string> clip_ids;
  std::vector<features::FeaturePair> features;
  std::vector<eval::LabelRow> labels;
  std::vector<double> annoyance;
  std::vector<double> laeq_db;

  std::size_t size() const { return clip_ids.size(); }
  // Labels flattened row-major as 0/1 (clips x kNumClasses).
  std::vector<uint8_t> FlatLabels() const;
  FeatureSet Subset(std::span<const std::size_t> indices) const;
};

struct ClipFeatures {
  features::FeaturePair pair;
  double laeq_db = 0.0;
};

// Resamples to the canonical rate if needed, then extracts the feature pair
// and the A-weighted level.
ClipFeatures ComputeClipFeatures(const audio::AudioClip& clip);

// Reads and featurizes every clip of the manifest (in parallel). With a
// cache directory, each clip's features are stored there and reused while the
// source file's size and modification time are unchanged. Errors name the
// clip id.
FeatureSet LoadFeatureSet(const audio::DatasetManifest& manifest,
                          const std::optional<std::filesystem::path>& cache_dir = std::nullopt);

// Featurizes in-memory clips paired with their records.
FeatureSet MakeFeatureSet(std::span<const audio::ClipRecord> records, std::span<const audio::AudioClip> clips);

// Shuffled partition of [0, n) into batches of `batch_size` (the last one may
// be short). The order depends only on (seed, epoch).
std::vector<std::vector<std::size_t>> MakeBatches(std::size_t n, int batch_size, uint64_t seed, int epoch);

struct Batch {
  ag::Tensor<float> mel;        // (B, 1, frames, mels)
  ag::Tensor<float> rms;        // (B, 1, frames, 1)
  std::vector<float> y_source;  // B x kNumClasses
  std::vector<float> y_annoyance;
};

Batch AssembleBatch(const FeatureSet& set, std::span<const std::size_t> indices);

}  // namespace sscaf::training

#endif  // SSCAF_TRAINING_DATASET_H_
