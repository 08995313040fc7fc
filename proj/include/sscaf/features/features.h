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

// Model inputs: a fixed-length log-Mel matrix and the matching frame-RMS
// track, both on the same framing.

#ifndef SSCAF_FEATURES_FEATURES_H_
#define SSCAF_FEATURES_FEATURES_H_

#include <cstddef>
#include <vector>

#include "sscaf/audio/audio_clip.h"
#include "sscaf/features/mel.h"
#include "sscaf/features/stft.h"

namespace sscaf::features {

inline constexpr int kNumFrames = 480;
inline constexpr int kNumMels = 64;

// Per-frame sqrt(mean(x^2)) over unwindowed frames, framed exactly as Stft.
std::vector<double> FrameRms(const audio::AudioClip& clip, const Framing& framing = {});

struct FeaturePair {
  std::vector<float> mel;  // kNumFrames x kNumMels, row-major
  std::vector<float> rms;  // kNumFrames

  bool operator==(const FeaturePair&) const = default;
};

// Stft -> LogMel and FrameRms, cropped to the first kNumFrames frames, or
// padded with ln(kLogFloor) / 0 when the clip is shorter. Throws InputError
// if the clip is not at the canonical rate or shorter than one window.
FeaturePair ExtractFeatures(const audio::AudioClip& clip);

}  // namespace sscaf::features

#endif  // SSCAF_FEATURES_FEATURES_H_
