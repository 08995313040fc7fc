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

#include "sscaf/features/features.h"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "sscaf/common/error.h"
#include "sscaf/common/labels.h"

namespace sscaf::features {

std::vector<double> FrameRms(const audio::AudioClip& clip, const Framing& framing) {
  if (clip.sample_rate != framing.sample_rate) {
    throw InputError(fmt::format("frame_rms: clip at {} Hz, framing expects {} Hz", clip.sample_rate,
                                 framing.sample_rate));
  }
  const std::size_t frames = framing.NumFrames(clip.samples.size());
  const auto n = static_cast<std::size_t>(framing.window());
  const auto hop = static_cast<std::size_t>(framing.hop());
  std::vector<double> rms(frames);
  for (std::size_t t = 0; t < frames; ++t) {
    rms[t] = audio::Rms(std::span<const float>(clip.samples).subspan(t * hop, n));
  }
  return rms;
}

FeaturePair ExtractFeatures(const audio::AudioClip& clip) {
  if (clip.sample_rate != kCanonicalSampleRate) {
    throw InputError(fmt::format("extract_features: clip at {} Hz, expected {} Hz (resample first)",
                                 clip.sample_rate, kCanonicalSampleRate));
  }
  const Framing framing;
  const Spectrogram spec = Stft(clip, framing);
  const auto mel = LogMel(spec, MelConfig{.n_mels = kNumMels});
  const auto rms = FrameRms(clip, framing);

  FeaturePair out;
  out.mel.assign(static_cast<std::size_t>(kNumFrames) * kNumMels,
                 static_cast<float>(std::log(kLogFloor)));
  out.rms.assign(kNumFrames, 0.0f);
  const std::size_t keep = std::min<std::size_t>(spec.frames, kNumFrames);
  for (std::size_t i = 0; i < keep * kNumMels; ++i) out.mel[i] = static_cast<float>(mel[i]);
  for (std::size_t t = 0; t < keep; ++t) out.rms[t] = static_cast<float>(rms[t]);
  return out;
}

}  // namespace sscaf::features
