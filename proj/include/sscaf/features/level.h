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

// A-weighted equivalent level relative to digital full scale.

#ifndef SSCAF_FEATURES_LEVEL_H_
#define SSCAF_FEATURES_LEVEL_H_

#include "sscaf/audio/audio_clip.h"
#include "sscaf/features/stft.h"

namespace sscaf::features {

inline constexpr double kLevelFloorDb = -120.0;

// Standard analog A-weighting magnitude (poles at 20.6, 107.7, 737.9 and
// 12194 Hz) in dB, normalized to exactly 0 dB at 1 kHz.
double AWeightingGainDb(double hz);

// L_Aeq in dBFS: per frame, the Hamming-windowed power spectrum is A-weighted
// per bin and converted to a mean-square value (Parseval, normalized by the
// window energy, so a full-scale 1 kHz sine reads about -3 dB); the level is
// 10 log10 of the mean over frames. Clips shorter than one window are
// zero-padded to one frame. Silence returns kLevelFloorDb. Throws InputError
// for an empty clip.
double AWeightedLeq(const audio::AudioClip& clip, const Framing& framing = {});

}  // namespace sscaf::features

#endif  // SSCAF_FEATURES_LEVEL_H_
