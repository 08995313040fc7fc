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

#ifndef SSCAF_AUDIO_RESAMPLE_H_
#define SSCAF_AUDIO_RESAMPLE_H_

#include "sscaf/audio/audio_clip.h"

namespace sscaf::audio {

// Linear-interpolation resampling. The output has
// round(n * target_rate / source_rate) samples; output sample i reads the
// input at position i * source_rate / target_rate, holding the last sample
// past the end. Equal rates return an exact copy. Throws InputError unless
// target_rate > 0.
AudioClip Resample(const AudioClip& clip, int target_rate);

}  // namespace sscaf::audio

#endif  // SSCAF_AUDIO_RESAMPLE_H_
