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

// RIFF/WAVE reading and writing.
//
// The reader accepts PCM 16-bit and IEEE float 32-bit data (plain or
// WAVE_FORMAT_EXTENSIBLE) with one or two channels. Integer PCM is divided by
// 32768 so full scale maps to [-1, 1); stereo is averaged to mono. The writer
// always produces PCM 16-bit unless a fixture needs something else.

#ifndef SSCAF_AUDIO_WAV_H_
#define SSCAF_AUDIO_WAV_H_

#include <cstdint>
#include <filesystem>
#include <vector>

#include "sscaf/audio/audio_clip.h"

namespace sscaf::audio {

enum class WavEncoding { kPcm16, kFloat32 };

// Throws IoError if the file cannot be read, FormatError on a malformed
// container and UnsupportedError on encodings or channel counts outside the
// accepted set.
AudioClip LoadWav(const std::filesystem::path& path);

// Writes 16-bit PCM. Samples are clipped to [-1, 1] and quantized as
// clamp(round(x * 32768), -32768, 32767). Throws IoError if the path is not
// writable and InputError on non-finite samples.
void WriteWav(const AudioClip& clip, const std::filesystem::path& path);

// Writes interleaved multi-channel data in either encoding; every channel must
// have the same length. Used for stereo and float fixtures.
void WriteWavChannels(const std::vector<std::vector<float>>& channels, int sample_rate,
                      WavEncoding encoding, const std::filesystem::path& path);

// The quantizer used by WriteWav.
int16_t QuantizePcm16(float x);

}  // namespace sscaf::audio

#endif  // SSCAF_AUDIO_WAV_H_
