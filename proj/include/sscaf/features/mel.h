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

#ifndef SSCAF_FEATURES_MEL_H_
#define SSCAF_FEATURES_MEL_H_

#include <cstddef>
#include <vector>

#include "sscaf/features/stft.h"

namespace sscaf::features {

inline constexpr double kLogFloor = 1e-10;
inline constexpr double kMelLowHz = 50.0;

// HTK Mel scale.
double HzToMel(double hz);
double MelToHz(double mel);

struct MelConfig {
  int n_mels = 64;
  double f_lo = kMelLowHz;
  double f_hi = 0.0;  // 0 means sample_rate / 2
};

// Row-major n_mels x bins triangular filterbank with centres equally spaced
// on the Mel scale between f_lo and f_hi. Each row is scaled to sum to 1. A
// filter too narrow to cover any FFT bin collapses onto its nearest bin.
struct MelFilterbank {
  std::vector<double> weights;
  int n_mels = 0;
  std::size_t bins = 0;
  std::vector<double> centers_hz;  // n_mels centre frequencies
};

// Throws ConfigError if n_mels < 1 or f_lo >= f_hi.
MelFilterbank MakeMelFilterbank(const MelConfig& config, int n_fft, int sample_rate);

// Raw filter outputs (frames x n_mels), before the log.
std::vector<double> ApplyFilterbank(const Spectrogram& spec, const MelFilterbank& fb);

// ln(filter output + kLogFloor), frames x n_mels row-major.
std::vector<double> LogMel(const Spectrogram& spec, const MelConfig& config = {});

}  // namespace sscaf::features

#endif  // SSCAF_FEATURES_MEL_H_
