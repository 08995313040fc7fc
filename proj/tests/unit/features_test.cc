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

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "sscaf/common/error.h"
#include "sscaf/common/random.h"
#include "sscaf/features/features.h"
#include "sscaf/features/level.h"
#include "sscaf/features/mel.h"
#include "sscaf/features/stft.h"

namespace sscaf::features {
namespace {

using audio::AudioClip;

AudioClip Sine(double freq, double amp, std::size_t n, int sr = 16000) {
  AudioClip c;
  c.sample_rate = sr;
  c.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    c.samples[i] = static_cast<float>(amp * std::sin(2 * std::numbers::pi * freq * i / sr));
  }
  return c;
}

AudioClip Constant(float v, std::size_t n) {
  AudioClip c;
  c.samples.assign(n, v);
  return c;
}

// Energy of a real frame recovered from its one-sided power spectrum.
double OneSidedEnergy(const std::vector<double>& power, int n) {
  double e = 0.0;
  for (std::size_t k = 0; k < power.size(); ++k) {
    const bool edge = k == 0 || (n % 2 == 0 && k + 1 == power.size());
    e += (edge ? 1.0 : 2.0) * power[k];
  }
  return e / n;
}

TEST(FramingTest, DefaultGeometry) {
  const Framing f;
  EXPECT_EQ(f.window(), 736);
  EXPECT_EQ(f.hop(), 490);
  EXPECT_EQ(f.NumFrames(240000), 489u);
  EXPECT_EQ(f.NumFrames(736), 1u);
  EXPECT_THROW(f.NumFrames(735), InputError);
}

TEST(StftTest, ConstantClipConcentratesInDc) {
  const float c = 0.3f;
  const auto spec = Stft(Constant(c, 2000));
  const auto w = HammingWindow(736);
  double sum_w = 0.0;
  for (double v : w) sum_w += v;
  const double expected = std::pow(c * sum_w, 2);
  for (std::size_t t = 0; t < spec.frames; ++t) {
    const auto row = spec.frame(t);
    EXPECT_NEAR(row[0] / expected, 1.0, 1e-6);
    EXPECT_EQ(std::max_element(row.begin(), row.end()) - row.begin(), 0);
  }
}

TEST(StftTest, ParsevalOnRandomFrames) {
  Rng rng(1);
  const auto w = HammingWindow(736);
  for (int trial = 0; trial < 100; ++trial) {
    AudioClip clip;
    clip.samples.resize(736);
    for (auto& v : clip.samples) v = static_cast<float>(rng.Normal());
    const auto spec = Stft(clip);
    ASSERT_EQ(spec.frames, 1u);
    double energy = 0.0;
    for (int k = 0; k < 736; ++k) energy += std::pow(w[k] * clip.samples[k], 2);
    const std::vector<double> row(spec.frame(0).begin(), spec.frame(0).end());
    EXPECT_NEAR(OneSidedEnergy(row, 736) / energy, 1.0, 1e-6);
  }
}

TEST(StftTest, MatchesBruteForceDft) {
  Rng rng(2);
  std::vector<double> frame(64);
  for (auto& v : frame) v = rng.Normal();
  const auto power = PowerSpectrum(frame);
  ASSERT_EQ(power.size(), 33u);
  for (int k = 0; k < 33; ++k) {
    std::complex<double> acc = 0.0;
    for (int n = 0; n < 64; ++n) acc += frame[n] * std::polar(1.0, -2 * std::numbers::pi * k * n / 64);
    EXPECT_NEAR(power[k], std::norm(acc), 1e-9 * (1 + std::norm(acc)));
  }
}

TEST(StftTest, BinCenteredSinePeaksAtItsBin) {
  for (int bin : {5, 46, 100, 250, 360}) {
    const double f = bin * 16000.0 / 736.0;
    const auto spec = Stft(Sine(f, 0.5, 736 * 3));
    for (std::size_t t = 0; t < spec.frames; ++t) {
      const auto row = spec.frame(t);
      EXPECT_EQ(std::max_element(row.begin(), row.end()) - row.begin(), bin);
    }
  }
}

TEST(StftTest, RejectsShortOrMismatchedClips) {
  EXPECT_THROW(Stft(Constant(0.1f, 100)), InputError);
  AudioClip c = Constant(0.1f, 2000);
  c.sample_rate = 8000;
  EXPECT_THROW(Stft(c), InputError);
}

TEST(MelTest, ZeroSpectrogramIsLogFloor) {
  Spectrogram spec;
  spec.frames = 3;
  spec.bins = 369;
  spec.n_fft = 736;
  spec.sample_rate = 16000;
  spec.power.assign(3 * 369, 0.0);
  for (double v : LogMel(spec)) EXPECT_EQ(v, std::log(kLogFloor));
}

TEST(MelTest, FilterWeightsSumToOne) {
  for (int n_mels : {1, 16, 64, 128}) {
    const auto fb = MakeMelFilterbank({.n_mels = n_mels}, 736, 16000);
    for (int m = 0; m < n_mels; ++m) {
      double sum = 0.0;
      for (std::size_t k = 0; k < fb.bins; ++k) {
        const double w = fb.weights[m * fb.bins + k];
        EXPECT_GE(w, 0.0);
        sum += w;
      }
      EXPECT_NEAR(sum, 1.0, 1e-6);
    }
  }
}

TEST(MelTest, HtkScaleRoundTrips) {
  EXPECT_NEAR(HzToMel(700.0), 2595.0 * std::log10(2.0), 1e-9);
  for (double f : {0.0, 50.0, 1000.0, 8000.0}) EXPECT_NEAR(MelToHz(HzToMel(f)), f, 1e-9);
}

TEST(MelTest, SineEnergyLandsInBracketingBands) {
  const auto fb = MakeMelFilterbank({.n_mels = 64}, 736, 16000);
  for (double f : {2000.0, 2345.0, 3100.0, 4400.0, 5000.0, 6789.0}) {
    const auto spec = Stft(Sine(f, 0.5, 736 * 4));
    const auto out = ApplyFilterbank(spec, fb);
    const auto upper = std::upper_bound(fb.centers_hz.begin(), fb.centers_hz.end(), f) - fb.centers_hz.begin();
    ASSERT_GT(upper, 0);
    ASSERT_LT(upper, 64);
    double total = 0.0;
    for (int m = 0; m < 64; ++m) total += out[m];
    const double bracket = out[upper - 1] + out[upper];
    EXPECT_GE(bracket / total, 0.9) << f << " Hz";
  }
}

TEST(MelTest, ConfigErrors) {
  EXPECT_THROW(MakeMelFilterbank({.n_mels = 0}, 736, 16000), ConfigError);
  EXPECT_THROW(MakeMelFilterbank({.n_mels = 8, .f_lo = 9000}, 736, 16000), ConfigError);
}

TEST(FrameRmsTest, ConstantAndSilence) {
  for (double v : FrameRms(Constant(0.5f, 5000))) EXPECT_NEAR(v, 0.5, 1e-7);
  for (double v : FrameRms(Constant(0.0f, 5000))) EXPECT_EQ(v, 0.0);
}

TEST(FrameRmsTest, SineRmsIsAmplitudeOverRootTwo) {
  // 500 Hz at 16 kHz: 32-sample period, so 736 = 23 whole periods.
  const double a = 0.7;
  for (double v : FrameRms(Sine(500, a, 16000))) EXPECT_NEAR(v / (a / std::sqrt(2.0)), 1.0, 0.01);
}

TEST(ExtractTest, SilenceShapesAndValues) {
  const auto fp = ExtractFeatures(Constant(0.0f, 240000));
  ASSERT_EQ(fp.mel.size(), 480u * 64u);
  ASSERT_EQ(fp.rms.size(), 480u);
  for (float v : fp.mel) EXPECT_EQ(v, static_cast<float>(std::log(kLogFloor)));
  for (float v : fp.rms) EXPECT_EQ(v, 0.0f);
}

TEST(ExtractTest, ShortClipsArePaddedAndShapesFixed) {
  const auto fp = ExtractFeatures(Sine(1000, 0.5, 16000));
  ASSERT_EQ(fp.mel.size(), 480u * 64u);
  ASSERT_EQ(fp.rms.size(), 480u);
  const std::size_t frames = Framing().NumFrames(16000);
  EXPECT_GT(fp.rms[frames - 1], 0.3f);
  EXPECT_EQ(fp.rms[frames], 0.0f);
  EXPECT_EQ(fp.mel[frames * 64], static_cast<float>(std::log(kLogFloor)));
}

TEST(ExtractTest, Deterministic) {
  Rng rng(3);
  AudioClip clip;
  clip.samples.resize(240000);
  for (auto& v : clip.samples) v = static_cast<float>(0.1 * rng.Normal());
  EXPECT_EQ(ExtractFeatures(clip), ExtractFeatures(clip));
}

TEST(ExtractTest, OneHopShiftShiftsFrames) {
  Rng rng(4);
  AudioClip clip;
  clip.samples.resize(240000 + 490);
  for (auto& v : clip.samples) v = static_cast<float>(0.1 * rng.Normal());
  AudioClip shifted;
  shifted.samples.assign(clip.samples.begin() + 490, clip.samples.end());
  clip.samples.resize(240000);
  const auto a = ExtractFeatures(clip);
  const auto b = ExtractFeatures(shifted);
  for (int t = 0; t + 1 < 480; ++t) {
    EXPECT_NEAR(b.rms[t], a.rms[t + 1], 1e-6);
    for (int m = 0; m < 64; ++m) EXPECT_NEAR(b.mel[t * 64 + m], a.mel[(t + 1) * 64 + m], 1e-5);
  }
}

TEST(ExtractTest, ScalingShiftsLogMelAndScalesRms) {
  Rng rng(5);
  AudioClip clip;
  clip.samples.resize(240000);
  for (auto& v : clip.samples) v = static_cast<float>(0.05 * rng.Normal());
  const auto spec = Stft(clip);
  const auto rms = FrameRms(clip);
  const auto mel = LogMel(spec);
  const double alpha = 3.0;
  AudioClip louder = clip;
  for (auto& v : louder.samples) v = static_cast<float>(v * alpha);
  const auto rms2 = FrameRms(louder);
  const auto mel2 = LogMel(Stft(louder));
  for (std::size_t i = 0; i < rms.size(); ++i) EXPECT_NEAR(rms2[i], alpha * rms[i], 1e-6 * rms2[i]);
  for (std::size_t i = 0; i < mel.size(); ++i) {
    if (mel[i] > std::log(kLogFloor) + 10) EXPECT_NEAR(mel2[i] - mel[i], 2 * std::log(alpha), 1e-4);
  }
}

TEST(LevelTest, AWeightingIsZeroAtOneKilohertz) {
  EXPECT_NEAR(AWeightingGainDb(1000.0), 0.0, 0.01);
  EXPECT_NEAR(AWeightingGainDb(100.0), -19.1, 0.1);
  EXPECT_NEAR(AWeightingGainDb(10000.0), -2.5, 0.1);
}

TEST(LevelTest, DoublingAddsSixDecibels) {
  Rng rng(6);
  AudioClip clip;
  clip.samples.resize(48000);
  for (auto& v : clip.samples) v = static_cast<float>(0.1 * rng.Normal());
  AudioClip twice = clip;
  for (auto& v : twice.samples) v *= 2.0f;
  EXPECT_NEAR(AWeightedLeq(twice) - AWeightedLeq(clip), 20 * std::log10(2.0), 1e-3);
}

TEST(LevelTest, SineLevels) {
  const double l1k = AWeightedLeq(Sine(1000, 1.0, 48000));
  EXPECT_NEAR(l1k, 20 * std::log10(1 / std::sqrt(2.0)), 0.05);
  const double l100 = AWeightedLeq(Sine(100, 1.0, 48000));
  EXPECT_NEAR(l1k - l100, 19.1, 0.5);
}

TEST(LevelTest, SilenceHitsFloorAndEmptyIsRejected) {
  EXPECT_EQ(AWeightedLeq(Constant(0.0f, 16000)), kLevelFloorDb);
  EXPECT_THROW(AWeightedLeq(AudioClip{}), InputError);
  // Shorter than one window: zero-padded, so finite but below the sine level.
  const double short_level = AWeightedLeq(Sine(1000, 0.5, 100));
  EXPECT_GT(short_level, -60.0);
  EXPECT_LT(short_level, -9.0);
}

}  // namespace
}  // namespace sscaf::features
