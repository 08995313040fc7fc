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

#include <cmath>
#include <fstream>
#include <iterator>
#include <numbers>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "sscaf/audio/manifest.h"
#include "sscaf/audio/mix.h"
#include "sscaf/audio/resample.h"
#include "sscaf/audio/wav.h"
#include "sscaf/common/error.h"
#include "test_util.h"

namespace sscaf::audio {
namespace {

using sscaf::testing::TempDir;

std::string ReadBytes(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

AudioClip Sine(double freq, double amp, double seconds, int sr) {
  AudioClip c;
  c.sample_rate = sr;
  c.samples.resize(SecondsToSamples(seconds, sr));
  for (std::size_t i = 0; i < c.samples.size(); ++i) {
    c.samples[i] = static_cast<float>(amp * std::sin(2 * std::numbers::pi * freq * i / sr));
  }
  return c;
}

AudioClip WhiteNoise(std::size_t n, double scale, Rng& rng) {
  AudioClip c;
  c.samples.resize(n);
  for (auto& v : c.samples) v = static_cast<float>(scale * rng.Normal());
  return c;
}

TEST(WavTest, FullScalePcmConstantNormalizes) {
  const auto dir = TempDir("wav_full_scale");
  WriteWavChannels({std::vector<float>(100, 32767.0f / 32768.0f)}, 16000, WavEncoding::kPcm16,
                   dir / "c.wav");
  const auto clip = LoadWav(dir / "c.wav");
  ASSERT_EQ(clip.samples.size(), 100u);
  for (float v : clip.samples) EXPECT_NEAR(v, 0.99997, 1e-5);
}

TEST(WavTest, SymmetricStereoDownmixesToZero) {
  const auto dir = TempDir("wav_stereo");
  for (auto enc : {WavEncoding::kPcm16, WavEncoding::kFloat32}) {
    WriteWavChannels({std::vector<float>(50, 0.5f), std::vector<float>(50, -0.5f)}, 22050, enc,
                     dir / "s.wav");
    const auto clip = LoadWav(dir / "s.wav");
    EXPECT_EQ(clip.sample_rate, 22050);
    ASSERT_EQ(clip.samples.size(), 50u);
    for (float v : clip.samples) EXPECT_EQ(v, 0.0f);
  }
}

TEST(WavTest, SineRoundTripWithinQuantization) {
  const auto dir = TempDir("wav_round_trip");
  const auto clip = Sine(440, 0.8, 15.0, 16000);
  WriteWav(clip, dir / "sine.wav");
  const auto back = LoadWav(dir / "sine.wav");
  ASSERT_EQ(back.samples.size(), clip.samples.size());
  EXPECT_EQ(back.sample_rate, 16000);
  double max_err = 0.0;
  for (std::size_t i = 0; i < clip.samples.size(); ++i) {
    max_err = std::max(max_err, std::abs(static_cast<double>(back.samples[i]) - clip.samples[i]));
  }
  EXPECT_LT(max_err, std::pow(2.0, -14));
}

TEST(WavTest, SilenceWritesZeroWords) {
  const auto dir = TempDir("wav_silence");
  AudioClip clip;
  clip.samples.assign(64, 0.0f);
  WriteWav(clip, dir / "z.wav");
  const auto bytes = ReadBytes(dir / "z.wav");
  ASSERT_EQ(bytes.size(), 44u + 128u);
  EXPECT_EQ(bytes.substr(36, 4), "data");
  for (std::size_t i = 44; i < bytes.size(); ++i) EXPECT_EQ(bytes[i], '\0');
}

TEST(WavTest, OverRangeSamplesAreClipped) {
  EXPECT_EQ(QuantizePcm16(2.0f), 32767);
  EXPECT_EQ(QuantizePcm16(1.0f), 32767);
  EXPECT_EQ(QuantizePcm16(-1.0f), -32768);
  EXPECT_EQ(QuantizePcm16(-7.0f), -32768);
  EXPECT_EQ(QuantizePcm16(0.5f), 16384);
  const auto dir = TempDir("wav_clip");
  AudioClip clip;
  clip.samples = {2.0f};
  WriteWav(clip, dir / "c.wav");
  const auto bytes = ReadBytes(dir / "c.wav");
  EXPECT_EQ(static_cast<unsigned char>(bytes[44]), 0xFF);
  EXPECT_EQ(static_cast<unsigned char>(bytes[45]), 0x7F);
}

TEST(WavTest, DownmixIsLinear) {
  const auto dir = TempDir("wav_linear");
  Rng rng(3);
  std::vector<float> l(400), r(400);
  for (std::size_t i = 0; i < l.size(); ++i) {
    l[i] = static_cast<float>(rng.Uniform(-0.4, 0.4));
    r[i] = static_cast<float>(rng.Uniform(-0.4, 0.4));
  }
  WriteWavChannels({l, r}, 16000, WavEncoding::kPcm16, dir / "x.wav");
  const auto base = LoadWav(dir / "x.wav");
  for (double alpha : {0.5, 2.0, -1.5}) {
    std::vector<float> la(l), ra(r);
    for (auto& v : la) v = static_cast<float>(v * alpha);
    for (auto& v : ra) v = static_cast<float>(v * alpha);
    WriteWavChannels({la, ra}, 16000, WavEncoding::kPcm16, dir / "y.wav");
    const auto scaled = LoadWav(dir / "y.wav");
    for (std::size_t i = 0; i < l.size(); ++i) {
      EXPECT_NEAR(scaled.samples[i], alpha * base.samples[i], (1 + std::abs(alpha)) / 32768.0);
    }
  }
}

TEST(WavTest, ExtensibleFloatIsAccepted) {
  const auto dir = TempDir("wav_extensible");
  // Hand-assembled WAVE_FORMAT_EXTENSIBLE header, mono float32, 2 samples.
  std::string b = "RIFF";
  auto u32 = [&](uint32_t v) { for (int i = 0; i < 4; ++i) b.push_back(static_cast<char>((v >> (8 * i)) & 0xFF)); };
  auto u16 = [&](uint16_t v) { b.push_back(static_cast<char>(v & 0xFF)); b.push_back(static_cast<char>(v >> 8)); };
  u32(4 + 8 + 40 + 8 + 8);
  b += "WAVEfmt ";
  u32(40);
  u16(0xFFFE); u16(1); u32(8000); u32(32000); u16(4); u16(32);
  u16(22); u16(32); u32(4);
  u16(3); b += std::string("\x00\x00\x00\x00\x10\x00\x80\x00\x00\xAA\x00\x38\x9B\x71", 14);
  b += "data";
  u32(8);
  const float vals[2] = {0.25f, -0.75f};
  b.append(reinterpret_cast<const char*>(vals), 8);
  std::ofstream(dir / "e.wav", std::ios::binary) << b;
  const auto clip = LoadWav(dir / "e.wav");
  EXPECT_EQ(clip.sample_rate, 8000);
  EXPECT_EQ(clip.samples, (std::vector<float>{0.25f, -0.75f}));
}

TEST(WavTest, ErrorsAreCategorized) {
  const auto dir = TempDir("wav_errors");
  EXPECT_THROW(LoadWav(dir / "missing.wav"), IoError);
  std::ofstream(dir / "junk.wav", std::ios::binary) << "not a wave file at all";
  EXPECT_THROW(LoadWav(dir / "junk.wav"), FormatError);

  WriteWavChannels({std::vector<float>(10, 0.1f)}, 16000, WavEncoding::kPcm16, dir / "ok.wav");
  auto bytes = ReadBytes(dir / "ok.wav");
  std::ofstream(dir / "trunc.wav", std::ios::binary) << bytes.substr(0, 50);
  EXPECT_THROW(LoadWav(dir / "trunc.wav"), FormatError);

  auto eight_bit = bytes;
  eight_bit[34] = 8;  // bits per sample
  std::ofstream(dir / "u8.wav", std::ios::binary) << eight_bit;
  EXPECT_THROW(LoadWav(dir / "u8.wav"), UnsupportedError);

  auto four_ch = bytes;
  four_ch[22] = 4;  // channel count
  std::ofstream(dir / "quad.wav", std::ios::binary) << four_ch;
  EXPECT_THROW(LoadWav(dir / "quad.wav"), UnsupportedError);

  AudioClip clip;
  clip.samples = {0.1f};
  EXPECT_THROW(WriteWav(clip, dir / "no_such_dir" / "x.wav"), IoError);
}

TEST(ResampleTest, SameRateIsBitwiseIdentity) {
  Rng rng(1);
  auto clip = WhiteNoise(1000, 0.3, rng);
  const auto out = Resample(clip, 16000);
  EXPECT_EQ(out.samples, clip.samples);
  EXPECT_EQ(out.sample_rate, 16000);
}

TEST(ResampleTest, ConstantStaysConstant) {
  AudioClip clip;
  clip.sample_rate = 8000;
  clip.samples.assign(8000, 0.25f);
  const auto out = Resample(clip, 16000);
  ASSERT_EQ(out.samples.size(), 16000u);
  for (float v : out.samples) EXPECT_EQ(v, 0.25f);
}

TEST(ResampleTest, SineRmsPreserved) {
  const auto clip = Sine(100, 0.6, 2.0, 8000);
  const auto out = Resample(clip, 16000);
  EXPECT_EQ(out.samples.size(), 32000u);
  EXPECT_NEAR(Rms(out.samples) / (0.6 / std::sqrt(2.0)), 1.0, 0.01);
}

TEST(ResampleTest, OutputLengthIsRounded) {
  AudioClip clip;
  clip.sample_rate = 44100;
  clip.samples.assign(1001, 0.0f);
  EXPECT_EQ(Resample(clip, 16000).samples.size(), 363u);  // round(363.17)
  EXPECT_THROW(Resample(clip, 0), InputError);
}

TEST(MixTest, ZeroDbScalesToEqualRms) {
  AudioClip base;
  base.samples.assign(SecondsToSamples(15, 16000), 0.1f);
  AudioClip noise;
  noise.samples.assign(SecondsToSamples(5, 16000), 0.2f);
  MixSpec spec{{noise}, {2.0}, 0.0};
  MixReport report;
  const auto out = MixAtSnr(base, spec, &report);
  ASSERT_EQ(report.gains.size(), 1u);
  EXPECT_NEAR(report.gains[0], 0.5, 1e-6);
  EXPECT_FLOAT_EQ(out.samples[SecondsToSamples(3, 16000)], 0.2f);
  EXPECT_FLOAT_EQ(out.samples[0], 0.1f);
}

TEST(MixTest, NoNoiseSentinelReturnsBase) {
  Rng rng(2);
  const auto base = WhiteNoise(SecondsToSamples(15, 16000), 0.1, rng);
  MixSpec spec;
  spec.snr_db = kNoNoiseSnr;
  EXPECT_EQ(MixAtSnr(base, spec).samples, base.samples);
}

TEST(MixTest, PowerAddsForIndependentNoise) {
  Rng rng(3);
  const auto base = WhiteNoise(SecondsToSamples(15, 16000), 0.1, rng);
  const auto noise = WhiteNoise(SecondsToSamples(5, 16000), 0.3, rng);
  for (double snr : {-6.0, 0.0, 10.0}) {
    MixReport report;
    const auto out = MixAtSnr(base, MixSpec{{noise}, {4.0}, snr}, &report);
    const std::size_t start = SecondsToSamples(4.0, 16000), len = noise.samples.size();
    const double mixed = Rms(std::span<const float>(out.samples).subspan(start, len));
    const double rb = report.base_rms[0];
    const double rn = report.gains[0] * Rms(noise.samples);
    EXPECT_NEAR(mixed / std::sqrt(rb * rb + rn * rn), 1.0, 0.05);
  }
}

TEST(MixTest, RealizedSnrMatchesRequest) {
  for (uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    const auto base = WhiteNoise(SecondsToSamples(15, 16000), rng.Uniform(0.01, 0.5), rng);
    std::vector<AudioClip> pool;
    for (int i = 0; i < 3; ++i) pool.push_back(WhiteNoise(SecondsToSamples(5, 16000), rng.Uniform(0.01, 1), rng));
    const double snr = rng.Uniform(-20, 20);
    const auto spec = DrawMixSpec(pool, 15.0, snr, rng);
    ASSERT_GE(spec.noise_clips.size(), 1u);
    ASSERT_LE(spec.noise_clips.size(), 3u);
    MixReport report;
    MixAtSnr(base, spec, &report);
    for (std::size_t s = 0; s < spec.noise_clips.size(); ++s) {
      EXPECT_GE(spec.insert_offsets[s], 0.0);
      EXPECT_LE(spec.insert_offsets[s], 10.0);
      const double realized =
          20 * std::log10(report.base_rms[s] / (report.gains[s] * Rms(spec.noise_clips[s].samples)));
      EXPECT_NEAR(realized, snr, 1e-6);
    }
  }
}

TEST(MixTest, InvalidSpecsAreRejected) {
  AudioClip base;
  base.samples.assign(SecondsToSamples(15, 16000), 0.1f);
  AudioClip noise;
  noise.samples.assign(SecondsToSamples(5, 16000), 0.2f);
  AudioClip silent;
  silent.samples.assign(SecondsToSamples(5, 16000), 0.0f);
  EXPECT_THROW(MixAtSnr(base, MixSpec{{silent}, {0.0}, 0.0}), DegenerateError);
  EXPECT_THROW(MixAtSnr(base, MixSpec{{noise}, {10.5}, 0.0}), InputError);
  EXPECT_THROW(MixAtSnr(base, MixSpec{{}, {}, 0.0}), InputError);
  EXPECT_THROW(MixAtSnr(base, MixSpec{{noise, noise, noise, noise}, {0, 1, 2, 3}, 0.0}), InputError);
  AudioClip other_rate = noise;
  other_rate.sample_rate = 8000;
  EXPECT_THROW(MixAtSnr(base, MixSpec{{other_rate}, {0.0}, 0.0}), InputError);
}

ClipRecord Record(const std::string& id, double annoyance, std::initializer_list<int> on) {
  ClipRecord r;
  r.clip_id = id;
  r.path = "audio/" + id + ".wav";
  r.annoyance = annoyance;
  for (int i : on) r.labels[i] = true;
  return r;
}

TEST(ManifestTest, EmptyManifestIsHeaderOnly) {
  const auto dir = TempDir("manifest_empty");
  SaveManifest(DatasetManifest{}, dir / "empty.csv");
  EXPECT_EQ(ReadBytes(dir / "empty.csv"), ManifestHeader() + "\n");
  EXPECT_TRUE(LoadManifest(dir / "empty.csv").records.empty());
}

TEST(ManifestTest, RoundTripIsLossless) {
  const auto dir = TempDir("manifest_round_trip");
  DatasetManifest m;
  m.records = {Record("a", 1.0, {0, 23}), Record("b", RoundAnnoyance(7.123456789), {5}),
               Record("c", 10.0, {})};
  SaveManifest(m, dir / "train.csv");
  const auto back = LoadManifest(dir / "train.csv");
  EXPECT_EQ(back.records, m.records);
  EXPECT_EQ(back.split, "train");
  EXPECT_EQ(ResolveClipPath(back, back.records[0]), dir / "audio/a.wav");
}

TEST(ManifestTest, HandWrittenFixtureParses) {
  const auto m = LoadManifest(std::filesystem::path(SSCAF_FIXTURE_DIR) / "manifest_3rows.csv");
  ASSERT_EQ(m.records.size(), 3u);
  EXPECT_EQ(m.records[0].clip_id, "clip_a");
  EXPECT_EQ(m.records[0].annoyance, 3.25);
  EXPECT_TRUE(m.records[0].labels[*ClassIndex("bird_tweets")]);
  EXPECT_TRUE(m.records[0].labels[*ClassIndex("speech")]);
  int on = 0;
  for (bool l : m.records[0].labels) on += l;
  EXPECT_EQ(on, 2);
  EXPECT_EQ(m.records[1].annoyance, 9.999999);
  EXPECT_TRUE(m.records[1].labels[*ClassIndex("general_traffic")]);
  EXPECT_TRUE(m.records[1].labels[*ClassIndex("horn")]);
  EXPECT_TRUE(m.records[1].labels[*ClassIndex("siren")]);
  EXPECT_EQ(ResolveClipPath(m, m.records[1]), std::filesystem::path("/data/b.wav"));
  EXPECT_EQ(m.records[2].annoyance, 1.0);
  for (bool l : m.records[2].labels) EXPECT_FALSE(l);
}

TEST(ManifestTest, ValidationNamesTheRow) {
  const auto dir = TempDir("manifest_invalid");
  const std::string header = ManifestHeader() + "\n";
  std::string labels;
  for (int i = 0; i < kNumClasses; ++i) labels += ",0";
  const auto expect_row_error = [&](const std::string& body, const std::string& needle) {
    std::ofstream(dir / "bad.csv") << header << "ok," << "x.wav,2.0" << labels << "\n" << body << "\n";
    try {
      LoadManifest(dir / "bad.csv");
      ADD_FAILURE() << "accepted: " << body;
    } catch (const ValidationError& e) {
      EXPECT_NE(std::string(e.what()).find(needle), std::string::npos) << e.what();
    }
  };
  expect_row_error("bad,x.wav,2.0,0,0", "row 2 (bad)");
  expect_row_error("bad,x.wav,2.0" + labels.substr(0, labels.size() - 1) + "2", "row 2 (bad)");
  expect_row_error("bad,x.wav,11.0" + labels, "row 2 (bad)");
  expect_row_error("bad,x.wav,0.5" + labels, "row 2 (bad)");
  expect_row_error("bad,x.wav,abc" + labels, "row 2 (bad)");
  expect_row_error("ok,y.wav,2.0" + labels, "duplicate");

  DatasetManifest m;
  m.records = {Record("a", 0.0, {})};
  EXPECT_THROW(SaveManifest(m, dir / "x.csv"), ValidationError);
}

}  // namespace
}  // namespace sscaf::audio
