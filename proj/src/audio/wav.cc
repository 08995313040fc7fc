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

#include "sscaf/audio/wav.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include <fmt/format.h>

#include "sscaf/common/error.h"

namespace sscaf::audio {

namespace {

constexpr uint16_t kFormatPcm = 1;
constexpr uint16_t kFormatFloat = 3;
constexpr uint16_t kFormatExtensible = 0xFFFE;

uint16_t ReadU16(const unsigned char* p) {
  return static_cast<uint16_t>(p[0] | (p[1] << 8));
}

uint32_t ReadU32(const unsigned char* p) {
  return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
         (static_cast<uint32_t>(p[2]) << 16) | (static_cast<uint32_t>(p[3]) << 24);
}

void PutU16(std::string& out, uint16_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>(v >> 8));
}

void PutU32(std::string& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

struct FormatChunk {
  uint16_t tag = 0;
  uint16_t channels = 0;
  uint32_t sample_rate = 0;
  uint16_t bits = 0;
};

void WriteBytes(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(fmt::format("cannot open {} for writing", path.string()));
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError(fmt::format("failed writing {}", path.string()));
}

}  // namespace

int16_t QuantizePcm16(float x) {
  const double clipped = std::clamp(static_cast<double>(x), -1.0, 1.0);
  const double q = std::round(clipped * 32768.0);
  return static_cast<int16_t>(std::clamp(q, -32768.0, 32767.0));
}

AudioClip LoadWav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open {}", path.string()));
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const auto* b = reinterpret_cast<const unsigned char*>(bytes.data());
  const std::size_t n = bytes.size();
  const std::string where = path.string();

  if (n < 12 || std::memcmp(b, "RIFF", 4) != 0 || std::memcmp(b + 8, "WAVE", 4) != 0) {
    throw FormatError(fmt::format("{}: not a RIFF/WAVE file", where));
  }

  FormatChunk fmt_chunk;
  bool have_fmt = false;
  const unsigned char* data = nullptr;
  std::size_t data_size = 0;
  std::size_t pos = 12;
  while (pos + 8 <= n) {
    const unsigned char* id = b + pos;
    const std::size_t size = ReadU32(b + pos + 4);
    const std::size_t body = pos + 8;
    if (std::memcmp(id, "fmt ", 4) == 0) {
      if (size < 16 || body + size > n) {
        throw FormatError(fmt::format("{}: truncated fmt chunk", where));
      }
      fmt_chunk.tag = ReadU16(b + body);
      fmt_chunk.channels = ReadU16(b + body + 2);
      fmt_chunk.sample_rate = ReadU32(b + body + 4);
      fmt_chunk.bits = ReadU16(b + body + 14);
      if (fmt_chunk.tag == kFormatExtensible) {
        if (size < 40) throw FormatError(fmt::format("{}: truncated extensible fmt chunk", where));
        // The first two bytes of the sub-format GUID carry the plain format tag.
        fmt_chunk.tag = ReadU16(b + body + 24);
      }
      have_fmt = true;
    } else if (std::memcmp(id, "data", 4) == 0) {
      if (!have_fmt) throw FormatError(fmt::format("{}: data chunk precedes fmt chunk", where));
      if (body + size > n) throw FormatError(fmt::format("{}: truncated data chunk", where));
      data = b + body;
      data_size = size;
      break;
    }
    pos = body + size + (size & 1);  // chunks are word aligned
  }
  if (!have_fmt) throw FormatError(fmt::format("{}: missing fmt chunk", where));
  if (data == nullptr) throw FormatError(fmt::format("{}: missing data chunk", where));
  if (fmt_chunk.sample_rate == 0) throw FormatError(fmt::format("{}: zero sample rate", where));

  const bool pcm16 = fmt_chunk.tag == kFormatPcm && fmt_chunk.bits == 16;
  const bool float32 = fmt_chunk.tag == kFormatFloat && fmt_chunk.bits == 32;
  if (!pcm16 && !float32) {
    throw UnsupportedError(fmt::format("{}: unsupported encoding (format tag {}, {} bits)", where,
                                       fmt_chunk.tag, fmt_chunk.bits));
  }
  if (fmt_chunk.channels != 1 && fmt_chunk.channels != 2) {
    throw UnsupportedError(
        fmt::format("{}: unsupported channel count {}", where, fmt_chunk.channels));
  }
  const std::size_t bytes_per_sample = pcm16 ? 2 : 4;
  const std::size_t frame_bytes = bytes_per_sample * fmt_chunk.channels;
  const std::size_t frames = data_size / frame_bytes;

  AudioClip clip;
  clip.sample_rate = static_cast<int>(fmt_chunk.sample_rate);
  clip.samples.resize(frames);
  for (std::size_t i = 0; i < frames; ++i) {
    double acc = 0.0;
    for (int c = 0; c < fmt_chunk.channels; ++c) {
      const unsigned char* p = data + i * frame_bytes + c * bytes_per_sample;
      if (pcm16) {
        acc += static_cast<double>(static_cast<int16_t>(ReadU16(p))) / 32768.0;
      } else {
        const uint32_t bits = ReadU32(p);
        float v;
        std::memcpy(&v, &bits, sizeof(v));
        if (!std::isfinite(v)) {
          throw FormatError(fmt::format("{}: non-finite sample at frame {}", where, i));
        }
        acc += static_cast<double>(v);
      }
    }
    clip.samples[i] = static_cast<float>(acc / fmt_chunk.channels);
  }
  return clip;
}

void WriteWavChannels(const std::vector<std::vector<float>>& channels, int sample_rate,
                      WavEncoding encoding, const std::filesystem::path& path) {
  if (channels.empty()) throw InputError("write_wav: no channels");
  if (sample_rate <= 0) throw InputError(fmt::format("write_wav: bad sample rate {}", sample_rate));
  const std::size_t frames = channels[0].size();
  for (const auto& ch : channels) {
    if (ch.size() != frames) throw InputError("write_wav: channels differ in length");
    for (const float v : ch) {
      if (!std::isfinite(v)) throw InputError("write_wav: non-finite sample");
    }
  }
  const auto num_channels = static_cast<uint16_t>(channels.size());
  const uint16_t bits = encoding == WavEncoding::kPcm16 ? 16 : 32;
  const uint16_t block_align = static_cast<uint16_t>(num_channels * bits / 8);
  const uint32_t data_bytes = static_cast<uint32_t>(frames * block_align);

  std::string out;
  out.reserve(44 + data_bytes);
  out += "RIFF";
  PutU32(out, 36 + data_bytes);
  out += "WAVEfmt ";
  PutU32(out, 16);
  PutU16(out, encoding == WavEncoding::kPcm16 ? kFormatPcm : kFormatFloat);
  PutU16(out, num_channels);
  PutU32(out, static_cast<uint32_t>(sample_rate));
  PutU32(out, static_cast<uint32_t>(sample_rate) * block_align);
  PutU16(out, block_align);
  PutU16(out, bits);
  out += "data";
  PutU32(out, data_bytes);
  for (std::size_t i = 0; i < frames; ++i) {
    for (const auto& ch : channels) {
      if (encoding == WavEncoding::kPcm16) {
        PutU16(out, static_cast<uint16_t>(QuantizePcm16(ch[i])));
      } else {
        uint32_t v;
        std::memcpy(&v, &ch[i], sizeof(v));
        PutU32(out, v);
      }
    }
  }
  WriteBytes(path, out);
}

void WriteWav(const AudioClip& clip, const std::filesystem::path& path) {
  WriteWavChannels({clip.samples}, clip.sample_rate, WavEncoding::kPcm16, path);
}

}  // namespace sscaf::audio
