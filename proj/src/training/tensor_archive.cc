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

#include "sscaf/training/tensor_archive.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include <fmt/format.h>

#include "sscaf/common/error.h"
#include "sscaf/common/kv_config.h"

namespace sscaf::training {

static_assert(std::endian::native == std::endian::little, "archive I/O assumes a little-endian host");

namespace {

constexpr std::size_t kMagicSize = 8;

std::string ShapeText(const ag::Shape& shape) {
  std::string s;
  for (std::size_t i = 0; i < shape.size(); ++i) s += (i ? "x" : "") + std::to_string(shape[i]);
  return shape.empty() ? "scalar" : s;
}

ag::Shape ParseShape(const std::string& text, const std::filesystem::path& path) {
  if (text == "scalar") return {};
  ag::Shape shape;
  for (const auto& part : SplitString(text, 'x')) {
    try {
      std::size_t used = 0;
      const long v = std::stol(part, &used);
      if (used != part.size() || v < 0) throw std::invalid_argument(part);
      shape.push_back(static_cast<int>(v));
    } catch (const std::exception&) {
      throw LoadError(fmt::format("{}: malformed tensor shape '{}'", path.string(), text));
    }
  }
  return shape;
}

bool IsReservedKey(const std::string& key) {
  return key == "tensor" || key == "format_version" || key == "tensor_count";
}

}  // namespace

const std::string& TensorArchive::Meta(const std::string& key) const {
  for (const auto& [k, v] : meta) {
    if (k == key) return v;
  }
  throw LoadError(fmt::format("archive has no '{}' entry", key));
}

bool TensorArchive::HasMeta(const std::string& key) const {
  for (const auto& kv : meta) {
    if (kv.first == key) return true;
  }
  return false;
}

const ArchiveTensor& TensorArchive::Tensor(const std::string& name) const {
  for (const auto& t : tensors) {
    if (t.name == name) return t;
  }
  throw LoadError(fmt::format("archive has no tensor '{}'", name));
}

void WriteTensorArchive(const TensorArchive& archive, const std::filesystem::path& path) {
  std::string header = fmt::format("format_version={}\ntensor_count={}\n", kArchiveFormatVersion,
                                   archive.tensors.size());
  for (const auto& [k, v] : archive.meta) {
    if (k.empty() || IsReservedKey(k) || k.find_first_of("=\n") != std::string::npos ||
        v.find('\n') != std::string::npos) {
      throw InputError(fmt::format("archive metadata key '{}' is not storable", k));
    }
    header += k + "=" + v + "\n";
  }
  std::size_t offset = 0;
  for (const auto& t : archive.tensors) {
    if (t.name.find_first_of(" \n") != std::string::npos || t.name.empty()) {
      throw InputError(fmt::format("archive tensor name '{}' is not storable", t.name));
    }
    if (ag::NumElements(t.shape) != t.data.size()) {
      throw InputError(fmt::format("archive tensor '{}': shape {} does not match {} values", t.name,
                                   ag::ShapeToString(t.shape), t.data.size()));
    }
    header += fmt::format("tensor={} float32 {} {}\n", t.name, ShapeText(t.shape), offset);
    offset += t.data.size() * sizeof(float);
  }

  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(fmt::format("cannot write '{}'", tmp.string()));
    out.write(kArchiveMagic, kMagicSize);
    const uint32_t length = static_cast<uint32_t>(header.size());
    out.write(reinterpret_cast<const char*>(&length), sizeof(length));
    out.write(header.data(), static_cast<std::streamsize>(header.size()));
    for (const auto& t : archive.tensors) {
      out.write(reinterpret_cast<const char*>(t.data.data()),
                static_cast<std::streamsize>(t.data.size() * sizeof(float)));
    }
    if (!out) throw IoError(fmt::format("error writing '{}'", tmp.string()));
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError(fmt::format("cannot move archive into place at '{}': {}", path.string(), ec.message()));
}

TensorArchive ReadTensorArchive(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open '{}'", path.string()));
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const std::string where = path.string();
  if (bytes.size() < kMagicSize + 4 || bytes.compare(0, kMagicSize, kArchiveMagic) != 0) {
    throw LoadError(fmt::format("{}: not an archive (bad magic)", where));
  }
  uint32_t length = 0;
  std::memcpy(&length, bytes.data() + kMagicSize, sizeof(length));
  const std::size_t payload_start = kMagicSize + 4 + length;
  if (payload_start > bytes.size()) throw LoadError(fmt::format("{}: truncated header", where));

  TensorArchive archive;
  std::istringstream header(bytes.substr(kMagicSize + 4, length));
  int version = -1;
  long declared_count = -1;
  std::size_t expected_offset = 0;
  for (std::string line; std::getline(header, line);) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw LoadError(fmt::format("{}: malformed header line '{}'", where, line));
    const std::string key = line.substr(0, eq);
    const std::string value = line.substr(eq + 1);
    if (key == "format_version") {
      version = std::atoi(value.c_str());
    } else if (key == "tensor_count") {
      declared_count = std::atol(value.c_str());
    } else if (key == "tensor") {
      std::istringstream fields(value);
      std::string name, dtype, shape_text;
      std::size_t offset = 0;
      if (!(fields >> name >> dtype >> shape_text >> offset)) {
        throw LoadError(fmt::format("{}: malformed tensor entry '{}'", where, value));
      }
      if (dtype != "float32") throw LoadError(fmt::format("{}: tensor '{}' has dtype {}", where, name, dtype));
      if (offset != expected_offset) {
        throw LoadError(fmt::format("{}: tensor '{}' at offset {}, expected {}", where, name, offset,
                                    expected_offset));
      }
      ArchiveTensor t;
      t.name = name;
      t.shape = ParseShape(shape_text, path);
      const std::size_t count = ag::NumElements(t.shape);
      const std::size_t begin = payload_start + offset;
      if (begin + count * sizeof(float) > bytes.size()) {
        throw LoadError(fmt::format("{}: truncated payload in tensor '{}'", where, name));
      }
      t.data.resize(count);
      std::memcpy(t.data.data(), bytes.data() + begin, count * sizeof(float));
      expected_offset += count * sizeof(float);
      archive.tensors.push_back(std::move(t));
    } else {
      archive.meta.emplace_back(key, value);
    }
  }
  if (version != kArchiveFormatVersion) {
    throw LoadError(fmt::format("{}: unsupported format version {}", where, version));
  }
  if (declared_count != static_cast<long>(archive.tensors.size())) {
    throw LoadError(fmt::format("{}: header declares {} tensors but lists {}", where, declared_count,
                                archive.tensors.size()));
  }
  if (payload_start + expected_offset != bytes.size()) {
    throw LoadError(fmt::format("{}: payload is {} bytes, header describes {}", where,
                                bytes.size() - payload_start, expected_offset));
  }
  return archive;
}

}  // namespace sscaf::training
