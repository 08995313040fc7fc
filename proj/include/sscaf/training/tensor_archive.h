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

// Binary container for named float32 tensors, used for checkpoints and the
// feature cache:
//
//   "DCAFCKPT"                      8-byte magic
//   uint32 little-endian            header length in bytes
//   header                          UTF-8 "key=value" lines
//   payload                         float32 little-endian tensor data
//
// The header carries format_version, tensor_count, free-form metadata and
// one "tensor=<name> float32 <d0>x<d1>... <byte offset>" line per tensor, in
// payload order. Offsets are relative to the start of the payload.

#ifndef SSCAF_TRAINING_TENSOR_ARCHIVE_H_
#define SSCAF_TRAINING_TENSOR_ARCHIVE_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "sscaf/autograd/tensor.h"

namespace sscaf::training {

inline constexpr char kArchiveMagic[] = "DCAFCKPT";
inline constexpr int kArchiveFormatVersion = 1;

struct ArchiveTensor {
  std::string name;
  ag::Shape shape;
  std::vector<float> data;
};

struct TensorArchive {
  // Metadata in insertion order; keys must not contain '=' or newlines and
  // must not be "tensor", "format_version" or "tensor_count".
  std::vector<std::pair<std::string, std::string>> meta;
  std::vector<ArchiveTensor> tensors;

  // Throws LoadError if absent.
  const std::string& Meta(const std::string& key) const;
  bool HasMeta(const std::string& key) const;
  // Throws LoadError if absent.
  const ArchiveTensor& Tensor(const std::string& name) const;
};

// Writes atomically (temporary file + rename). Throws IoError.
void WriteTensorArchive(const TensorArchive& archive, const std::filesystem::path& path);

// Throws LoadError on a bad magic, an unsupported version, a malformed
// header, inconsistent offsets or a truncated/oversized payload, and IoError
// if the file cannot be opened.
TensorArchive ReadTensorArchive(const std::filesystem::path& path);

}  // namespace sscaf::training

#endif  // SSCAF_TRAINING_TENSOR_ARCHIVE_H_
