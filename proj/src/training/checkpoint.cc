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

#include "sscaf/training/checkpoint.h"

#include <fmt/format.h>

#include "sscaf/common/error.h"
#include "sscaf/common/kv_config.h"
#include "sscaf/training/tensor_archive.h"

namespace sscaf::training {

namespace {

constexpr char kLedgerPrefix[] = "ledger.";
constexpr char kMetricPrefix[] = "metric.";

}  // namespace

void SaveCheckpoint(const model::Model<float>& model, const CheckpointInfo& info,
                    const std::filesystem::path& path) {
  TensorArchive archive;
  archive.meta.emplace_back("content", "checkpoint");
  archive.meta.emplace_back("model_kind", model::ModelKindName(model.kind()));
  KeyValueConfig kv;
  model.config().ToKeyValue(kv);
  for (const auto& [k, v] : kv.values()) archive.meta.emplace_back(k, v);
  archive.meta.emplace_back("epoch", std::to_string(info.epoch));
  archive.meta.emplace_back("seed", std::to_string(info.seed));
  for (const auto& [name, value] : info.metrics) archive.meta.emplace_back(kMetricPrefix + name, FormatDouble(value));
  for (const auto& entry : model.shape_ledger()) {
    archive.meta.emplace_back(kLedgerPrefix + entry.name, ag::ShapeToString(entry.shape));
  }
  for (const auto& nt : model.Parameters()) {
    archive.tensors.push_back({nt.name, nt.tensor.shape(), nt.tensor.vec()});
  }
  WriteTensorArchive(archive, path);
}

LoadedCheckpoint LoadCheckpoint(const std::filesystem::path& path) {
  const TensorArchive archive = ReadTensorArchive(path);
  const std::string where = path.string();
  if (!archive.HasMeta("content") || archive.Meta("content") != "checkpoint") {
    throw LoadError(fmt::format("{}: not a model checkpoint", where));
  }
  LoadedCheckpoint out;
  KeyValueConfig kv;
  try {
    out.kind = model::ParseModelKind(archive.Meta("model_kind"));
    for (const auto& [k, v] : archive.meta) {
      if (k.starts_with("model.")) kv.Set(k, v);
    }
    const model::DcnnCafConfig config = model::DcnnCafConfig::FromKeyValue(kv);
    out.info.epoch = std::stoi(archive.Meta("epoch"));
    out.info.seed = std::stoull(archive.Meta("seed"));
    for (const auto& [k, v] : archive.meta) {
      if (k.starts_with(kMetricPrefix)) out.info.metrics.emplace_back(k.substr(sizeof(kMetricPrefix) - 1), std::stod(v));
    }
    out.model = model::BuildModel<float>(out.kind, config, out.info.seed);
  } catch (const LoadError&) {
    throw;
  } catch (const std::exception& e) {
    throw LoadError(fmt::format("{}: invalid checkpoint header: {}", where, e.what()));
  }

  std::size_t ledger_entries = 0;
  for (const auto& [k, v] : archive.meta) {
    if (!k.starts_with(kLedgerPrefix)) continue;
    ++ledger_entries;
    const std::string name = k.substr(sizeof(kLedgerPrefix) - 1);
    std::string rebuilt;
    try {
      rebuilt = ag::ShapeToString(out.model->LedgerShape(name));
    } catch (const InputError&) {
      throw LoadError(fmt::format("{}: ledger entry '{}' does not exist in the rebuilt model", where, name));
    }
    if (rebuilt != v) {
      throw LoadError(fmt::format("{}: ledger entry '{}' is {} but the rebuilt model has {}", where, name, v, rebuilt));
    }
  }
  if (ledger_entries != out.model->shape_ledger().size()) {
    throw LoadError(fmt::format("{}: {} ledger entries stored, model has {}", where, ledger_entries,
                                out.model->shape_ledger().size()));
  }

  auto params = out.model->Parameters();
  if (params.size() != archive.tensors.size()) {
    throw LoadError(fmt::format("{}: {} tensors stored, model has {}", where, archive.tensors.size(), params.size()));
  }
  for (auto& nt : params) {
    const ArchiveTensor& t = archive.Tensor(nt.name);
    if (t.shape != nt.tensor.shape()) {
      throw LoadError(fmt::format("{}: tensor '{}' is {} but the model expects {}", where, nt.name,
                                  ag::ShapeToString(t.shape), ag::ShapeToString(nt.tensor.shape())));
    }
  }
  for (auto& nt : params) {
    const ArchiveTensor& t = archive.Tensor(nt.name);
    std::copy(t.data.begin(), t.data.end(), nt.tensor.mutable_data().begin());
  }
  return out;
}

}  // namespace sscaf::training
