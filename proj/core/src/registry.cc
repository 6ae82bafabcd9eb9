// Copyright 2026 The Leakcheck Authors
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

#include "leakcheck/registry.h"

#include <set>
#include <utility>

#include "json.hpp"
#include "leakcheck/error.h"
#include "leakcheck/file_util.h"

namespace leakcheck {
namespace fs = std::filesystem;
using nlohmann::json;

std::string_view DatasetKindName(DatasetKind kind) {
  switch (kind) {
    case DatasetKind::kReal: return "real";
    case DatasetKind::kSynthetic: return "synthetic";
    case DatasetKind::kBenchmark: return "benchmark";
  }
  return "real";
}

DatasetKind ParseDatasetKind(std::string_view name) {
  if (name == "real") return DatasetKind::kReal;
  if (name == "synthetic") return DatasetKind::kSynthetic;
  if (name == "benchmark") return DatasetKind::kBenchmark;
  throw Error(ErrorCode::kParseFailure, "unknown dataset kind '" + std::string(name) + "'");
}

namespace {

std::optional<std::string> OptionalField(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  return it->get<std::string>();
}

}  // namespace

DatasetRegistry DatasetRegistry::Load(const fs::path& path) {
  json doc;
  try {
    doc = json::parse(ReadFileBytes(path));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParseFailure, path.string() + ": " + e.what());
  }
  std::vector<DatasetRegistryEntry> entries;
  try {
    for (const auto& item : doc.at("datasets")) {
      DatasetRegistryEntry entry;
      entry.dataset_id = item.at("dataset_id").get<std::string>();
      entry.kind = ParseDatasetKind(item.at("kind").get<std::string>());
      entry.generator_name = OptionalField(item, "generator_name");
      entry.training_dataset_id = OptionalField(item, "training_dataset_id");
      entry.embeddings = OptionalField(item, "embeddings").value_or("");
      entry.image_root = OptionalField(item, "image_root").value_or("");
      entries.push_back(std::move(entry));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParseFailure, path.string() + ": " + e.what());
  }
  return FromEntries(std::move(entries), path.parent_path());
}

DatasetRegistry DatasetRegistry::FromEntries(std::vector<DatasetRegistryEntry> entries,
                                             fs::path base_dir) {
  DatasetRegistry registry;
  registry.entries_ = std::move(entries);
  registry.base_dir_ = std::move(base_dir);
  registry.Validate();
  return registry;
}

void DatasetRegistry::Validate() const {
  std::set<std::string_view> ids;
  for (const auto& e : entries_) {
    if (e.dataset_id.empty()) {
      throw Error(ErrorCode::kInvariantViolation, "registry entry with empty dataset_id");
    }
    if (!ids.insert(e.dataset_id).second) {
      throw Error(ErrorCode::kInvariantViolation, "duplicate dataset_id " + e.dataset_id);
    }
  }
  for (const auto& e : entries_) {
    if (e.kind != DatasetKind::kSynthetic || !e.training_dataset_id) continue;
    const DatasetRegistryEntry* training = Find(*e.training_dataset_id);
    if (training == nullptr || training->kind != DatasetKind::kReal) {
      throw Error(ErrorCode::kInvariantViolation,
                  "synthetic dataset " + e.dataset_id + " names training dataset " +
                      *e.training_dataset_id + ", which is not a registered real dataset");
    }
  }
}

void DatasetRegistry::Save(const fs::path& path) const {
  json datasets = json::array();
  for (const auto& e : entries_) {
    json item = {{"dataset_id", e.dataset_id},
                 {"kind", std::string(DatasetKindName(e.kind))},
                 {"embeddings", e.embeddings.string()},
                 {"image_root", e.image_root.string()}};
    item["generator_name"] = e.generator_name ? json(*e.generator_name) : json(nullptr);
    item["training_dataset_id"] =
        e.training_dataset_id ? json(*e.training_dataset_id) : json(nullptr);
    datasets.push_back(std::move(item));
  }
  WriteFileAtomic(path, json{{"datasets", datasets}}.dump(2) + "\n");
}

const DatasetRegistryEntry* DatasetRegistry::Find(std::string_view dataset_id) const {
  for (const auto& e : entries_) {
    if (e.dataset_id == dataset_id) return &e;
  }
  return nullptr;
}

const DatasetRegistryEntry& DatasetRegistry::Get(std::string_view dataset_id) const {
  const DatasetRegistryEntry* entry = Find(dataset_id);
  if (entry == nullptr) {
    throw Error(ErrorCode::kMissingDataset,
                "dataset '" + std::string(dataset_id) + "' is not registered");
  }
  return *entry;
}

fs::path DatasetRegistry::EmbeddingsPath(const DatasetRegistryEntry& entry) const {
  return entry.embeddings.is_absolute() ? entry.embeddings : base_dir_ / entry.embeddings;
}

fs::path DatasetRegistry::ImageRoot(const DatasetRegistryEntry& entry) const {
  return entry.image_root.is_absolute() ? entry.image_root : base_dir_ / entry.image_root;
}

}  // namespace leakcheck
