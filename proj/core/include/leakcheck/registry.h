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

#ifndef LEAKCHECK_REGISTRY_H_
#define LEAKCHECK_REGISTRY_H_

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace leakcheck {

enum class DatasetKind { kReal, kSynthetic, kBenchmark };

std::string_view DatasetKindName(DatasetKind kind);
DatasetKind ParseDatasetKind(std::string_view name);

struct DatasetRegistryEntry {
  std::string dataset_id;
  DatasetKind kind = DatasetKind::kReal;
  std::optional<std::string> generator_name;
  std::optional<std::string> training_dataset_id;
  // Paths as written in the registry file; relative paths resolve against the
  // registry's directory.
  std::filesystem::path embeddings;
  std::filesystem::path image_root;

  bool operator==(const DatasetRegistryEntry&) const = default;
};

// Registry JSON document:
//   {"datasets": [{"dataset_id": "...", "kind": "real|synthetic|benchmark",
//                  "generator_name": "...", "training_dataset_id": "...",
//                  "embeddings": "x.embs", "image_root": "images/x"}]}
class DatasetRegistry {
 public:
  DatasetRegistry() = default;

  // Validates id uniqueness and that every synthetic entry's
  // training_dataset_id names a registered real entry.
  static DatasetRegistry Load(const std::filesystem::path& path);
  static DatasetRegistry FromEntries(std::vector<DatasetRegistryEntry> entries,
                                     std::filesystem::path base_dir);

  void Save(const std::filesystem::path& path) const;

  // Throws kMissingDataset.
  const DatasetRegistryEntry& Get(std::string_view dataset_id) const;
  const DatasetRegistryEntry* Find(std::string_view dataset_id) const;

  std::filesystem::path EmbeddingsPath(const DatasetRegistryEntry& entry) const;
  std::filesystem::path ImageRoot(const DatasetRegistryEntry& entry) const;

  const std::vector<DatasetRegistryEntry>& entries() const { return entries_; }
  const std::filesystem::path& base_dir() const { return base_dir_; }

 private:
  void Validate() const;

  std::vector<DatasetRegistryEntry> entries_;
  std::filesystem::path base_dir_;
};

}  // namespace leakcheck

#endif  // LEAKCHECK_REGISTRY_H_
