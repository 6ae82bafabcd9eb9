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

#ifndef LEAKCHECK_EMBEDDING_IO_H_
#define LEAKCHECK_EMBEDDING_IO_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "leakcheck/embedding_set.h"

namespace leakcheck {

// Binary embedding file ("EMBS"), all integers little-endian:
//
//   offset  size  field
//        0     4  magic "EMBS"
//        4     4  version (u32) = 1
//        8     4  dim (u32)
//       12     8  count (u64)
//       20     1  dtype (u8) = 1, f32
//       21     7  reserved; bit 0 of byte 21 marks a normalized set
//       28     -  payload: count*dim f32, row-major
//
// The manifest lives next to it as <stem>.manifest.jsonl.
inline constexpr std::array<char, 4> kEmbeddingMagic = {'E', 'M', 'B', 'S'};
inline constexpr std::uint32_t kEmbeddingFormatVersion = 1;
inline constexpr std::uint8_t kDtypeFloat32 = 1;
inline constexpr std::size_t kEmbeddingHeaderSize = 28;

std::filesystem::path ManifestPathFor(const std::filesystem::path& embeddings_path);

// Header plus payload, exactly as written to disk.
std::string EncodeEmbeddingFile(const EmbeddingSet& set);

// Parses header and payload. Errors: kBadMagic, kUnsupportedVersion,
// kDimensionZero, kTruncatedPayload, kParseFailure (trailing bytes),
// kManifestMismatch when the manifest size differs from the header count.
EmbeddingSet DecodeEmbeddingFile(std::string_view bytes,
                                 std::vector<ManifestRecord> manifest,
                                 std::string dataset_id);

// Writes the embedding file and its sibling manifest, each atomically.
void WriteEmbeddingSet(const EmbeddingSet& set, const std::filesystem::path& path);

// Reads a set written by WriteEmbeddingSet. The dataset id defaults to the
// file stem.
EmbeddingSet ReadEmbeddingSet(const std::filesystem::path& path,
                              std::optional<std::string> dataset_id = std::nullopt);

// Manifest: one JSON object per line with the ManifestRecord fields. Records
// may appear in any order but must cover row indices 0..n-1 exactly once;
// the returned list is sorted by row_index.
std::vector<ManifestRecord> ParseManifest(std::string_view text);
std::string EncodeManifest(std::span<const ManifestRecord> records);
std::vector<ManifestRecord> ReadManifest(const std::filesystem::path& path);
void WriteManifest(const std::filesystem::path& path,
                   std::span<const ManifestRecord> records);

// Imports a headerless CSV with one embedding per line. The result is not
// normalized. Errors: kRaggedRows, kParseFailure, kManifestMismatch,
// kEmptyInput for a file without rows.
EmbeddingSet ImportCsv(const std::filesystem::path& csv_path,
                       const std::filesystem::path& manifest_path,
                       std::string dataset_id);

}  // namespace leakcheck

#endif  // LEAKCHECK_EMBEDDING_IO_H_
