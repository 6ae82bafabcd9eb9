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

#include "leakcheck/embedding_io.h"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cstring>
#include <limits>
#include <utility>

#include "json.hpp"
#include "leakcheck/error.h"
#include "leakcheck/file_util.h"

namespace leakcheck {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::uint8_t kFlagNormalized = 0x01;

template <typename T>
void PutLittleEndian(std::string& out, T value) {
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<char>((static_cast<std::uint64_t>(value) >> (8 * i)) & 0xff));
  }
}

template <typename T>
T GetLittleEndian(std::string_view bytes, std::size_t offset) {
  std::uint64_t value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    value |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[offset + i]))
             << (8 * i);
  }
  return static_cast<T>(value);
}

std::string_view TrimLine(std::string_view line) {
  while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) {
    line.remove_suffix(1);
  }
  while (!line.empty() && (line.front() == ' ' || line.front() == '\t')) {
    line.remove_prefix(1);
  }
  return line;
}

template <typename Fn>
void ForEachLine(std::string_view text, Fn&& fn) {
  std::size_t line_no = 0;
  while (!text.empty()) {
    const std::size_t nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    ++line_no;
    fn(TrimLine(line), line_no);
    if (nl == std::string_view::npos) break;
    text.remove_prefix(nl + 1);
  }
}

std::optional<std::string> OptionalString(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) {
    throw Error(ErrorCode::kParseFailure, std::string("manifest field ") + key +
                                              " must be a string");
  }
  return it->get<std::string>();
}

}  // namespace

fs::path ManifestPathFor(const fs::path& embeddings_path) {
  fs::path manifest = embeddings_path;
  manifest.replace_filename(embeddings_path.stem().string() + ".manifest.jsonl");
  return manifest;
}

std::string EncodeEmbeddingFile(const EmbeddingSet& set) {
  if (set.dim() > std::numeric_limits<std::uint32_t>::max()) {
    throw Error(ErrorCode::kSizeOverflow, "dimension does not fit in u32");
  }
  std::string out;
  const std::size_t payload_bytes = set.data().size() * sizeof(float);
  out.reserve(kEmbeddingHeaderSize + payload_bytes);
  out.append(kEmbeddingMagic.data(), kEmbeddingMagic.size());
  PutLittleEndian<std::uint32_t>(out, kEmbeddingFormatVersion);
  PutLittleEndian<std::uint32_t>(out, static_cast<std::uint32_t>(set.dim()));
  PutLittleEndian<std::uint64_t>(out, set.count());
  PutLittleEndian<std::uint8_t>(out, kDtypeFloat32);
  PutLittleEndian<std::uint8_t>(out, set.normalized() ? kFlagNormalized : 0);
  out.append(6, '\0');
  if constexpr (std::endian::native == std::endian::little) {
    out.append(reinterpret_cast<const char*>(set.data().data()), payload_bytes);
  } else {
    for (float x : set.data()) PutLittleEndian<std::uint32_t>(out, std::bit_cast<std::uint32_t>(x));
  }
  return out;
}

EmbeddingSet DecodeEmbeddingFile(std::string_view bytes,
                                 std::vector<ManifestRecord> manifest,
                                 std::string dataset_id) {
  if (bytes.size() < kEmbeddingMagic.size() ||
      std::memcmp(bytes.data(), kEmbeddingMagic.data(), kEmbeddingMagic.size()) != 0) {
    throw Error(ErrorCode::kBadMagic, "not an EMBS file (bad magic)");
  }
  if (bytes.size() < kEmbeddingHeaderSize) {
    throw Error(ErrorCode::kTruncatedPayload, "EMBS header truncated");
  }
  const auto version = GetLittleEndian<std::uint32_t>(bytes, 4);
  if (version != kEmbeddingFormatVersion) {
    throw Error(ErrorCode::kUnsupportedVersion,
                "unsupported EMBS version " + std::to_string(version));
  }
  const auto dim = GetLittleEndian<std::uint32_t>(bytes, 8);
  const auto count = GetLittleEndian<std::uint64_t>(bytes, 12);
  const auto dtype = GetLittleEndian<std::uint8_t>(bytes, 20);
  const auto flags = GetLittleEndian<std::uint8_t>(bytes, 21);
  if (dtype != kDtypeFloat32) {
    throw Error(ErrorCode::kUnsupportedVersion,
                "unsupported EMBS dtype " + std::to_string(dtype));
  }
  if (dim == 0) throw Error(ErrorCode::kDimensionZero, "EMBS dim is zero");
  const std::uint64_t max_count =
      (std::numeric_limits<std::uint64_t>::max() - kEmbeddingHeaderSize) / (4ull * dim);
  if (count > max_count) {
    throw Error(ErrorCode::kTruncatedPayload, "EMBS count exceeds file size");
  }
  const std::uint64_t payload_bytes = count * dim * sizeof(float);
  const std::uint64_t available = bytes.size() - kEmbeddingHeaderSize;
  if (available < payload_bytes) {
    throw Error(ErrorCode::kTruncatedPayload,
                "EMBS payload truncated: expected " + std::to_string(payload_bytes) +
                    " bytes, found " + std::to_string(available));
  }
  if (available > payload_bytes) {
    throw Error(ErrorCode::kParseFailure, "trailing bytes after EMBS payload");
  }
  if (manifest.size() != count) {
    throw Error(ErrorCode::kManifestMismatch,
                "manifest has " + std::to_string(manifest.size()) +
                    " records, embedding file has " + std::to_string(count));
  }
  std::vector<float> vectors(count * dim);
  if constexpr (std::endian::native == std::endian::little) {
    std::memcpy(vectors.data(), bytes.data() + kEmbeddingHeaderSize, payload_bytes);
  } else {
    for (std::size_t i = 0; i < vectors.size(); ++i) {
      vectors[i] = std::bit_cast<float>(
          GetLittleEndian<std::uint32_t>(bytes, kEmbeddingHeaderSize + 4 * i));
    }
  }
  return EmbeddingSet::Create(std::move(dataset_id), dim, std::move(vectors),
                              std::move(manifest), (flags & kFlagNormalized) != 0);
}

void WriteEmbeddingSet(const EmbeddingSet& set, const fs::path& path) {
  WriteManifest(ManifestPathFor(path), set.manifest());
  WriteFileAtomic(path, EncodeEmbeddingFile(set));
}

EmbeddingSet ReadEmbeddingSet(const fs::path& path, std::optional<std::string> dataset_id) {
  const std::string bytes = ReadFileBytes(path);
  // Header problems take precedence over a missing manifest.
  if (bytes.size() < kEmbeddingMagic.size() ||
      std::memcmp(bytes.data(), kEmbeddingMagic.data(), kEmbeddingMagic.size()) != 0) {
    throw Error(ErrorCode::kBadMagic, path.string() + ": not an EMBS file (bad magic)");
  }
  std::vector<ManifestRecord> manifest = ReadManifest(ManifestPathFor(path));
  try {
    return DecodeEmbeddingFile(bytes, std::move(manifest),
                               dataset_id.value_or(path.stem().string()));
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

std::vector<ManifestRecord> ParseManifest(std::string_view text) {
  std::vector<ManifestRecord> records;
  ForEachLine(text, [&](std::string_view line, std::size_t line_no) {
    if (line.empty()) return;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kParseFailure,
                  "manifest line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!obj.is_object() || !obj.contains("row_index") || !obj["row_index"].is_number_unsigned() ||
        !obj.contains("image_path") || !obj["image_path"].is_string()) {
      throw Error(ErrorCode::kParseFailure,
                  "manifest line " + std::to_string(line_no) +
                      ": needs unsigned row_index and string image_path");
    }
    ManifestRecord record;
    record.row_index = obj["row_index"].get<std::uint64_t>();
    record.image_path = obj["image_path"].get<std::string>();
    record.subject_label = OptionalString(obj, "subject_label");
    record.notes = OptionalString(obj, "notes");
    records.push_back(std::move(record));
  });
  std::sort(records.begin(), records.end(),
            [](const ManifestRecord& a, const ManifestRecord& b) { return a.row_index < b.row_index; });
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (records[i].row_index != i) {
      throw Error(ErrorCode::kInvariantViolation,
                  "manifest row indices are not exactly 0.." +
                      std::to_string(records.size() - 1) + " (problem at " +
                      std::to_string(records[i].row_index) + ")");
    }
  }
  return records;
}

std::string EncodeManifest(std::span<const ManifestRecord> records) {
  std::string out;
  for (const auto& r : records) {
    json obj = {{"row_index", r.row_index}, {"image_path", r.image_path}};
    if (r.subject_label) obj["subject_label"] = *r.subject_label;
    if (r.notes) obj["notes"] = *r.notes;
    out += obj.dump();
    out.push_back('\n');
  }
  return out;
}

std::vector<ManifestRecord> ReadManifest(const fs::path& path) {
  try {
    return ParseManifest(ReadFileBytes(path));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kNotFound) throw;
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

void WriteManifest(const fs::path& path, std::span<const ManifestRecord> records) {
  WriteFileAtomic(path, EncodeManifest(records));
}

EmbeddingSet ImportCsv(const fs::path& csv_path, const fs::path& manifest_path,
                       std::string dataset_id) {
  const std::string text = ReadFileBytes(csv_path);
  std::vector<float> vectors;
  std::size_t dim = 0;
  std::size_t rows = 0;
  ForEachLine(text, [&](std::string_view line, std::size_t line_no) {
    if (line.empty()) return;
    std::size_t fields = 0;
    std::size_t pos = 0;
    while (true) {
      const std::size_t comma = line.find(',', pos);
      std::string_view token =
          TrimLine(line.substr(pos, comma == std::string_view::npos ? std::string_view::npos
                                                                     : comma - pos));
      float value = 0.0f;
      const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
      if (token.empty() || ec != std::errc() || ptr != token.data() + token.size()) {
        throw Error(ErrorCode::kParseFailure,
                    csv_path.string() + ":" + std::to_string(line_no) +
                        ": cannot parse '" + std::string(token) + "' as a float");
      }
      vectors.push_back(value);
      ++fields;
      if (comma == std::string_view::npos) break;
      pos = comma + 1;
    }
    if (rows == 0) {
      dim = fields;
    } else if (fields != dim) {
      throw Error(ErrorCode::kRaggedRows,
                  csv_path.string() + ":" + std::to_string(line_no) + ": row has " +
                      std::to_string(fields) + " values, expected " + std::to_string(dim));
    }
    ++rows;
  });
  if (rows == 0) {
    throw Error(ErrorCode::kEmptyInput, csv_path.string() + ": no embedding rows");
  }
  std::vector<ManifestRecord> manifest = ReadManifest(manifest_path);
  if (manifest.size() != rows) {
    throw Error(ErrorCode::kManifestMismatch,
                "CSV has " + std::to_string(rows) + " rows but manifest has " +
                    std::to_string(manifest.size()) + " records");
  }
  return EmbeddingSet::Create(std::move(dataset_id), dim, std::move(vectors),
                              std::move(manifest), /*normalized=*/false);
}

}  // namespace leakcheck
