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

#ifndef LEAKCHECK_EMBEDDING_SET_H_
#define LEAKCHECK_EMBEDDING_SET_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace leakcheck {

// Norm tolerance checked for sets flagged as normalized.
inline constexpr double kUnitNormTolerance = 1e-4;
// Rows with a Euclidean norm below this are unusable.
inline constexpr double kZeroNormThreshold = 1e-12;

// Binds one embedding row to the image it was extracted from.
struct ManifestRecord {
  std::uint64_t row_index = 0;
  std::string image_path;
  std::optional<std::string> subject_label;
  std::optional<std::string> notes;

  bool operator==(const ManifestRecord&) const = default;
};

// Manifest with records row_0 .. row_{count-1}; used for generated sets.
std::vector<ManifestRecord> SequentialManifest(std::size_t count,
                                               const std::string& prefix);

// Dense count x dim matrix of f32 embeddings plus its manifest. Immutable once
// built; every factory validates the invariants, so a live EmbeddingSet
// always satisfies them.
class EmbeddingSet {
 public:
  // Empty set of the given dimensionality.
  explicit EmbeddingSet(std::size_t dim = 1);

  // Throws kDimensionZero, kInvariantViolation (vector size or manifest
  // bijection) or kInvariantViolation when `normalized` is claimed but a row
  // is off the unit sphere by more than kUnitNormTolerance.
  static EmbeddingSet Create(std::string dataset_id, std::size_t dim,
                             std::vector<float> vectors,
                             std::vector<ManifestRecord> manifest,
                             bool normalized);

  const std::string& dataset_id() const { return dataset_id_; }
  std::size_t dim() const { return dim_; }
  std::size_t count() const { return manifest_.size(); }
  bool normalized() const { return normalized_; }
  bool empty() const { return manifest_.empty(); }

  std::span<const float> data() const { return vectors_; }
  std::span<const float> Row(std::size_t i) const {
    return std::span<const float>(vectors_).subspan(i * dim_, dim_);
  }
  const std::vector<ManifestRecord>& manifest() const { return manifest_; }

  EmbeddingSet WithDatasetId(std::string dataset_id) const;

  // Bit-exact comparison of the payload (float bit patterns, not values).
  bool operator==(const EmbeddingSet& other) const;

 private:
  std::string dataset_id_;
  std::size_t dim_;
  std::vector<float> vectors_;
  std::vector<ManifestRecord> manifest_;
  bool normalized_ = false;
};

// Scales every row to unit Euclidean norm. Throws kZeroVector naming the first
// row whose norm is below kZeroNormThreshold.
EmbeddingSet Normalize(const EmbeddingSet& set);

// Normalizes a single vector in place with the same rule as Normalize.
void NormalizeInPlace(std::span<float> row);

double EuclideanNorm(std::span<const float> row);

}  // namespace leakcheck

#endif  // LEAKCHECK_EMBEDDING_SET_H_
