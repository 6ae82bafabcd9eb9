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

#include "leakcheck/embedding_set.h"

#include <cmath>
#include <cstring>
#include <utility>

#include "leakcheck/error.h"

namespace leakcheck {

std::vector<ManifestRecord> SequentialManifest(std::size_t count,
                                               const std::string& prefix) {
  std::vector<ManifestRecord> manifest(count);
  for (std::size_t i = 0; i < count; ++i) {
    manifest[i].row_index = i;
    manifest[i].image_path = prefix + std::to_string(i);
  }
  return manifest;
}

double EuclideanNorm(std::span<const float> row) {
  double sum = 0.0;
  for (float x : row) sum += static_cast<double>(x) * static_cast<double>(x);
  return std::sqrt(sum);
}

EmbeddingSet::EmbeddingSet(std::size_t dim) : dim_(dim) {
  if (dim_ == 0) {
    throw Error(ErrorCode::kDimensionZero, "embedding dimension must be >= 1");
  }
}

EmbeddingSet EmbeddingSet::Create(std::string dataset_id, std::size_t dim,
                                  std::vector<float> vectors,
                                  std::vector<ManifestRecord> manifest,
                                  bool normalized) {
  EmbeddingSet set(dim);
  const std::size_t count = manifest.size();
  if (vectors.size() != count * dim) {
    throw Error(ErrorCode::kInvariantViolation,
                "vector payload has " + std::to_string(vectors.size()) +
                    " floats, expected count*dim = " +
                    std::to_string(count) + "*" + std::to_string(dim));
  }
  for (std::size_t i = 0; i < count; ++i) {
    if (manifest[i].row_index != i) {
      throw Error(ErrorCode::kInvariantViolation,
                  "manifest record " + std::to_string(i) + " has row_index " +
                      std::to_string(manifest[i].row_index));
    }
  }
  set.dataset_id_ = std::move(dataset_id);
  set.vectors_ = std::move(vectors);
  set.manifest_ = std::move(manifest);
  set.normalized_ = normalized;
  if (normalized) {
    for (std::size_t i = 0; i < count; ++i) {
      const double norm = EuclideanNorm(set.Row(i));
      if (!(std::abs(norm - 1.0) <= kUnitNormTolerance)) {
        throw Error(ErrorCode::kInvariantViolation,
                    "row " + std::to_string(i) + " has norm " +
                        std::to_string(norm) + " but set is flagged normalized");
      }
    }
  }
  return set;
}

EmbeddingSet EmbeddingSet::WithDatasetId(std::string dataset_id) const {
  EmbeddingSet copy = *this;
  copy.dataset_id_ = std::move(dataset_id);
  return copy;
}

bool EmbeddingSet::operator==(const EmbeddingSet& other) const {
  return dataset_id_ == other.dataset_id_ && dim_ == other.dim_ &&
         normalized_ == other.normalized_ && manifest_ == other.manifest_ &&
         vectors_.size() == other.vectors_.size() &&
         (vectors_.empty() ||
          std::memcmp(vectors_.data(), other.vectors_.data(),
                      vectors_.size() * sizeof(float)) == 0);
}

void NormalizeInPlace(std::span<float> row) {
  const double norm = EuclideanNorm(row);
  if (!(norm >= kZeroNormThreshold)) {
    throw Error(ErrorCode::kZeroVector, "zero vector");
  }
  for (float& x : row) x = static_cast<float>(static_cast<double>(x) / norm);
}

EmbeddingSet Normalize(const EmbeddingSet& set) {
  std::vector<float> vectors(set.data().begin(), set.data().end());
  const std::size_t dim = set.dim();
  for (std::size_t i = 0; i < set.count(); ++i) {
    try {
      NormalizeInPlace(std::span<float>(vectors).subspan(i * dim, dim));
    } catch (const Error&) {
      throw Error(ErrorCode::kZeroVector,
                  "zero-vector at row " + std::to_string(i));
    }
  }
  return EmbeddingSet::Create(set.dataset_id(), dim, std::move(vectors),
                              set.manifest(), /*normalized=*/true);
}

}  // namespace leakcheck
