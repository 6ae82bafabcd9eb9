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

#include "leakcheck/random_embeddings.h"

#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

#include "leakcheck/error.h"

namespace leakcheck {

double GaussianSource::NextUniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double GaussianSource::Next() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  // u1 in (0, 1] keeps the logarithm finite.
  const double u1 = (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
  const double u2 = NextUniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

EmbeddingSet RandomUnitSet(std::string dataset_id, std::size_t count, std::size_t dim,
                           std::uint64_t seed) {
  if (dim == 0) throw Error(ErrorCode::kDimensionZero, "dim must be >= 1");
  GaussianSource gauss(seed);
  std::vector<float> vectors(count * dim);
  for (std::size_t i = 0; i < count; ++i) {
    std::span<float> row(vectors.data() + i * dim, dim);
    do {
      for (float& x : row) x = static_cast<float>(gauss.Next());
    } while (EuclideanNorm(row) < kZeroNormThreshold);
    NormalizeInPlace(row);
  }
  auto manifest = SequentialManifest(count, dataset_id + "/");
  return EmbeddingSet::Create(std::move(dataset_id), dim, std::move(vectors),
                              std::move(manifest), /*normalized=*/true);
}

}  // namespace leakcheck
