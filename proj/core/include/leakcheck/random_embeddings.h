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

#ifndef LEAKCHECK_RANDOM_EMBEDDINGS_H_
#define LEAKCHECK_RANDOM_EMBEDDINGS_H_

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>

#include "leakcheck/embedding_set.h"

namespace leakcheck {

// Seeded standard normal draws (Box-Muller over mt19937_64). Unlike
// std::normal_distribution the sequence does not depend on the standard
// library implementation.
class GaussianSource {
 public:
  explicit GaussianSource(std::uint64_t seed) : engine_(seed) {}

  double Next();
  // Uniform in [0, 1).
  double NextUniform();
  std::uint64_t NextBits() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// count rows of i.i.d. Gaussian directions, normalized; manifest paths are
// "<dataset_id>/<row>".
EmbeddingSet RandomUnitSet(std::string dataset_id, std::size_t count, std::size_t dim,
                           std::uint64_t seed);

}  // namespace leakcheck

#endif  // LEAKCHECK_RANDOM_EMBEDDINGS_H_
