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

#ifndef LEAKCHECK_REFERENCE_ENGINE_H_
#define LEAKCHECK_REFERENCE_ENGINE_H_

#include <cstddef>

#include "leakcheck/embedding_set.h"
#include "leakcheck/similarity_engine.h"

namespace leakcheck {

// Untiled single-threaded double loop with f64 accumulation. It is the
// baseline `bench` times the engine against and must return identical
// results. Argument checks match TopKPairs / FindNearestMatches.
TopKResult NaiveTopKPairs(const EmbeddingSet& synthetic, const EmbeddingSet& real,
                          std::size_t k);
NearestMatches NaiveNearestMatches(const EmbeddingSet& synthetic, const EmbeddingSet& real);

}  // namespace leakcheck

#endif  // LEAKCHECK_REFERENCE_ENGINE_H_
