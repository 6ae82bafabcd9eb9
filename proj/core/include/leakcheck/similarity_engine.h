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

#ifndef LEAKCHECK_SIMILARITY_ENGINE_H_
#define LEAKCHECK_SIMILARITY_ENGINE_H_

#include <cstddef>
#include <cstdint>
#include <vector>

#include "leakcheck/embedding_set.h"

namespace leakcheck {

// Candidate leakage pair: row of the synthetic set, row of the real set and
// their cosine similarity (f64 reference dot product of the unit rows).
struct ScoredPair {
  std::uint64_t synth_index = 0;
  std::uint64_t real_index = 0;
  double score = 0.0;

  bool operator==(const ScoredPair&) const = default;
};

// Total order used for every ranking: score descending, then synth_index
// ascending, then real_index ascending.
inline bool RanksBefore(const ScoredPair& a, const ScoredPair& b) {
  if (a.score != b.score) return a.score > b.score;
  if (a.synth_index != b.synth_index) return a.synth_index < b.synth_index;
  return a.real_index < b.real_index;
}

struct TopKResult {
  std::size_t k = 0;
  std::vector<ScoredPair> pairs;

  bool operator==(const TopKResult&) const = default;
};

struct NearestMatch {
  std::uint64_t real_index = 0;
  double score = 0.0;

  bool operator==(const NearestMatch&) const = default;
};

// One entry per synthetic row: the best real row, smallest index on ties.
struct NearestMatches {
  std::vector<NearestMatch> rows;

  bool operator==(const NearestMatches&) const = default;
};

struct EngineOptions {
  std::size_t query_tile = 256;
  std::size_t gallery_tile = 4096;
  // 0 means std::thread::hardware_concurrency().
  unsigned workers = 0;
};

struct EngineStats {
  std::uint64_t pairs_examined = 0;
  std::uint64_t candidates_rescored = 0;
  unsigned workers_used = 0;
};

// The k best (synthetic, real) pairs under RanksBefore, over every pair of
// rows; all pairs when k exceeds count_synth * count_real. Results do not
// depend on tile sizes or worker count.
//
// Errors: kInvalidArgument (k == 0 or zero tile size), kDimMismatch,
// kUnnormalizedInput, kEmptySet (either set empty), kSizeOverflow (more than
// 2^32 - 1 rows).
TopKResult TopKPairs(const EmbeddingSet& synthetic, const EmbeddingSet& real, std::size_t k,
                     const EngineOptions& options = {}, EngineStats* stats = nullptr);

// Nearest real row for every synthetic row. An empty synthetic set yields an
// empty result; an empty real set is kEmptySet.
NearestMatches FindNearestMatches(const EmbeddingSet& synthetic, const EmbeddingSet& real,
                                  const EngineOptions& options = {},
                                  EngineStats* stats = nullptr);

// Greedy walk over the ranked pair list that skips pairs whose real row was
// already taken, stopping after k pairs. Equivalent to ranking each real
// row's best pair, so at most count_real pairs come back.
TopKResult UniqueRealTopK(const EmbeddingSet& synthetic, const EmbeddingSet& real,
                          std::size_t k, const EngineOptions& options = {},
                          EngineStats* stats = nullptr);

}  // namespace leakcheck

#endif  // LEAKCHECK_SIMILARITY_ENGINE_H_
