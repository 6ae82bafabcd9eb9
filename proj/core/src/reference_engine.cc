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

#include "leakcheck/reference_engine.h"

#include <algorithm>
#include <queue>
#include <vector>

#include "leakcheck/error.h"
#include "leakcheck/tile_kernel.h"

namespace leakcheck {
namespace {

void CheckInputs(const EmbeddingSet& synthetic, const EmbeddingSet& real) {
  if (synthetic.dim() != real.dim()) {
    throw Error(ErrorCode::kDimMismatch, "dimension mismatch");
  }
  if (!synthetic.normalized() || !real.normalized()) {
    throw Error(ErrorCode::kUnnormalizedInput, "both embedding sets must be normalized");
  }
  if (real.empty()) throw Error(ErrorCode::kEmptySet, "real set is empty");
}

}  // namespace

TopKResult NaiveTopKPairs(const EmbeddingSet& synthetic, const EmbeddingSet& real,
                          std::size_t k) {
  if (k == 0) throw Error(ErrorCode::kInvalidArgument, "k must be >= 1");
  CheckInputs(synthetic, real);
  if (synthetic.empty()) throw Error(ErrorCode::kEmptySet, "synthetic set is empty");

  // Heap top is the worst pair kept so far.
  std::priority_queue<ScoredPair, std::vector<ScoredPair>, decltype(&RanksBefore)> heap(
      &RanksBefore);
  for (std::size_t i = 0; i < synthetic.count(); ++i) {
    const auto s = synthetic.Row(i);
    for (std::size_t j = 0; j < real.count(); ++j) {
      const ScoredPair pair{i, j, ReferenceDot(s, real.Row(j))};
      if (heap.size() < k) {
        heap.push(pair);
      } else if (RanksBefore(pair, heap.top())) {
        heap.pop();
        heap.push(pair);
      }
    }
  }
  TopKResult result;
  result.k = k;
  result.pairs.resize(heap.size());
  for (std::size_t n = heap.size(); n > 0; --n) {
    result.pairs[n - 1] = heap.top();
    heap.pop();
  }
  return result;
}

NearestMatches NaiveNearestMatches(const EmbeddingSet& synthetic, const EmbeddingSet& real) {
  CheckInputs(synthetic, real);
  NearestMatches result;
  result.rows.reserve(synthetic.count());
  for (std::size_t i = 0; i < synthetic.count(); ++i) {
    const auto s = synthetic.Row(i);
    NearestMatch best{0, ReferenceDot(s, real.Row(0))};
    for (std::size_t j = 1; j < real.count(); ++j) {
      const double score = ReferenceDot(s, real.Row(j));
      if (score > best.score) best = {j, score};
    }
    result.rows.push_back(best);
  }
  return result;
}

}  // namespace leakcheck
