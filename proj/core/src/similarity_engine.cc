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

#include "leakcheck/similarity_engine.h"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <string>
#include <thread>
#include <utility>

#include "leakcheck/error.h"
#include "leakcheck/tile_kernel.h"

namespace leakcheck {

// Screening scheme shared by all three searches: tiles produce f32 scores
// whose distance from the f64 reference score is at most eps (TileErrorBound
// scaled by the largest row norms). A pair can only belong to the exact
// answer if its f32 score is within 2*eps of the current f32 cutoff, so
// everything inside that margin is kept and re-scored with ReferenceDot before
// the final ranking.

namespace {

constexpr float kNegInf = -std::numeric_limits<float>::infinity();

struct RowRange {
  std::size_t begin = 0;
  std::size_t end = 0;
};

struct Candidate {
  float score;
  std::uint32_t query;
  std::uint32_t gallery;
};

// Largest float not above `value`.
float FloatAtOrBelow(double value) {
  float f = static_cast<float>(value);
  if (static_cast<double>(f) > value) f = std::nextafter(f, kNegInf);
  return f;
}

double MaxRowNorm(const EmbeddingSet& set) {
  double max_norm = 0.0;
  for (std::size_t i = 0; i < set.count(); ++i) {
    max_norm = std::max(max_norm, EuclideanNorm(set.Row(i)));
  }
  return max_norm;
}

double ScreeningMargin(const EmbeddingSet& queries, const EmbeddingSet& gallery) {
  // The 1e-6 slack absorbs rounding in the norm computation itself.
  return 2.0 * TileErrorBound(queries.dim()) * MaxRowNorm(queries) * MaxRowNorm(gallery) *
         (1.0 + 1e-6);
}

void ValidateInputs(const EmbeddingSet& synthetic, const EmbeddingSet& real,
                    const EngineOptions& options) {
  if (options.query_tile == 0 || options.gallery_tile == 0) {
    throw Error(ErrorCode::kInvalidArgument, "tile sizes must be >= 1");
  }
  if (synthetic.dim() != real.dim()) {
    throw Error(ErrorCode::kDimMismatch,
                "dimension mismatch: synthetic " + std::to_string(synthetic.dim()) +
                    ", real " + std::to_string(real.dim()));
  }
  if (!synthetic.normalized() || !real.normalized()) {
    throw Error(ErrorCode::kUnnormalizedInput,
                "both embedding sets must be normalized (dataset '" +
                    (synthetic.normalized() ? real.dataset_id() : synthetic.dataset_id()) +
                    "' is not)");
  }
  constexpr std::size_t kMaxRows = std::numeric_limits<std::uint32_t>::max();
  if (synthetic.count() > kMaxRows || real.count() > kMaxRows) {
    throw Error(ErrorCode::kSizeOverflow, "embedding sets are limited to 2^32-1 rows");
  }
}

unsigned ResolveWorkers(unsigned requested, std::size_t gallery_rows) {
  unsigned workers = requested != 0 ? requested : std::thread::hardware_concurrency();
  workers = std::max(workers, 1u);
  return static_cast<unsigned>(
      std::min<std::size_t>(workers, std::max<std::size_t>(gallery_rows, 1)));
}

std::vector<RowRange> PartitionRows(std::size_t rows, unsigned parts) {
  std::vector<RowRange> ranges(parts);
  const std::size_t base = rows / parts;
  const std::size_t extra = rows % parts;
  std::size_t begin = 0;
  for (unsigned p = 0; p < parts; ++p) {
    const std::size_t size = base + (p < extra ? 1 : 0);
    ranges[p] = RowRange{begin, begin + size};
    begin += size;
  }
  return ranges;
}

// Feeds every (query tile, gallery tile) block of queries x gallery[range]
// to the collector. Returns the number of pairs examined.
template <typename Collector>
std::uint64_t ScanBlocks(const MatrixView& queries, const MatrixView& gallery, RowRange range,
                         const EngineOptions& options, Collector& collector) {
  const std::size_t query_tile = std::min(options.query_tile, std::max<std::size_t>(queries.rows, 1));
  const std::size_t gallery_tile =
      std::min(options.gallery_tile, std::max<std::size_t>(range.end - range.begin, 1));
  std::vector<float> scores(query_tile * gallery_tile);
  std::uint64_t examined = 0;
  for (std::size_t q0 = 0; q0 < queries.rows; q0 += query_tile) {
    const std::size_t q1 = std::min(q0 + query_tile, queries.rows);
    const MatrixView query_block = queries.Slice(q0, q1);
    for (std::size_t g0 = range.begin; g0 < range.end; g0 += gallery_tile) {
      const std::size_t g1 = std::min(g0 + gallery_tile, range.end);
      TilePass(query_block, gallery.Slice(g0, g1), scores);
      collector.Consume(q0, g0, q1 - q0, g1 - g0, scores.data());
      examined += static_cast<std::uint64_t>(q1 - q0) * (g1 - g0);
    }
  }
  return examined;
}

// Runs `job(range, examined)` for each gallery partition on its own thread and
// returns the per-partition results in partition order.
template <typename Job>
auto RunPartitioned(std::size_t gallery_rows, unsigned workers, std::uint64_t* examined,
                    Job job) {
  using Result = decltype(job(RowRange{}, std::declval<std::uint64_t&>()));
  const std::vector<RowRange> ranges = PartitionRows(gallery_rows, workers);
  std::vector<Result> results(ranges.size());
  std::vector<std::uint64_t> counts(ranges.size(), 0);
  std::vector<std::exception_ptr> errors(ranges.size());
  auto run = [&](std::size_t w) {
    try {
      results[w] = job(ranges[w], counts[w]);
    } catch (...) {
      errors[w] = std::current_exception();
    }
  };
  if (ranges.size() == 1) {
    run(0);
  } else {
    std::vector<std::jthread> threads;
    threads.reserve(ranges.size());
    for (std::size_t w = 0; w < ranges.size(); ++w) threads.emplace_back(run, w);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  *examined = 0;
  for (auto c : counts) *examined += c;
  return results;
}

// Keeps every pair whose f32 score could still reach the exact top k.
class TopKCollector {
 public:
  TopKCollector(std::size_t k, double margin)
      : k_(k), margin_(margin), capacity_(std::max<std::size_t>(4 * k, std::size_t{1} << 16)) {}

  void Consume(std::size_t q0, std::size_t g0, std::size_t rows, std::size_t cols,
               const float* scores) {
    for (std::size_t r = 0; r < rows; ++r) {
      const float* row = scores + r * cols;
      const float admit = admit_;
      for (std::size_t c = 0; c < cols; ++c) {
        if (row[c] >= admit) {
          buffer_.push_back(Candidate{row[c], static_cast<std::uint32_t>(q0 + r),
                                      static_cast<std::uint32_t>(g0 + c)});
        }
      }
      if (buffer_.size() >= capacity_) Prune();
    }
  }

  // Exact local top k, scored with the reference dot product.
  std::vector<ScoredPair> Finish(const MatrixView& queries, const MatrixView& gallery,
                                 std::uint64_t* rescored) {
    Prune();
    std::vector<ScoredPair> pairs;
    pairs.reserve(buffer_.size());
    for (const Candidate& c : buffer_) {
      pairs.push_back(ScoredPair{c.query, c.gallery,
                                 ReferenceDot(queries.Row(c.query), gallery.Row(c.gallery))});
    }
    *rescored = pairs.size();
    const std::size_t keep = std::min(k_, pairs.size());
    std::partial_sort(pairs.begin(), pairs.begin() + keep, pairs.end(), RanksBefore);
    pairs.resize(keep);
    return pairs;
  }

 private:
  void Prune() {
    if (buffer_.size() >= k_) {
      auto kth = buffer_.begin() + static_cast<std::ptrdiff_t>(k_ - 1);
      std::nth_element(buffer_.begin(), kth, buffer_.end(),
                       [](const Candidate& a, const Candidate& b) { return a.score > b.score; });
      admit_ = std::max(admit_, FloatAtOrBelow(static_cast<double>(kth->score) - margin_));
      const float admit = admit_;
      std::erase_if(buffer_, [admit](const Candidate& c) { return c.score < admit; });
    }
    // Many near-ties can keep the buffer large; grow instead of re-pruning
    // on every row.
    if (buffer_.size() * 2 > capacity_) capacity_ *= 2;
  }

  std::size_t k_;
  double margin_;
  std::size_t capacity_;
  float admit_ = kNegInf;
  std::vector<Candidate> buffer_;
};

// Per query row: the running f32 maximum and every gallery row within the
// screening margin of it.
class NearestCollector {
 public:
  NearestCollector(std::size_t query_rows, double margin) : margin_(margin), rows_(query_rows) {}

  void Consume(std::size_t q0, std::size_t g0, std::size_t rows, std::size_t cols,
               const float* scores) {
    for (std::size_t r = 0; r < rows; ++r) {
      const float* row = scores + r * cols;
      float block_max = row[0];
      for (std::size_t c = 1; c < cols; ++c) block_max = row[c] > block_max ? row[c] : block_max;
      RowState& state = rows_[q0 + r];
      if (block_max < state.admit) continue;
      if (block_max > state.best) {
        state.best = block_max;
        state.admit = FloatAtOrBelow(static_cast<double>(block_max) - margin_);
      }
      const float admit = state.admit;
      for (std::size_t c = 0; c < cols; ++c) {
        if (row[c] >= admit) {
          state.candidates.push_back({row[c], static_cast<std::uint32_t>(g0 + c)});
        }
      }
      if (state.candidates.size() > 64) {
        std::erase_if(state.candidates, [admit](const auto& c) { return c.first < admit; });
      }
    }
  }

  std::vector<NearestMatch> Finish(const MatrixView& queries, const MatrixView& gallery,
                                   std::uint64_t* rescored) {
    std::vector<NearestMatch> best(rows_.size());
    std::uint64_t count = 0;
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      RowState& state = rows_[i];
      NearestMatch& out = best[i];
      out.score = -std::numeric_limits<double>::infinity();
      out.real_index = std::numeric_limits<std::uint64_t>::max();
      for (const auto& [f32_score, index] : state.candidates) {
        if (f32_score < state.admit) continue;
        ++count;
        const double score = ReferenceDot(queries.Row(i), gallery.Row(index));
        if (score > out.score || (score == out.score && index < out.real_index)) {
          out.score = score;
          out.real_index = index;
        }
      }
      state.candidates.clear();
      state.candidates.shrink_to_fit();
    }
    *rescored = count;
    return best;
  }

 private:
  struct RowState {
    float best = kNegInf;
    float admit = kNegInf;
    std::vector<std::pair<float, std::uint32_t>> candidates;
  };

  double margin_;
  std::vector<RowState> rows_;
};

struct PartitionTopK {
  std::vector<ScoredPair> pairs;
  std::uint64_t rescored = 0;
};

struct PartitionNearest {
  std::vector<NearestMatch> rows;
  std::uint64_t rescored = 0;
};

// Exact nearest gallery row per query row. Unmatched rows cannot occur
// because every partition is non-empty.
std::vector<NearestMatch> NearestScan(const EmbeddingSet& queries, const EmbeddingSet& gallery,
                                      const EngineOptions& options, EngineStats* stats) {
  const MatrixView query_view = MatrixView::Of(queries);
  const MatrixView gallery_view = MatrixView::Of(gallery);
  const double margin = ScreeningMargin(queries, gallery);
  const unsigned workers = ResolveWorkers(options.workers, gallery.count());
  std::uint64_t examined = 0;
  auto partials = RunPartitioned(
      gallery.count(), workers, &examined, [&](RowRange range, std::uint64_t& count) {
        NearestCollector collector(queries.count(), margin);
        count = ScanBlocks(query_view, gallery_view, range, options, collector);
        PartitionNearest result;
        result.rows = collector.Finish(query_view, gallery_view, &result.rescored);
        return result;
      });
  std::vector<NearestMatch> merged = std::move(partials.front().rows);
  std::uint64_t rescored = partials.front().rescored;
  for (std::size_t p = 1; p < partials.size(); ++p) {
    rescored += partials[p].rescored;
    for (std::size_t i = 0; i < merged.size(); ++i) {
      const NearestMatch& candidate = partials[p].rows[i];
      NearestMatch& current = merged[i];
      if (candidate.score > current.score ||
          (candidate.score == current.score && candidate.real_index < current.real_index)) {
        current = candidate;
      }
    }
  }
  if (stats != nullptr) {
    stats->pairs_examined = examined;
    stats->candidates_rescored = rescored;
    stats->workers_used = workers;
  }
  return merged;
}

}  // namespace

TopKResult TopKPairs(const EmbeddingSet& synthetic, const EmbeddingSet& real, std::size_t k,
                     const EngineOptions& options, EngineStats* stats) {
  if (k == 0) throw Error(ErrorCode::kInvalidArgument, "k must be >= 1");
  ValidateInputs(synthetic, real, options);
  if (synthetic.empty() || real.empty()) {
    throw Error(ErrorCode::kEmptySet, "top-k search needs non-empty synthetic and real sets");
  }
  const MatrixView synth_view = MatrixView::Of(synthetic);
  const MatrixView real_view = MatrixView::Of(real);
  const double margin = ScreeningMargin(synthetic, real);
  const unsigned workers = ResolveWorkers(options.workers, real.count());
  std::uint64_t examined = 0;
  auto partials = RunPartitioned(
      real.count(), workers, &examined, [&](RowRange range, std::uint64_t& count) {
        TopKCollector collector(k, margin);
        count = ScanBlocks(synth_view, real_view, range, options, collector);
        PartitionTopK result;
        result.pairs = collector.Finish(synth_view, real_view, &result.rescored);
        return result;
      });
  TopKResult result;
  result.k = k;
  std::uint64_t rescored = 0;
  for (auto& partial : partials) {
    rescored += partial.rescored;
    result.pairs.insert(result.pairs.end(), partial.pairs.begin(), partial.pairs.end());
  }
  std::sort(result.pairs.begin(), result.pairs.end(), RanksBefore);
  if (result.pairs.size() > k) result.pairs.resize(k);
  if (stats != nullptr) {
    stats->pairs_examined = examined;
    stats->candidates_rescored = rescored;
    stats->workers_used = workers;
  }
  return result;
}

NearestMatches FindNearestMatches(const EmbeddingSet& synthetic, const EmbeddingSet& real,
                                  const EngineOptions& options, EngineStats* stats) {
  ValidateInputs(synthetic, real, options);
  if (real.empty()) {
    throw Error(ErrorCode::kEmptySet, "nearest-match search needs a non-empty real set");
  }
  NearestMatches result;
  if (synthetic.empty()) {
    if (stats != nullptr) *stats = EngineStats{};
    return result;
  }
  result.rows = NearestScan(synthetic, real, options, stats);
  return result;
}

TopKResult UniqueRealTopK(const EmbeddingSet& synthetic, const EmbeddingSet& real,
                          std::size_t k, const EngineOptions& options, EngineStats* stats) {
  if (k == 0) throw Error(ErrorCode::kInvalidArgument, "k must be >= 1");
  ValidateInputs(synthetic, real, options);
  if (synthetic.empty() || real.empty()) {
    throw Error(ErrorCode::kEmptySet, "top-k search needs non-empty synthetic and real sets");
  }
  // The first pair a greedy walk meets for real row j is j's best pair under
  // RanksBefore, i.e. its nearest synthetic row with the smallest index on
  // ties. Ranking those per-row winners gives the greedy selection.
  const std::vector<NearestMatch> per_real = NearestScan(real, synthetic, options, stats);
  TopKResult result;
  result.k = k;
  result.pairs.reserve(per_real.size());
  for (std::size_t j = 0; j < per_real.size(); ++j) {
    result.pairs.push_back(ScoredPair{per_real[j].real_index, j, per_real[j].score});
  }
  const std::size_t keep = std::min(k, result.pairs.size());
  std::partial_sort(result.pairs.begin(), result.pairs.begin() + keep, result.pairs.end(),
                    RanksBefore);
  result.pairs.resize(keep);
  return result;
}

}  // namespace leakcheck
