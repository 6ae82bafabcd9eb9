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

#include <cmath>
#include <random>

#include "gtest/gtest.h"
#include "leakcheck/error.h"
#include "leakcheck/random_embeddings.h"
#include "leakcheck/reference_engine.h"
#include "testing/fixtures.h"
#include "testing/oracles.h"

namespace leakcheck {
namespace {

using ::leakcheck::testing::Basis;
using ::leakcheck::testing::OracleNearest;
using ::leakcheck::testing::OracleTopK;
using ::leakcheck::testing::OracleUniqueReal;
using ::leakcheck::testing::RawSetFromRows;
using ::leakcheck::testing::SetFromRows;

ErrorCode CodeOf(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no leakcheck::Error thrown";
  return ErrorCode::kInternal;
}

TEST(TopKPairsTest, OrthonormalBasis) {
  const EmbeddingSet s = SetFromRows("s", {Basis(3, 0)});
  const EmbeddingSet r = SetFromRows("r", {Basis(3, 0), Basis(3, 1)});
  const TopKResult result = TopKPairs(s, r, 2);
  ASSERT_EQ(result.pairs.size(), 2u);
  EXPECT_EQ(result.pairs[0], (ScoredPair{0, 0, 1.0}));
  EXPECT_EQ(result.pairs[1], (ScoredPair{0, 1, 0.0}));
}

TEST(TopKPairsTest, TieBreaksTowardSmallerRealIndex) {
  const EmbeddingSet s = SetFromRows("s", {{1.0f, 1.0f, 0.0f}});
  const EmbeddingSet r = SetFromRows("r", {Basis(3, 0), Basis(3, 1)});
  const TopKResult result = TopKPairs(s, r, 1);
  ASSERT_EQ(result.pairs.size(), 1u);
  EXPECT_EQ(result.pairs[0].synth_index, 0u);
  EXPECT_EQ(result.pairs[0].real_index, 0u);
  EXPECT_NEAR(result.pairs[0].score, 0.70710678, 1e-7);
}

TEST(TopKPairsTest, MatchesOracleOnSeededInstance) {
  const EmbeddingSet s = RandomUnitSet("s", 100, 16, 11);
  const EmbeddingSet r = RandomUnitSet("r", 200, 16, 12);
  EXPECT_EQ(TopKPairs(s, r, 25).pairs, OracleTopK(s, r, 25));
}

TEST(TopKPairsTest, KLargerThanPairCountReturnsAllPairsSorted) {
  const EmbeddingSet s = RandomUnitSet("s", 3, 8, 1);
  const EmbeddingSet r = RandomUnitSet("r", 4, 8, 2);
  const TopKResult result = TopKPairs(s, r, 100);
  EXPECT_EQ(result.k, 100u);
  EXPECT_EQ(result.pairs, OracleTopK(s, r, 12));
}

TEST(TopKPairsTest, PrefixMonotoneInK) {
  const EmbeddingSet s = RandomUnitSet("s", 40, 8, 5);
  const EmbeddingSet r = RandomUnitSet("r", 60, 8, 6);
  std::vector<ScoredPair> previous;
  for (std::size_t k = 1; k <= 50; ++k) {
    const std::vector<ScoredPair> pairs = TopKPairs(s, r, k).pairs;
    ASSERT_EQ(pairs.size(), k);
    EXPECT_TRUE(std::equal(previous.begin(), previous.end(), pairs.begin())) << "k=" << k;
    previous = pairs;
  }
}

TEST(TopKPairsTest, DuplicateRowsProduceExactTies) {
  // Identical rows give bit-identical scores, so ordering is decided purely by
  // the index tie rules.
  const EmbeddingSet s = SetFromRows("s", {{1, 2, 3}, {1, 2, 3}, {3, 2, 1}});
  const EmbeddingSet r = SetFromRows("r", {{1, 2, 3}, {1, 2, 3}, {0, 0, 1}});
  EngineOptions tiny{1, 1, 3};
  EXPECT_EQ(TopKPairs(s, r, 9, tiny).pairs, OracleTopK(s, r, 9));
  EXPECT_EQ(TopKPairs(s, r, 4).pairs, OracleTopK(s, r, 4));
}

TEST(TopKPairsTest, ScoresStayWithinBoundOfUnitRange) {
  const EmbeddingSet s = RandomUnitSet("s", 50, 512, 21);
  const EmbeddingSet r = SetFromRows("r", {std::vector<float>(s.Row(0).begin(), s.Row(0).end())});
  for (const ScoredPair& p : TopKPairs(s, r, 50).pairs) {
    EXPECT_GE(p.score, -1.0 - 1e-4);
    EXPECT_LE(p.score, 1.0 + 1e-4);
  }
}

TEST(TopKPairsTest, ExaminesEveryPairOnce) {
  const EmbeddingSet s = RandomUnitSet("s", 37, 8, 1);
  const EmbeddingSet r = RandomUnitSet("r", 53, 8, 2);
  EngineStats stats;
  TopKPairs(s, r, 5, EngineOptions{4, 16, 3}, &stats);
  EXPECT_EQ(stats.pairs_examined, 37u * 53u);
  EXPECT_EQ(stats.workers_used, 3u);
  FindNearestMatches(s, r, EngineOptions{5, 7, 2}, &stats);
  EXPECT_EQ(stats.pairs_examined, 37u * 53u);
}

TEST(TopKPairsTest, Errors) {
  const EmbeddingSet s = RandomUnitSet("s", 3, 8, 1);
  const EmbeddingSet r = RandomUnitSet("r", 3, 8, 2);
  const EmbeddingSet other_dim = RandomUnitSet("o", 3, 4, 3);
  const EmbeddingSet raw = RawSetFromRows("raw", {{3, 4, 0, 0, 0, 0, 0, 0}});
  const EmbeddingSet empty = EmbeddingSet::Create("e", 8, {}, {}, true);
  EXPECT_EQ(CodeOf([&] { TopKPairs(s, other_dim, 1); }), ErrorCode::kDimMismatch);
  EXPECT_EQ(CodeOf([&] { TopKPairs(s, raw, 1); }), ErrorCode::kUnnormalizedInput);
  EXPECT_EQ(CodeOf([&] { TopKPairs(raw, r, 1); }), ErrorCode::kUnnormalizedInput);
  EXPECT_EQ(CodeOf([&] { TopKPairs(empty, r, 1); }), ErrorCode::kEmptySet);
  EXPECT_EQ(CodeOf([&] { TopKPairs(s, empty, 1); }), ErrorCode::kEmptySet);
  EXPECT_EQ(CodeOf([&] { TopKPairs(s, r, 0); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(CodeOf([&] { TopKPairs(s, r, 1, EngineOptions{0, 4, 1}); }),
            ErrorCode::kInvalidArgument);
  EXPECT_EQ(CodeOf([&] { UniqueRealTopK(s, empty, 1); }), ErrorCode::kEmptySet);
  EXPECT_EQ(CodeOf([&] { FindNearestMatches(s, empty); }), ErrorCode::kEmptySet);
  EXPECT_EQ(CodeOf([&] { FindNearestMatches(s, other_dim); }), ErrorCode::kDimMismatch);
}

TEST(NearestMatchesTest, WorkedExamples) {
  const EmbeddingSet r = SetFromRows("r", {Basis(3, 0), Basis(3, 1)});
  const NearestMatches exact = FindNearestMatches(SetFromRows("s", {Basis(3, 1)}), r);
  ASSERT_EQ(exact.rows.size(), 1u);
  EXPECT_EQ(exact.rows[0], (NearestMatch{1, 1.0}));

  const NearestMatches tie = FindNearestMatches(SetFromRows("s", {{1, 1, 0}}), r);
  ASSERT_EQ(tie.rows.size(), 1u);
  EXPECT_EQ(tie.rows[0].real_index, 0u);
  EXPECT_NEAR(tie.rows[0].score, 0.70710678, 1e-7);
}

TEST(NearestMatchesTest, MatchesOracleOnSeededInstance) {
  const EmbeddingSet s = RandomUnitSet("s", 500, 32, 3);
  const EmbeddingSet r = RandomUnitSet("r", 1000, 32, 4);
  EXPECT_EQ(FindNearestMatches(s, r).rows, OracleNearest(s, r));
  EXPECT_EQ(FindNearestMatches(s, r, EngineOptions{7, 33, 4}).rows, OracleNearest(s, r));
}

TEST(NearestMatchesTest, EmptySyntheticGivesEmptyResult) {
  const EmbeddingSet empty = EmbeddingSet::Create("e", 8, {}, {}, true);
  EXPECT_TRUE(FindNearestMatches(empty, RandomUnitSet("r", 3, 8, 1)).rows.empty());
}

TEST(UniqueRealTopKTest, SkipsRepeatedRealRows) {
  const EmbeddingSet s = SetFromRows("s", {Basis(3, 0), Basis(3, 0)});
  const EmbeddingSet r = SetFromRows("r", {Basis(3, 0), Basis(3, 1)});
  const TopKResult result = UniqueRealTopK(s, r, 2);
  // Greedy walk: (0,0,1) taken, (1,0,1) skipped, (0,1,0) taken.
  ASSERT_EQ(result.pairs.size(), 2u);
  EXPECT_EQ(result.pairs[0], (ScoredPair{0, 0, 1.0}));
  EXPECT_EQ(result.pairs[1], (ScoredPair{0, 1, 0.0}));
  EXPECT_EQ(result.pairs, OracleUniqueReal(s, r, 2));
}

TEST(UniqueRealTopKTest, KOneEqualsTopKHead) {
  const EmbeddingSet s = RandomUnitSet("s", 30, 8, 9);
  const EmbeddingSet r = RandomUnitSet("r", 20, 8, 10);
  EXPECT_EQ(UniqueRealTopK(s, r, 1).pairs, TopKPairs(s, r, 1).pairs);
}

TEST(UniqueRealTopKTest, MatchesGreedyFilterOfOracle) {
  const EmbeddingSet s = RandomUnitSet("s", 120, 16, 13);
  const EmbeddingSet r = RandomUnitSet("r", 80, 16, 14);
  for (std::size_t k : {1u, 10u, 80u, 500u}) {
    EXPECT_EQ(UniqueRealTopK(s, r, k, EngineOptions{16, 8, 2}).pairs, OracleUniqueReal(s, r, k))
        << "k=" << k;
  }
}

TEST(ReferenceEngineTest, AgreesWithOracle) {
  const EmbeddingSet s = RandomUnitSet("s", 60, 24, 31);
  const EmbeddingSet r = RandomUnitSet("r", 70, 24, 32);
  EXPECT_EQ(NaiveTopKPairs(s, r, 33).pairs, OracleTopK(s, r, 33));
  EXPECT_EQ(NaiveNearestMatches(s, r).rows, OracleNearest(s, r));
}

// Randomized property sweep over shapes, tilings and worker counts.
TEST(EnginePropertyTest, EquivalentToOracleAcrossConfigurations) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 1 + rng() % 90;
    const std::size_t m = 1 + rng() % 90;
    const std::size_t dim = std::array<std::size_t, 5>{1, 3, 8, 17, 64}[rng() % 5];
    const std::size_t k = 1 + rng() % 200;
    const EngineOptions opts{1 + rng() % 40, 1 + rng() % 70, static_cast<unsigned>(1 + rng() % 5)};
    const EmbeddingSet s = RandomUnitSet("s", n, dim, rng());
    const EmbeddingSet r = RandomUnitSet("r", m, dim, rng());
    SCOPED_TRACE(::testing::Message() << "trial " << trial << " n=" << n << " m=" << m
                                      << " dim=" << dim << " k=" << k);
    EXPECT_EQ(TopKPairs(s, r, k, opts).pairs, OracleTopK(s, r, k));
    EXPECT_EQ(FindNearestMatches(s, r, opts).rows, OracleNearest(s, r));
    EXPECT_EQ(UniqueRealTopK(s, r, k, opts).pairs, OracleUniqueReal(s, r, k));
  }
}

TEST(EnginePropertyTest, LowDimensionManyTies) {
  // Vectors drawn from a tiny lattice collide often.
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::vector<float>> a(30 + rng() % 30), b(30 + rng() % 30);
    for (auto* rows : {&a, &b}) {
      for (auto& row : *rows) {
        row = {static_cast<float>(rng() % 3) - 1.0f, static_cast<float>(rng() % 3) - 1.0f, 1.0f};
      }
    }
    const EmbeddingSet s = SetFromRows("s", a);
    const EmbeddingSet r = SetFromRows("r", b);
    const EngineOptions opts{1 + rng() % 8, 1 + rng() % 8, static_cast<unsigned>(1 + rng() % 4)};
    EXPECT_EQ(TopKPairs(s, r, 50, opts).pairs, OracleTopK(s, r, 50));
    EXPECT_EQ(FindNearestMatches(s, r, opts).rows, OracleNearest(s, r));
    EXPECT_EQ(UniqueRealTopK(s, r, 50, opts).pairs, OracleUniqueReal(s, r, 50));
  }
}

TEST(EnginePropertyTest, DeterministicAcrossWorkersAndTiles) {
  const EmbeddingSet s = RandomUnitSet("s", 300, 64, 41);
  const EmbeddingSet r = RandomUnitSet("r", 700, 64, 42);
  const TopKResult base = TopKPairs(s, r, 150, EngineOptions{256, 4096, 1});
  const NearestMatches base_nn = FindNearestMatches(s, r, EngineOptions{256, 4096, 1});
  for (unsigned workers : {2u, 3u, 8u}) {
    for (auto [qt, gt] : {std::pair<std::size_t, std::size_t>{32, 128}, {5, 7}, {300, 1000}}) {
      const EngineOptions opts{qt, gt, workers};
      EXPECT_EQ(TopKPairs(s, r, 150, opts), base);
      EXPECT_EQ(FindNearestMatches(s, r, opts), base_nn);
    }
  }
}

}  // namespace
}  // namespace leakcheck
