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

#include "leakcheck/result_io.h"

#include <cmath>

#include "gtest/gtest.h"
#include "leakcheck/error.h"
#include "leakcheck/random_embeddings.h"
#include "leakcheck/similarity_engine.h"
#include "testing/fixtures.h"

namespace leakcheck {
namespace {

ErrorCode CodeOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kInternal;
}

TopKResult SampleResult() {
  const EmbeddingSet s = RandomUnitSet("s", 40, 16, 1);
  const EmbeddingSet r = RandomUnitSet("r", 60, 16, 2);
  return TopKPairs(s, r, 25);
}

TEST(PairsJsonlTest, RoundTripsExactly) {
  const TopKResult result = SampleResult();
  const std::string text = EncodePairsJsonl(result.pairs);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 25);
  EXPECT_EQ(ParsePairsJsonl(text), result.pairs);
}

TEST(PairsJsonlTest, LineShape) {
  const std::string text = EncodePairsJsonl({ScoredPair{3, 7, 0.5}});
  EXPECT_EQ(text, "{\"real_index\":7,\"score\":0.5,\"synth_index\":3}\n");
}

TEST(PairsJsonlTest, RejectsGarbage) {
  EXPECT_EQ(CodeOf([] { ParsePairsJsonl("{\"synth_index\":1}\n"); }), ErrorCode::kParseFailure);
  EXPECT_EQ(CodeOf([] { ParsePairsJsonl("nope\n"); }), ErrorCode::kParseFailure);
}

TEST(NearestJsonlTest, RoundTripAndOrder) {
  const EmbeddingSet s = RandomUnitSet("s", 10, 8, 3);
  const EmbeddingSet r = RandomUnitSet("r", 12, 8, 4);
  const NearestMatches m = FindNearestMatches(s, r);
  EXPECT_EQ(ParseNearestJsonl(EncodeNearestJsonl(m)), m);
  EXPECT_EQ(CodeOf([] { ParseNearestJsonl("{\"synth_index\":1,\"real_index\":0,\"score\":0}\n"); }),
            ErrorCode::kParseFailure);
}

TEST(ResultCacheTest, RoundTripsEveryKind) {
  const TopKResult result = SampleResult();
  for (ResultKind kind : {ResultKind::kTopKPairs, ResultKind::kUniqueRealTopK}) {
    const ResultCache cache = CacheOf(result, kind);
    const std::string bytes = EncodeResultCache(cache);
    EXPECT_EQ(bytes.size(), kResultCacheHeaderSize + 24 * cache.pairs.size());
    EXPECT_EQ(bytes.substr(0, 4), "TOPK");
    EXPECT_EQ(DecodeResultCache(bytes), cache);
  }
  const EmbeddingSet s = RandomUnitSet("s", 5, 8, 3);
  const ResultCache nearest = CacheOf(FindNearestMatches(s, s));
  EXPECT_EQ(nearest.kind, ResultKind::kNearest);
  EXPECT_EQ(DecodeResultCache(EncodeResultCache(nearest)), nearest);
}

TEST(ResultCacheTest, PreservesScoreBits) {
  ResultCache cache;
  cache.k = 2;
  cache.pairs = {{0, 0, -0.0}, {1, 1, std::nextafter(1.0, 0.0)}};
  const ResultCache back = DecodeResultCache(EncodeResultCache(cache));
  EXPECT_TRUE(std::signbit(back.pairs[0].score));
  EXPECT_EQ(back.pairs[1].score, std::nextafter(1.0, 0.0));
}

TEST(ResultCacheTest, DecodeErrors) {
  const std::string good = EncodeResultCache(CacheOf(SampleResult(), ResultKind::kTopKPairs));
  std::string bad = good;
  bad[0] = 'X';
  EXPECT_EQ(CodeOf([&] { DecodeResultCache(bad); }), ErrorCode::kBadMagic);
  EXPECT_EQ(CodeOf([&] { DecodeResultCache(good.substr(0, 20)); }),
            ErrorCode::kTruncatedPayload);
  EXPECT_EQ(CodeOf([&] { DecodeResultCache(good.substr(0, good.size() - 3)); }),
            ErrorCode::kTruncatedPayload);
  EXPECT_EQ(CodeOf([&] { DecodeResultCache(good + "x"); }), ErrorCode::kParseFailure);
  bad = good;
  bad[4] = 9;
  EXPECT_EQ(CodeOf([&] { DecodeResultCache(bad); }), ErrorCode::kUnsupportedVersion);
  bad = good;
  bad[8] = 7;
  EXPECT_EQ(CodeOf([&] { DecodeResultCache(bad); }), ErrorCode::kParseFailure);
}

TEST(ResultCacheTest, FileRoundTrip) {
  testing::TempDir dir;
  const ResultCache cache = CacheOf(SampleResult(), ResultKind::kTopKPairs);
  WriteResultCache(cache, dir / "r.topk");
  EXPECT_EQ(ReadResultCache(dir / "r.topk"), cache);
}

TEST(ResultKindTest, Names) {
  EXPECT_EQ(ResultKindName(ResultKind::kTopKPairs), "all_pairs");
  EXPECT_EQ(ResultKindName(ResultKind::kUniqueRealTopK), "unique_real");
  EXPECT_EQ(ResultKindName(ResultKind::kNearest), "nearest");
}

}  // namespace
}  // namespace leakcheck
