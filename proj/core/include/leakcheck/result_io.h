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

#ifndef LEAKCHECK_RESULT_IO_H_
#define LEAKCHECK_RESULT_IO_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "leakcheck/similarity_engine.h"

namespace leakcheck {

// JSON lines, one object per pair: {"real_index":j,"score":s,"synth_index":i}.
// Scores are printed with round-trip precision.
std::string EncodePairsJsonl(const std::vector<ScoredPair>& pairs);
std::vector<ScoredPair> ParsePairsJsonl(std::string_view text);

// NearestMatches use the same line shape with synth_index = row number.
std::string EncodeNearestJsonl(const NearestMatches& matches);
NearestMatches ParseNearestJsonl(std::string_view text);

enum class ResultKind : std::uint8_t { kTopKPairs = 0, kUniqueRealTopK = 1, kNearest = 2 };

std::string_view ResultKindName(ResultKind kind);

// Binary result cache ("TOPK"), little-endian:
//   magic "TOPK" | version u32=1 | kind u8 | reserved 7 | k u64 | count u64 |
//   count x (synth_index u64, real_index u64, score f64)
inline constexpr std::array<char, 4> kResultCacheMagic = {'T', 'O', 'P', 'K'};
inline constexpr std::uint32_t kResultCacheVersion = 1;
inline constexpr std::size_t kResultCacheHeaderSize = 32;

struct ResultCache {
  ResultKind kind = ResultKind::kTopKPairs;
  std::uint64_t k = 0;
  std::vector<ScoredPair> pairs;

  bool operator==(const ResultCache&) const = default;
};

ResultCache CacheOf(const TopKResult& result, ResultKind kind);
ResultCache CacheOf(const NearestMatches& matches);

std::string EncodeResultCache(const ResultCache& cache);
// Errors mirror the EMBS reader: kBadMagic, kUnsupportedVersion,
// kTruncatedPayload, kParseFailure.
ResultCache DecodeResultCache(std::string_view bytes);

void WriteResultCache(const ResultCache& cache, const std::filesystem::path& path);
ResultCache ReadResultCache(const std::filesystem::path& path);

}  // namespace leakcheck

#endif  // LEAKCHECK_RESULT_IO_H_
