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

#include <bit>
#include <cstring>
#include <limits>

#include "json.hpp"
#include "leakcheck/error.h"
#include "leakcheck/file_util.h"

namespace leakcheck {
using nlohmann::json;

namespace {

void PutU64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint64_t GetU64(std::string_view bytes, std::size_t offset) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) {
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[offset + i])) << (8 * i);
  }
  return v;
}

std::vector<ScoredPair> ParsePairLines(std::string_view text) {
  std::vector<ScoredPair> pairs;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const std::size_t nl = text.find('\n');
    const std::string_view line = text.substr(0, nl);
    ++line_no;
    if (!line.empty() && line != "\r") {
      try {
        const json obj = json::parse(line);
        pairs.push_back(ScoredPair{obj.at("synth_index").get<std::uint64_t>(),
                                   obj.at("real_index").get<std::uint64_t>(),
                                   obj.at("score").get<double>()});
      } catch (const json::exception& e) {
        throw Error(ErrorCode::kParseFailure,
                    "pair line " + std::to_string(line_no) + ": " + e.what());
      }
    }
    if (nl == std::string_view::npos) break;
    text.remove_prefix(nl + 1);
  }
  return pairs;
}

}  // namespace

std::string EncodePairsJsonl(const std::vector<ScoredPair>& pairs) {
  std::string out;
  for (const auto& p : pairs) {
    out += json{{"synth_index", p.synth_index}, {"real_index", p.real_index}, {"score", p.score}}
               .dump();
    out.push_back('\n');
  }
  return out;
}

std::vector<ScoredPair> ParsePairsJsonl(std::string_view text) { return ParsePairLines(text); }

std::string EncodeNearestJsonl(const NearestMatches& matches) {
  std::vector<ScoredPair> pairs;
  pairs.reserve(matches.rows.size());
  for (std::size_t i = 0; i < matches.rows.size(); ++i) {
    pairs.push_back(ScoredPair{i, matches.rows[i].real_index, matches.rows[i].score});
  }
  return EncodePairsJsonl(pairs);
}

NearestMatches ParseNearestJsonl(std::string_view text) {
  NearestMatches matches;
  const std::vector<ScoredPair> pairs = ParsePairLines(text);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (pairs[i].synth_index != i) {
      throw Error(ErrorCode::kParseFailure, "nearest-match lines must be in row order");
    }
    matches.rows.push_back(NearestMatch{pairs[i].real_index, pairs[i].score});
  }
  return matches;
}

std::string_view ResultKindName(ResultKind kind) {
  switch (kind) {
    case ResultKind::kTopKPairs: return "all_pairs";
    case ResultKind::kUniqueRealTopK: return "unique_real";
    case ResultKind::kNearest: return "nearest";
  }
  return "all_pairs";
}

ResultCache CacheOf(const TopKResult& result, ResultKind kind) {
  return ResultCache{kind, result.k, result.pairs};
}

ResultCache CacheOf(const NearestMatches& matches) {
  ResultCache cache;
  cache.kind = ResultKind::kNearest;
  cache.k = 1;
  for (std::size_t i = 0; i < matches.rows.size(); ++i) {
    cache.pairs.push_back(ScoredPair{i, matches.rows[i].real_index, matches.rows[i].score});
  }
  return cache;
}

std::string EncodeResultCache(const ResultCache& cache) {
  std::string out;
  out.reserve(kResultCacheHeaderSize + cache.pairs.size() * 24);
  out.append(kResultCacheMagic.data(), kResultCacheMagic.size());
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((kResultCacheVersion >> (8 * i)) & 0xff));
  out.push_back(static_cast<char>(cache.kind));
  out.append(7, '\0');
  PutU64(out, cache.k);
  PutU64(out, cache.pairs.size());
  for (const auto& p : cache.pairs) {
    PutU64(out, p.synth_index);
    PutU64(out, p.real_index);
    PutU64(out, std::bit_cast<std::uint64_t>(p.score));
  }
  return out;
}

ResultCache DecodeResultCache(std::string_view bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kResultCacheMagic.data(), 4) != 0) {
    throw Error(ErrorCode::kBadMagic, "not a TOPK result cache (bad magic)");
  }
  if (bytes.size() < kResultCacheHeaderSize) {
    throw Error(ErrorCode::kTruncatedPayload, "TOPK header truncated");
  }
  std::uint32_t version = 0;
  for (int i = 0; i < 4; ++i) {
    version |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[4 + i])) << (8 * i);
  }
  if (version != kResultCacheVersion) {
    throw Error(ErrorCode::kUnsupportedVersion, "unsupported TOPK version " + std::to_string(version));
  }
  const auto kind = static_cast<unsigned char>(bytes[8]);
  if (kind > static_cast<unsigned char>(ResultKind::kNearest)) {
    throw Error(ErrorCode::kParseFailure, "unknown TOPK result kind " + std::to_string(kind));
  }
  ResultCache cache;
  cache.kind = static_cast<ResultKind>(kind);
  cache.k = GetU64(bytes, 16);
  const std::uint64_t count = GetU64(bytes, 24);
  const std::uint64_t available = (bytes.size() - kResultCacheHeaderSize);
  if (count > available / 24) {
    throw Error(ErrorCode::kTruncatedPayload, "TOPK payload truncated");
  }
  if (available != count * 24) {
    throw Error(ErrorCode::kParseFailure, "trailing bytes after TOPK payload");
  }
  cache.pairs.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    const std::size_t at = kResultCacheHeaderSize + i * 24;
    cache.pairs.push_back(ScoredPair{GetU64(bytes, at), GetU64(bytes, at + 8),
                                     std::bit_cast<double>(GetU64(bytes, at + 16))});
  }
  return cache;
}

void WriteResultCache(const ResultCache& cache, const std::filesystem::path& path) {
  WriteFileAtomic(path, EncodeResultCache(cache));
}

ResultCache ReadResultCache(const std::filesystem::path& path) {
  return DecodeResultCache(ReadFileBytes(path));
}

}  // namespace leakcheck
