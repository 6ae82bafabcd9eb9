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

#include "testing/oracles.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <set>
#include <stdexcept>

namespace leakcheck::testing {

double OracleDot(std::span<const float> a, std::span<const float> b) {
  double sum = 0.0;
  for (std::size_t t = 0; t < a.size(); ++t) {
    sum += static_cast<double>(a[t]) * static_cast<double>(b[t]);
  }
  return sum;
}

namespace {

bool Before(const ScoredPair& a, const ScoredPair& b) {
  if (a.score > b.score) return true;
  if (a.score < b.score) return false;
  if (a.synth_index != b.synth_index) return a.synth_index < b.synth_index;
  return a.real_index < b.real_index;
}

}  // namespace

std::vector<ScoredPair> OracleAllPairs(const EmbeddingSet& synthetic, const EmbeddingSet& real) {
  std::vector<ScoredPair> pairs;
  pairs.reserve(synthetic.count() * real.count());
  for (std::size_t i = 0; i < synthetic.count(); ++i) {
    for (std::size_t j = 0; j < real.count(); ++j) {
      pairs.push_back({i, j, OracleDot(synthetic.Row(i), real.Row(j))});
    }
  }
  std::sort(pairs.begin(), pairs.end(), Before);
  return pairs;
}

std::vector<ScoredPair> OracleTopK(const EmbeddingSet& synthetic, const EmbeddingSet& real,
                                   std::size_t k) {
  std::vector<ScoredPair> pairs = OracleAllPairs(synthetic, real);
  if (pairs.size() > k) pairs.resize(k);
  return pairs;
}

std::vector<ScoredPair> OracleUniqueReal(const EmbeddingSet& synthetic, const EmbeddingSet& real,
                                         std::size_t k) {
  std::vector<ScoredPair> out;
  std::set<std::uint64_t> taken;
  for (const ScoredPair& p : OracleAllPairs(synthetic, real)) {
    if (out.size() == k) break;
    if (taken.insert(p.real_index).second) out.push_back(p);
  }
  return out;
}

std::vector<NearestMatch> OracleNearest(const EmbeddingSet& synthetic, const EmbeddingSet& real) {
  std::vector<NearestMatch> rows;
  for (std::size_t i = 0; i < synthetic.count(); ++i) {
    NearestMatch best{0, -std::numeric_limits<double>::infinity()};
    for (std::size_t j = 0; j < real.count(); ++j) {
      const double s = OracleDot(synthetic.Row(i), real.Row(j));
      if (s > best.score) best = {j, s};
    }
    rows.push_back(best);
  }
  return rows;
}

std::uint64_t OracleMaxFalseAccepts(double target_far, std::uint64_t n) {
  // target_far = mantissa * 2^exponent with an integer 53-bit mantissa.
  int exponent = 0;
  const double fraction = std::frexp(target_far, &exponent);
  const auto mantissa = static_cast<unsigned __int128>(std::ldexp(fraction, 53));
  exponent -= 53;
  if (exponent > 0 || -exponent > 120) throw std::invalid_argument("target_far out of range");
  // m <= mantissa * n / 2^-exponent  <=>  m <= floor(mantissa * n >> -exponent)
  const unsigned __int128 product = mantissa * n;
  return static_cast<std::uint64_t>(product >> (-exponent));
}

double OracleFarThreshold(std::vector<double> impostor, double target_far) {
  std::sort(impostor.begin(), impostor.end(), std::greater<>());
  const std::uint64_t m = OracleMaxFalseAccepts(target_far, impostor.size());
  return impostor[std::min<std::uint64_t>(m, impostor.size() - 1)];
}

std::uint64_t OracleCountAbove(std::span<const double> scores, double threshold) {
  std::uint64_t count = 0;
  for (double s : scores) count += s > threshold ? 1 : 0;
  return count;
}

}  // namespace leakcheck::testing
