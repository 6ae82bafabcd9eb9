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

#ifndef LEAKCHECK_CALIBRATION_H_
#define LEAKCHECK_CALIBRATION_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "leakcheck/similarity_engine.h"

namespace leakcheck {

// Scores from a verification benchmark: same-identity (genuine) and
// different-identity (impostor) comparisons.
struct BenchmarkScores {
  std::vector<double> genuine;
  std::vector<double> impostor;
  std::string source_id;

  bool operator==(const BenchmarkScores&) const = default;
};

// A pair matches iff score > threshold (strict) everywhere in this library.
struct FarThreshold {
  double target_far = 0.0;
  double threshold = 0.0;
  double achieved_far = 0.0;
  std::uint64_t impostor_count = 0;

  bool operator==(const FarThreshold&) const = default;
};

// With the N impostor scores sorted descending (d_1 >= ... >= d_N) and
// m = floor(target_far * N), the threshold is d_{m+1}. At most m impostors
// score strictly above it, so achieved_far <= target_far holds exactly.
//
// Errors: kEmptyImpostorSet, kInvalidArgument (target_far outside (0, 1) or
// a non-finite score).
FarThreshold DeriveFarThreshold(const BenchmarkScores& scores, double target_far);

// |{s in impostor : s > threshold}| / N, the quantity stored as achieved_far.
double FalseAcceptRate(std::span<const double> impostor, double threshold);

// Fraction of per-synthetic-row nearest scores strictly above `threshold`.
// Throws kEmptyMatches.
double AboveThresholdFraction(const NearestMatches& matches, double threshold);

struct Histogram {
  double lo = -1.0;
  double hi = 1.0;
  std::size_t bins = 100;
  std::vector<std::uint64_t> counts;
  std::uint64_t underflow = 0;
  std::uint64_t overflow = 0;

  // Left edge of bin i (i == bins gives hi).
  double Edge(std::size_t i) const;
  std::uint64_t Total() const;

  bool operator==(const Histogram&) const = default;
};

// Uniform bins of width (hi - lo) / bins; bin i covers [Edge(i), Edge(i+1)),
// the last bin also includes hi. Values outside [lo, hi] go to the
// underflow/overflow counters. Throws kInvalidRange (lo >= hi, bins == 0 or
// a non-finite bound) and kInvalidArgument for NaN scores.
Histogram BuildHistogram(std::span<const double> scores, double lo, double hi, std::size_t bins);

// CSV with header "label,score" (header optional on input); labels are
// "genuine" or "impostor". Errors: kParseFailure, kUnknownLabel.
BenchmarkScores ParseBenchmarkScores(std::string_view text, std::string source_id);
BenchmarkScores LoadBenchmarkScores(const std::filesystem::path& path);
std::string EncodeBenchmarkScores(const BenchmarkScores& scores);
void WriteBenchmarkScores(const BenchmarkScores& scores, const std::filesystem::path& path);

// Plot-ready histogram export: "bin_left,bin_right,count" rows.
std::string EncodeHistogramCsv(const Histogram& histogram);

// Extra vertical lines for the sidecar, e.g. the top-k cutoff score.
struct HistogramMarker {
  std::string name;
  double value = 0.0;
};

// JSON sidecar with range, bins, under/overflow and the threshold values so
// plotters can draw the decision line next to the bars.
std::string EncodeHistogramSidecar(const Histogram& histogram, const FarThreshold* threshold,
                                   std::span<const HistogramMarker> markers);

}  // namespace leakcheck

#endif  // LEAKCHECK_CALIBRATION_H_
