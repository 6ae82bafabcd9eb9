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

#include "leakcheck/calibration.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <iomanip>
#include <sstream>

#include "json.hpp"
#include "leakcheck/error.h"
#include "leakcheck/file_util.h"

namespace leakcheck {
using nlohmann::json;

namespace {

// Largest m with m <= target_far * n in exact arithmetic.
std::uint64_t MaxFalseAccepts(double target_far, std::uint64_t n) {
  const double product = target_far * static_cast<double>(n);
  auto m = static_cast<std::uint64_t>(std::floor(product));
  // The rounded product may land on the next integer; fma gives the sign of
  // m - target_far * n without an intermediate rounding.
  while (m > 0 && std::fma(-target_far, static_cast<double>(n), static_cast<double>(m)) > 0.0) {
    --m;
  }
  return m;
}

std::string FormatDouble(double v) {
  std::ostringstream out;
  out << std::setprecision(17) << v;
  return out.str();
}

}  // namespace

double FalseAcceptRate(std::span<const double> impostor, double threshold) {
  if (impostor.empty()) throw Error(ErrorCode::kEmptyImpostorSet, "no impostor scores");
  const auto accepted = std::count_if(impostor.begin(), impostor.end(),
                                      [threshold](double s) { return s > threshold; });
  return static_cast<double>(accepted) / static_cast<double>(impostor.size());
}

FarThreshold DeriveFarThreshold(const BenchmarkScores& scores, double target_far) {
  if (!(target_far > 0.0 && target_far < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "target FAR must lie in (0, 1), got " +
                                                 FormatDouble(target_far));
  }
  if (scores.impostor.empty()) {
    throw Error(ErrorCode::kEmptyImpostorSet, "cannot derive a threshold without impostor scores");
  }
  std::vector<double> sorted = scores.impostor;
  if (std::any_of(sorted.begin(), sorted.end(), [](double s) { return !std::isfinite(s); })) {
    throw Error(ErrorCode::kInvalidArgument, "impostor scores must be finite");
  }
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  const std::uint64_t n = sorted.size();
  const std::uint64_t m = MaxFalseAccepts(target_far, n);
  // m < n always holds for target_far < 1; clamp anyway so d_{m+1} exists.
  const std::uint64_t index = std::min(m, n - 1);
  FarThreshold result;
  result.target_far = target_far;
  result.threshold = sorted[index];
  result.impostor_count = n;
  result.achieved_far = FalseAcceptRate(sorted, result.threshold);
  return result;
}

double AboveThresholdFraction(const NearestMatches& matches, double threshold) {
  if (matches.rows.empty()) throw Error(ErrorCode::kEmptyMatches, "no nearest matches");
  const auto above = std::count_if(matches.rows.begin(), matches.rows.end(),
                                   [threshold](const NearestMatch& m) { return m.score > threshold; });
  return static_cast<double>(above) / static_cast<double>(matches.rows.size());
}

double Histogram::Edge(std::size_t i) const {
  if (i >= bins) return hi;
  return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(bins);
}

std::uint64_t Histogram::Total() const {
  std::uint64_t total = underflow + overflow;
  for (auto c : counts) total += c;
  return total;
}

Histogram BuildHistogram(std::span<const double> scores, double lo, double hi, std::size_t bins) {
  if (!(std::isfinite(lo) && std::isfinite(hi) && lo < hi) || bins == 0) {
    throw Error(ErrorCode::kInvalidRange, "histogram needs finite lo < hi and bins >= 1");
  }
  Histogram h;
  h.lo = lo;
  h.hi = hi;
  h.bins = bins;
  h.counts.assign(bins, 0);
  const double scale = static_cast<double>(bins) / (hi - lo);
  for (double s : scores) {
    if (std::isnan(s)) throw Error(ErrorCode::kInvalidArgument, "NaN score in histogram input");
    if (s < lo) {
      ++h.underflow;
      continue;
    }
    if (s > hi) {
      ++h.overflow;
      continue;
    }
    auto bin = static_cast<std::size_t>(std::min((s - lo) * scale, static_cast<double>(bins - 1)));
    // Settle rounding so the bin agrees with the published edges.
    while (bin > 0 && s < h.Edge(bin)) --bin;
    while (bin + 1 < bins && s >= h.Edge(bin + 1)) ++bin;
    ++h.counts[bin];
  }
  return h;
}

BenchmarkScores ParseBenchmarkScores(std::string_view text, std::string source_id) {
  BenchmarkScores scores;
  scores.source_id = std::move(source_id);
  std::size_t line_no = 0;
  while (!text.empty()) {
    const std::size_t nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    ++line_no;
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.remove_suffix(1);
    if (!line.empty()) {
      const std::size_t comma = line.find(',');
      if (comma == std::string_view::npos) {
        throw Error(ErrorCode::kParseFailure,
                    "benchmark line " + std::to_string(line_no) + ": expected label,score");
      }
      const std::string_view label = line.substr(0, comma);
      std::string_view value = line.substr(comma + 1);
      while (!value.empty() && value.front() == ' ') value.remove_prefix(1);
      if (line_no == 1 && label == "label" && value == "score") {
        // header
      } else {
        double score = 0.0;
        const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), score);
        if (value.empty() || ec != std::errc() || ptr != value.data() + value.size()) {
          throw Error(ErrorCode::kParseFailure, "benchmark line " + std::to_string(line_no) +
                                                    ": bad score '" + std::string(value) + "'");
        }
        if (label == "genuine") {
          scores.genuine.push_back(score);
        } else if (label == "impostor") {
          scores.impostor.push_back(score);
        } else {
          throw Error(ErrorCode::kUnknownLabel, "benchmark line " + std::to_string(line_no) +
                                                    ": unknown label '" + std::string(label) + "'");
        }
      }
    }
    if (nl == std::string_view::npos) break;
    text.remove_prefix(nl + 1);
  }
  return scores;
}

BenchmarkScores LoadBenchmarkScores(const std::filesystem::path& path) {
  std::string text;
  try {
    text = ReadFileBytes(path);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kNotFound) {
      throw Error(ErrorCode::kMissingBenchmark, "benchmark score file not found: " + path.string());
    }
    throw;
  }
  try {
    return ParseBenchmarkScores(text, path.stem().string());
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

std::string EncodeBenchmarkScores(const BenchmarkScores& scores) {
  std::string out = "label,score\n";
  for (double s : scores.genuine) out += "genuine," + FormatDouble(s) + "\n";
  for (double s : scores.impostor) out += "impostor," + FormatDouble(s) + "\n";
  return out;
}

void WriteBenchmarkScores(const BenchmarkScores& scores, const std::filesystem::path& path) {
  WriteFileAtomic(path, EncodeBenchmarkScores(scores));
}

std::string EncodeHistogramCsv(const Histogram& histogram) {
  std::string out = "bin_left,bin_right,count\n";
  for (std::size_t i = 0; i < histogram.bins; ++i) {
    out += FormatDouble(histogram.Edge(i)) + "," + FormatDouble(histogram.Edge(i + 1)) + "," +
           std::to_string(histogram.counts[i]) + "\n";
  }
  return out;
}

std::string EncodeHistogramSidecar(const Histogram& histogram, const FarThreshold* threshold,
                                   std::span<const HistogramMarker> markers) {
  json doc = {{"lo", histogram.lo},           {"hi", histogram.hi},
              {"bins", histogram.bins},       {"underflow", histogram.underflow},
              {"overflow", histogram.overflow}, {"total", histogram.Total()}};
  if (threshold != nullptr) {
    doc["far_threshold"] = {{"target_far", threshold->target_far},
                            {"threshold", threshold->threshold},
                            {"achieved_far", threshold->achieved_far},
                            {"impostor_count", threshold->impostor_count}};
  } else {
    doc["far_threshold"] = nullptr;
  }
  json marks = json::object();
  for (const auto& m : markers) marks[m.name] = m.value;
  doc["markers"] = marks;
  return doc.dump(2) + "\n";
}

}  // namespace leakcheck
