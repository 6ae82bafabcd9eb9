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

#ifndef LEAKCHECK_AUDIT_H_
#define LEAKCHECK_AUDIT_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "leakcheck/calibration.h"
#include "leakcheck/review.h"
#include "leakcheck/similarity_engine.h"

namespace leakcheck {

inline constexpr std::size_t kDefaultTopK = 1500;
inline constexpr double kDefaultTargetFar = 1e-4;

enum class DedupMode { kAllPairs, kUniqueReal };

std::string_view DedupModeName(DedupMode mode);
DedupMode ParseDedupMode(std::string_view name);

struct HistogramParams {
  double lo = -1.0;
  double hi = 1.0;
  std::size_t bins = 100;

  bool operator==(const HistogramParams&) const = default;
};

struct AuditConfig {
  std::string synthetic_id;
  std::string real_id;
  std::size_t k = kDefaultTopK;
  double target_far = kDefaultTargetFar;
  DedupMode dedup_mode = DedupMode::kAllPairs;
  HistogramParams histogram;
  std::size_t required_reviewers = 1;

  // Throws kInvalidArgument / kInvalidRange.
  void Validate() const;

  bool operator==(const AuditConfig&) const = default;
};

struct AuditInputs {
  std::filesystem::path registry;
  std::filesystem::path benchmark;
};

// Digest of one input file, recorded so a finding can be traced back to the
// exact bytes it came from.
struct InputFile {
  std::string role;
  std::string path;
  std::string sha256;

  bool operator==(const InputFile&) const = default;
};

// One line of the review queue.
struct QueueEntry {
  std::string pair_id;
  std::size_t rank = 0;  // 1-based
  std::uint64_t synth_index = 0;
  std::uint64_t real_index = 0;
  double score = 0.0;
  std::string synth_path;
  std::string real_path;
  bool above_threshold = false;

  bool operator==(const QueueEntry&) const = default;
};

// "s<synth_index>-r<real_index>"
std::string MakePairId(std::uint64_t synth_index, std::uint64_t real_index);

struct ScoreSummary {
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;

  bool operator==(const ScoreSummary&) const = default;
};

struct AuditReport {
  int schema_version = 1;
  std::string report_id;
  std::string created_at;
  AuditConfig config;
  std::vector<InputFile> inputs;
  std::uint64_t synthetic_count = 0;
  std::uint64_t real_count = 0;
  std::size_t dim = 0;
  FarThreshold far;
  double above_threshold_fraction = 0.0;
  ScoreSummary nearest_scores;
  Histogram histogram;
  std::vector<QueueEntry> queue;
  ReviewSummary review = EmptyReviewSummary();

  bool operator==(const AuditReport&) const = default;
};

// Output file names inside an audit directory.
inline constexpr std::string_view kReportFile = "report.json";
inline constexpr std::string_view kQueueFile = "queue.jsonl";
inline constexpr std::string_view kHistogramCsvFile = "histogram.csv";
inline constexpr std::string_view kHistogramSidecarFile = "histogram.json";
inline constexpr std::string_view kLabelLogFile = "labels.jsonl";
inline constexpr std::string_view kFinalReportFile = "report.final.json";

struct AuditRunOptions {
  EngineOptions engine;
  // Overrides the wall-clock created_at (tests pin it).
  std::optional<std::string> created_at;
};

// Loads both sets through the registry, derives the FAR threshold, runs the
// nearest-match and top-k searches and assembles a report whose review
// section is still pending. Nothing is written.
//
// Errors: kMissingDataset, kMissingBenchmark, plus anything raised by the
// embedding store, the engine or calibration.
AuditReport ComputeAudit(const AuditConfig& config, const AuditInputs& inputs,
                         const AuditRunOptions& options = {});

// Writes queue.jsonl, histogram.csv, histogram.json and report.json into
// out_dir (created if needed). Each file is replaced atomically; if any write
// fails the files already written by this call are removed.
void WriteAuditOutputs(const AuditReport& report, const std::filesystem::path& out_dir);

// ComputeAudit followed by WriteAuditOutputs.
AuditReport RunAudit(const AuditConfig& config, const AuditInputs& inputs,
                     const std::filesystem::path& out_dir, const AuditRunOptions& options = {});

// Folds the label log into the report. For each (reviewer, pair) the latest
// record wins and earlier ones are listed as supersessions. A pair is a
// consensus leak iff at least config.required_reviewers distinct reviewers
// labeled it and every one of their labels is kLeaked.
// Throws kUnknownPair for labels on pairs outside the queue.
AuditReport FinalizeReport(const AuditReport& report, std::span<const ReviewRecord> labels);

std::string EncodeQueueJsonl(std::span<const QueueEntry> queue);
std::vector<QueueEntry> ParseQueueJsonl(std::string_view text);

// Report JSON (without the queue entries, which live in queue.jsonl).
std::string EncodeAuditReport(const AuditReport& report);
AuditReport DecodeAuditReport(std::string_view json_text, std::vector<QueueEntry> queue);

// Reads report.json and the queue file it names from an audit directory.
AuditReport LoadAuditReport(const std::filesystem::path& audit_dir);

}  // namespace leakcheck

#endif  // LEAKCHECK_AUDIT_H_
