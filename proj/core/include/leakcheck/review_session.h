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

#ifndef LEAKCHECK_REVIEW_SESSION_H_
#define LEAKCHECK_REVIEW_SESSION_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "leakcheck/audit.h"
#include "leakcheck/review.h"

namespace leakcheck {

struct LabelSubmission {
  std::string pair_id;
  std::string reviewer_id;
  std::string label;
  std::optional<std::string> timestamp;  // stamped by the session when absent
};

struct SubmitResult {
  std::uint64_t record_id = 0;
  bool duplicate = false;
};

struct ReviewProgress {
  std::size_t labeled = 0;
  std::size_t total = 0;
};

// Queue state plus the append-only label log behind the review service.
// All members are safe to call concurrently; mutations are serialized.
class ReviewSession {
 public:
  ReviewSession() = default;
  ReviewSession(const ReviewSession&) = delete;
  ReviewSession& operator=(const ReviewSession&) = delete;

  // Loads report.json and the queue from audit_dir and replays the label log
  // (default audit_dir/labels.jsonl). An unterminated final log line that does
  // not parse is a write that was never acknowledged; it is cut off.
  void Open(const std::filesystem::path& audit_dir,
            std::optional<std::filesystem::path> label_log = std::nullopt);

  // Same, from an in-memory report.
  void Load(AuditReport report, const std::filesystem::path& label_log);

  bool loaded() const;

  // Lowest-rank pair this reviewer has not labeled, or nullopt when done.
  // Throws kQueueNotLoaded.
  std::optional<QueueEntry> NextPair(const std::string& reviewer_id) const;

  // Appends a record and fsyncs the log before returning. Exact repeats of an
  // earlier submission (pair, reviewer, label, timestamp) are acknowledged
  // without writing. Without a client timestamp, a repeat of the reviewer's
  // current label for the pair is treated the same way. A different label on
  // an already labeled pair is a relabel and supersedes the previous record.
  // Throws kQueueNotLoaded, kUnknownPair, kInvalidLabel, kInvalidArgument,
  // kStorageFailure.
  SubmitResult Submit(const LabelSubmission& submission);

  // Throws kQueueNotLoaded, kUnknownPair.
  QueueEntry FindPair(const std::string& pair_id) const;

  ReviewProgress Progress(const std::string& reviewer_id) const;

  // The finalized report over every durable label.
  AuditReport Report() const;

  std::vector<ReviewRecord> Records() const;
  std::vector<ReviewRecord> RecordsForPair(const std::string& pair_id) const;

  // Dataset ids of the audited pair of sets.
  std::string synthetic_id() const;
  std::string real_id() const;

 private:
  void RequireLoaded() const;
  void Apply(const ReviewRecord& record);

  mutable std::mutex mu_;
  bool loaded_ = false;
  AuditReport report_;
  std::filesystem::path log_path_;
  std::map<std::string, std::size_t> index_of_;  // pair_id -> queue position
  std::vector<ReviewRecord> records_;
  // (pair_id, reviewer_id) -> position in records_ of the effective record
  std::map<std::pair<std::string, std::string>, std::size_t> current_;
  std::map<std::string, std::set<std::size_t>> labeled_by_;  // reviewer -> queue positions
  mutable std::map<std::string, std::size_t> cursor_;          // reviewer -> first unlabeled
  std::map<std::string, std::uint64_t> seen_;                 // idempotency key -> record id
  std::uint64_t next_record_id_ = 1;
};

}  // namespace leakcheck

#endif  // LEAKCHECK_REVIEW_SESSION_H_
