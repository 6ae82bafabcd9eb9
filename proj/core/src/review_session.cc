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

#include "leakcheck/review_session.h"

#include <system_error>
#include <utility>

#include "leakcheck/error.h"
#include "leakcheck/file_util.h"

namespace leakcheck {
namespace fs = std::filesystem;

namespace {

std::string IdempotencyKey(const std::string& pair_id, const std::string& reviewer_id,
                           Label label, const std::string& timestamp) {
  std::string key = pair_id;
  for (std::string_view part : {std::string_view(reviewer_id), LabelName(label),
                                std::string_view(timestamp)}) {
    key += '\x1f';
    key += part;
  }
  return key;
}

// Reads the label log, trimming an unacknowledged torn tail.
std::vector<ReviewRecord> ReplayLog(const fs::path& path) {
  std::error_code ec;
  if (!fs::exists(path, ec)) return {};
  std::string text = ReadFileBytes(path);
  if (!text.empty() && text.back() != '\n') {
    const std::size_t cut = text.rfind('\n') == std::string::npos ? 0 : text.rfind('\n') + 1;
    bool tail_ok = true;
    try {
      ParseReviewRecord(std::string_view(text).substr(cut));
    } catch (const Error&) {
      tail_ok = false;
    }
    if (tail_ok) {
      AppendDurable(path, "\n");
      text.push_back('\n');
    } else {
      fs::resize_file(path, cut, ec);
      if (ec) {
        throw Error(ErrorCode::kStorageFailure,
                    "cannot trim torn label log " + path.string() + ": " + ec.message());
      }
      text.resize(cut);
    }
  }
  return ParseLabelLog(text);
}

}  // namespace

void ReviewSession::Open(const fs::path& audit_dir, std::optional<fs::path> label_log) {
  Load(LoadAuditReport(audit_dir), label_log ? *label_log : audit_dir / kLabelLogFile);
}

void ReviewSession::Load(AuditReport report, const fs::path& label_log) {
  std::map<std::string, std::size_t> index_of;
  for (std::size_t i = 0; i < report.queue.size(); ++i) {
    index_of.emplace(report.queue[i].pair_id, i);
  }
  const std::vector<ReviewRecord> replay = ReplayLog(label_log);

  std::lock_guard lock(mu_);
  report_ = std::move(report);
  log_path_ = label_log;
  index_of_ = std::move(index_of);
  records_.clear();
  current_.clear();
  labeled_by_.clear();
  cursor_.clear();
  seen_.clear();
  next_record_id_ = 1;
  loaded_ = true;
  for (const ReviewRecord& r : replay) {
    if (!index_of_.contains(r.pair_id)) {
      loaded_ = false;
      throw Error(ErrorCode::kUnknownPair,
                  "label log references unknown pair '" + r.pair_id + "'");
    }
    Apply(r);
  }
}

bool ReviewSession::loaded() const {
  std::lock_guard lock(mu_);
  return loaded_;
}

void ReviewSession::RequireLoaded() const {
  if (!loaded_) throw Error(ErrorCode::kQueueNotLoaded, "review queue not loaded");
}

void ReviewSession::Apply(const ReviewRecord& record) {
  current_[{record.pair_id, record.reviewer_id}] = records_.size();
  labeled_by_[record.reviewer_id].insert(index_of_.at(record.pair_id));
  seen_.emplace(IdempotencyKey(record.pair_id, record.reviewer_id, record.label, record.timestamp),
                record.record_id);
  next_record_id_ = std::max(next_record_id_, record.record_id + 1);
  records_.push_back(record);
}

std::optional<QueueEntry> ReviewSession::NextPair(const std::string& reviewer_id) const {
  std::lock_guard lock(mu_);
  RequireLoaded();
  std::size_t& cursor = cursor_[reviewer_id];
  auto labeled = labeled_by_.find(reviewer_id);
  while (cursor < report_.queue.size() && labeled != labeled_by_.end() &&
         labeled->second.contains(cursor)) {
    ++cursor;
  }
  if (cursor >= report_.queue.size()) return std::nullopt;
  return report_.queue[cursor];
}

SubmitResult ReviewSession::Submit(const LabelSubmission& submission) {
  const Label label = ParseLabel(submission.label);
  if (submission.reviewer_id.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "reviewer_id is required");
  }
  if (submission.timestamp && submission.timestamp->empty()) {
    throw Error(ErrorCode::kInvalidArgument, "timestamp must not be empty");
  }

  std::lock_guard lock(mu_);
  RequireLoaded();
  if (!index_of_.contains(submission.pair_id)) {
    throw Error(ErrorCode::kUnknownPair, "unknown pair '" + submission.pair_id + "'");
  }
  auto current = current_.find({submission.pair_id, submission.reviewer_id});
  if (submission.timestamp) {
    auto seen = seen_.find(
        IdempotencyKey(submission.pair_id, submission.reviewer_id, label, *submission.timestamp));
    if (seen != seen_.end()) return {seen->second, true};
  } else if (current != current_.end() && records_[current->second].label == label) {
    return {records_[current->second].record_id, true};
  }

  ReviewRecord record;
  record.record_id = next_record_id_;
  record.pair_id = submission.pair_id;
  record.reviewer_id = submission.reviewer_id;
  record.label = label;
  record.timestamp = submission.timestamp ? *submission.timestamp : UtcTimestampNow();
  if (current != current_.end()) record.supersedes = records_[current->second].record_id;

  AppendDurable(log_path_, EncodeReviewRecord(record) + "\n");
  Apply(record);
  return {record.record_id, false};
}

QueueEntry ReviewSession::FindPair(const std::string& pair_id) const {
  std::lock_guard lock(mu_);
  RequireLoaded();
  auto it = index_of_.find(pair_id);
  if (it == index_of_.end()) throw Error(ErrorCode::kUnknownPair, "unknown pair '" + pair_id + "'");
  return report_.queue[it->second];
}

ReviewProgress ReviewSession::Progress(const std::string& reviewer_id) const {
  std::lock_guard lock(mu_);
  RequireLoaded();
  auto it = labeled_by_.find(reviewer_id);
  return {it == labeled_by_.end() ? 0 : it->second.size(), report_.queue.size()};
}

AuditReport ReviewSession::Report() const {
  AuditReport report;
  std::vector<ReviewRecord> records;
  {
    std::lock_guard lock(mu_);
    RequireLoaded();
    report = report_;
    records = records_;
  }
  return FinalizeReport(report, records);
}

std::vector<ReviewRecord> ReviewSession::Records() const {
  std::lock_guard lock(mu_);
  return records_;
}

std::vector<ReviewRecord> ReviewSession::RecordsForPair(const std::string& pair_id) const {
  std::lock_guard lock(mu_);
  std::vector<ReviewRecord> out;
  for (const ReviewRecord& r : records_) {
    if (r.pair_id == pair_id) out.push_back(r);
  }
  return out;
}

std::string ReviewSession::synthetic_id() const {
  std::lock_guard lock(mu_);
  RequireLoaded();
  return report_.config.synthetic_id;
}

std::string ReviewSession::real_id() const {
  std::lock_guard lock(mu_);
  RequireLoaded();
  return report_.config.real_id;
}

}  // namespace leakcheck
