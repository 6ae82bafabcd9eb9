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

#ifndef LEAKCHECK_REVIEW_H_
#define LEAKCHECK_REVIEW_H_

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace leakcheck {

// Reviewer verdicts for a candidate pair. Only kLeaked can count towards a
// leak; the others record why a high-scoring pair was set aside.
enum class Label {
  kLeaked,
  kChild,
  kNoFace,
  kNotSameIdentity,
  kUncertain,
};

inline constexpr std::array<Label, 5> kAllLabels = {
    Label::kLeaked, Label::kChild, Label::kNoFace, Label::kNotSameIdentity, Label::kUncertain};

std::string_view LabelName(Label label);
// Throws kInvalidLabel.
Label ParseLabel(std::string_view name);

// One line of the append-only label log.
struct ReviewRecord {
  std::uint64_t record_id = 0;
  std::string pair_id;
  std::string reviewer_id;
  Label label = Label::kUncertain;
  std::string timestamp;  // RFC 3339 UTC
  std::optional<std::uint64_t> supersedes;

  bool operator==(const ReviewRecord&) const = default;
};

std::string EncodeReviewRecord(const ReviewRecord& record);
ReviewRecord ParseReviewRecord(std::string_view line);
// Label log: one ReviewRecord per line. Throws kParseFailure / kInvalidLabel.
std::vector<ReviewRecord> ParseLabelLog(std::string_view text);

struct Supersession {
  std::uint64_t superseded = 0;
  std::uint64_t by = 0;
  std::string pair_id;
  std::string reviewer_id;

  bool operator==(const Supersession&) const = default;
};

// Review section of an audit report; empty until labels are folded in.
struct ReviewSummary {
  bool finalized = false;
  std::uint64_t label_count = 0;  // records in the log
  std::map<Label, std::uint64_t> tallies;  // effective labels, net of supersessions
  std::uint64_t reviewed_pairs = 0;
  std::uint64_t consensus_leaked_count = 0;
  // pair_id -> reviewers who agreed; detail lives with the queue entries.
  std::vector<std::pair<std::string, std::vector<std::string>>> leaked_pairs;
  std::vector<Supersession> supersessions;

  bool operator==(const ReviewSummary&) const = default;
};

ReviewSummary EmptyReviewSummary();

}  // namespace leakcheck

#endif  // LEAKCHECK_REVIEW_H_
