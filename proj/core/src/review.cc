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

#include "leakcheck/review.h"

#include "json.hpp"
#include "leakcheck/error.h"

namespace leakcheck {
using nlohmann::json;

std::string_view LabelName(Label label) {
  switch (label) {
    case Label::kLeaked: return "leaked";
    case Label::kChild: return "child";
    case Label::kNoFace: return "no_face";
    case Label::kNotSameIdentity: return "not_same_identity";
    case Label::kUncertain: return "uncertain";
  }
  return "uncertain";
}

Label ParseLabel(std::string_view name) {
  for (Label label : kAllLabels) {
    if (LabelName(label) == name) return label;
  }
  throw Error(ErrorCode::kInvalidLabel, "invalid label '" + std::string(name) +
                                            "' (expected leaked, child, no_face, "
                                            "not_same_identity or uncertain)");
}

std::string EncodeReviewRecord(const ReviewRecord& record) {
  json obj = {{"record_id", record.record_id},
              {"pair_id", record.pair_id},
              {"reviewer_id", record.reviewer_id},
              {"label", std::string(LabelName(record.label))},
              {"timestamp", record.timestamp}};
  obj["supersedes"] = record.supersedes ? json(*record.supersedes) : json(nullptr);
  return obj.dump();
}

ReviewRecord ParseReviewRecord(std::string_view line) {
  json obj;
  try {
    obj = json::parse(line);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParseFailure, std::string("label record: ") + e.what());
  }
  ReviewRecord record;
  try {
    record.record_id = obj.at("record_id").get<std::uint64_t>();
    record.pair_id = obj.at("pair_id").get<std::string>();
    record.reviewer_id = obj.at("reviewer_id").get<std::string>();
    record.timestamp = obj.at("timestamp").get<std::string>();
    if (obj.contains("supersedes") && !obj["supersedes"].is_null()) {
      record.supersedes = obj["supersedes"].get<std::uint64_t>();
    }
    record.label = ParseLabel(obj.at("label").get<std::string>());
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParseFailure, std::string("label record: ") + e.what());
  }
  return record;
}

std::vector<ReviewRecord> ParseLabelLog(std::string_view text) {
  std::vector<ReviewRecord> records;
  while (!text.empty()) {
    const std::size_t nl = text.find('\n');
    const std::string_view line = text.substr(0, nl);
    if (!line.empty() && line != "\r") records.push_back(ParseReviewRecord(line));
    if (nl == std::string_view::npos) break;
    text.remove_prefix(nl + 1);
  }
  return records;
}

ReviewSummary EmptyReviewSummary() {
  ReviewSummary summary;
  for (Label label : kAllLabels) summary.tallies[label] = 0;
  return summary;
}

}  // namespace leakcheck
