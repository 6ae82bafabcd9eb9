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

#include "leakcheck/error.h"

namespace leakcheck {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInternal: return "internal";
    case ErrorCode::kNotFound: return "not-found";
    case ErrorCode::kMissingDataset: return "missing-dataset";
    case ErrorCode::kMissingBenchmark: return "missing-benchmark";
    case ErrorCode::kBadMagic: return "bad-magic";
    case ErrorCode::kUnsupportedVersion: return "unsupported-version";
    case ErrorCode::kTruncatedPayload: return "truncated-payload";
    case ErrorCode::kDimensionZero: return "dimension-zero";
    case ErrorCode::kParseFailure: return "parse-failure";
    case ErrorCode::kRaggedRows: return "ragged-rows";
    case ErrorCode::kManifestMismatch: return "manifest-mismatch";
    case ErrorCode::kUnknownLabel: return "unknown-label";
    case ErrorCode::kInvariantViolation: return "invariant-violation";
    case ErrorCode::kZeroVector: return "zero-vector";
    case ErrorCode::kEmptyInput: return "empty-input";
    case ErrorCode::kDimMismatch: return "dim-mismatch";
    case ErrorCode::kUnnormalizedInput: return "unnormalized-input";
    case ErrorCode::kEmptySet: return "empty-set";
    case ErrorCode::kInvalidArgument: return "invalid-argument";
    case ErrorCode::kEmptyImpostorSet: return "empty-impostor-set";
    case ErrorCode::kInvalidRange: return "invalid-range";
    case ErrorCode::kEmptyMatches: return "empty-matches";
    case ErrorCode::kSizeOverflow: return "size-overflow";
    case ErrorCode::kUnknownPair: return "unknown-pair";
    case ErrorCode::kInvalidLabel: return "invalid-label";
    case ErrorCode::kQueueNotLoaded: return "queue-not-loaded";
    case ErrorCode::kIoFailure: return "io-failure";
    case ErrorCode::kStorageFailure: return "storage-failure";
    case ErrorCode::kExtractorFailed: return "extractor-failed";
  }
  return "unknown";
}

ExitCode ExitCodeFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInternal:
      return ExitCode::kInternal;
    case ErrorCode::kNotFound:
    case ErrorCode::kMissingDataset:
    case ErrorCode::kMissingBenchmark:
      return ExitCode::kMissingInput;
    case ErrorCode::kBadMagic:
    case ErrorCode::kUnsupportedVersion:
    case ErrorCode::kTruncatedPayload:
    case ErrorCode::kDimensionZero:
    case ErrorCode::kParseFailure:
    case ErrorCode::kRaggedRows:
    case ErrorCode::kManifestMismatch:
    case ErrorCode::kUnknownLabel:
      return ExitCode::kBadFormat;
    case ErrorCode::kInvariantViolation:
    case ErrorCode::kZeroVector:
    case ErrorCode::kEmptyInput:
    case ErrorCode::kDimMismatch:
    case ErrorCode::kUnnormalizedInput:
    case ErrorCode::kEmptySet:
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kEmptyImpostorSet:
    case ErrorCode::kInvalidRange:
    case ErrorCode::kEmptyMatches:
    case ErrorCode::kSizeOverflow:
      return ExitCode::kInvalidInput;
    case ErrorCode::kUnknownPair:
    case ErrorCode::kInvalidLabel:
    case ErrorCode::kQueueNotLoaded:
      return ExitCode::kReview;
    case ErrorCode::kIoFailure:
    case ErrorCode::kStorageFailure:
      return ExitCode::kIo;
    case ErrorCode::kExtractorFailed:
      return ExitCode::kExtractor;
  }
  return ExitCode::kInternal;
}

}  // namespace leakcheck
