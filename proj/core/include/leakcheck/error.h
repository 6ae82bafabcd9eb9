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

#ifndef LEAKCHECK_ERROR_H_
#define LEAKCHECK_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace leakcheck {

// Every failure surfaced by the library carries one of these codes. The CLI
// maps codes onto a small, stable set of process exit codes (see ExitCodeFor).
enum class ErrorCode {
  kInternal,
  // Missing inputs.
  kNotFound,
  kMissingDataset,
  kMissingBenchmark,
  // Malformed files.
  kBadMagic,
  kUnsupportedVersion,
  kTruncatedPayload,
  kDimensionZero,
  kParseFailure,
  kRaggedRows,
  kManifestMismatch,
  kUnknownLabel,
  // Invalid data or arguments.
  kInvariantViolation,
  kZeroVector,
  kEmptyInput,
  kDimMismatch,
  kUnnormalizedInput,
  kEmptySet,
  kInvalidArgument,
  kEmptyImpostorSet,
  kInvalidRange,
  kEmptyMatches,
  kSizeOverflow,
  // Review workflow.
  kUnknownPair,
  kInvalidLabel,
  kQueueNotLoaded,
  // Environment.
  kIoFailure,
  kStorageFailure,
  kExtractorFailed,
};

std::string_view ErrorCodeName(ErrorCode code);

// Process exit codes. Values are part of the CLI contract; do not renumber.
enum class ExitCode : int {
  kOk = 0,
  kInternal = 1,
  kUsage = 2,
  kMissingInput = 3,
  kBadFormat = 4,
  kInvalidInput = 5,
  kReview = 6,
  kIo = 7,
  kExtractor = 8,
};

ExitCode ExitCodeFor(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace leakcheck

#endif  // LEAKCHECK_ERROR_H_
