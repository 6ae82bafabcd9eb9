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

#ifndef LEAKCHECK_FILE_UTIL_H_
#define LEAKCHECK_FILE_UTIL_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace leakcheck {

// Reads the whole file. Throws kNotFound if it does not exist and kIoFailure
// on read errors.
std::string ReadFileBytes(const std::filesystem::path& path);

// Writes `contents` to a temporary sibling, fsyncs it and renames it over
// `path`, so readers never observe a partially written file.
void WriteFileAtomic(const std::filesystem::path& path,
                     std::string_view contents);

// Appends `line` to `path` (created if missing) and fsyncs before returning.
// Throws kStorageFailure.
void AppendDurable(const std::filesystem::path& path, std::string_view line);

// Lowercase hex SHA-256.
std::string Sha256Hex(std::string_view bytes);
std::string Sha256HexOfFile(const std::filesystem::path& path);

// Current UTC time as RFC 3339 with millisecond precision, e.g.
// "2026-10-16T14:52:07.125Z".
std::string UtcTimestampNow();

// Removes the listed files if they exist; errors are ignored. Used to clean up
// multi-file outputs after a failure.
void RemoveQuietly(std::span<const std::filesystem::path> paths);

}  // namespace leakcheck

#endif  // LEAKCHECK_FILE_UTIL_H_
