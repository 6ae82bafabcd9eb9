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

#ifndef LEAKCHECK_TESTS_TESTING_JSON_SCHEMA_H_
#define LEAKCHECK_TESTS_TESTING_JSON_SCHEMA_H_

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

namespace leakcheck::testing {

// Checks a document against the subset of JSON Schema the repo's schemas
// use: type, properties, required, additionalProperties, items, enum, const,
// minimum, maximum, minItems, maxItems, minLength, pattern-free strings and
// local "$ref": "#/$defs/<name>". Returns one message per violation.
std::vector<std::string> ValidateJson(const nlohmann::json& document,
                                      const nlohmann::json& schema);

nlohmann::json LoadSchema(const std::filesystem::path& path);

}  // namespace leakcheck::testing

#endif  // LEAKCHECK_TESTS_TESTING_JSON_SCHEMA_H_
