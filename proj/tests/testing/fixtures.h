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

#ifndef LEAKCHECK_TESTS_TESTING_FIXTURES_H_
#define LEAKCHECK_TESTS_TESTING_FIXTURES_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "leakcheck/audit.h"
#include "leakcheck/calibration.h"
#include "leakcheck/embedding_set.h"

namespace leakcheck::testing {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

// Normalized set from explicit rows (rows are normalized here).
EmbeddingSet SetFromRows(const std::string& id, const std::vector<std::vector<float>>& rows);

// Unnormalized set from explicit rows.
EmbeddingSet RawSetFromRows(const std::string& id, const std::vector<std::vector<float>>& rows);

// Standard basis vector e_i (0-based) of length dim.
std::vector<float> Basis(std::size_t dim, std::size_t i);

// Cosines of `count` pairs of independent random unit vectors.
std::vector<double> RandomPairCosines(std::size_t count, std::size_t dim, std::uint64_t seed);

struct AuditFiles {
  std::filesystem::path registry;
  std::filesystem::path benchmark;
  std::string synthetic_id;
  std::string real_id;
};

// Writes both sets (with manifests), a registry naming them (the synthetic
// set's training dataset is the real one) and a benchmark CSV into dir.
AuditFiles WriteAuditInputs(const std::filesystem::path& dir, const EmbeddingSet& synthetic,
                            const EmbeddingSet& real, const BenchmarkScores& benchmark);

// Small random instance with a benchmark of random-pair cosines.
AuditFiles WriteRandomAuditInputs(const std::filesystem::path& dir, std::size_t synthetic_count,
                                  std::size_t real_count, std::size_t dim, std::uint64_t seed);

struct PlantedLeak {
  EmbeddingSet gallery;
  EmbeddingSet synthetic;
  // (synth_index, real_index) of every planted near-duplicate.
  std::vector<std::pair<std::uint64_t, std::uint64_t>> planted;
  BenchmarkScores benchmark;
};

// Gallery of `gallery_count` random unit vectors; synthetic set of
// `background_count` random unit vectors followed by `planted_count` copies of
// distinct gallery rows with N(0, sigma^2) noise per component, renormalized.
// The benchmark holds `impostor_count` random-pair cosines and one genuine
// score per planted pair.
PlantedLeak MakePlantedLeak(std::size_t gallery_count, std::size_t background_count,
                            std::size_t planted_count, std::size_t dim, double sigma,
                            std::size_t impostor_count, std::uint64_t seed);

// Report holding only a queue of n pairs "s<i>-r0" with descending scores;
// paths are "s/<i>.png" and "r/0.png".
AuditReport QueueOnlyReport(std::size_t n, std::size_t required_reviewers);

}  // namespace leakcheck::testing

#endif  // LEAKCHECK_TESTS_TESTING_FIXTURES_H_
