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

#include "testing/fixtures.h"

#include <stdlib.h>

#include <cmath>
#include <stdexcept>
#include <system_error>

#include "leakcheck/embedding_io.h"
#include "leakcheck/random_embeddings.h"
#include "leakcheck/registry.h"
#include "testing/oracles.h"

namespace leakcheck::testing {
namespace fs = std::filesystem;

TempDir::TempDir() {
  std::string pattern = (fs::temp_directory_path() / "leakcheck-test-XXXXXX").string();
  if (::mkdtemp(pattern.data()) == nullptr) throw std::runtime_error("mkdtemp failed");
  path_ = pattern;
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

EmbeddingSet RawSetFromRows(const std::string& id, const std::vector<std::vector<float>>& rows) {
  const std::size_t dim = rows.empty() ? 1 : rows.front().size();
  std::vector<float> data;
  for (const auto& r : rows) data.insert(data.end(), r.begin(), r.end());
  return EmbeddingSet::Create(id, dim, std::move(data), SequentialManifest(rows.size(), id + "/"),
                              false);
}

EmbeddingSet SetFromRows(const std::string& id, const std::vector<std::vector<float>>& rows) {
  return Normalize(RawSetFromRows(id, rows));
}

std::vector<float> Basis(std::size_t dim, std::size_t i) {
  std::vector<float> v(dim, 0.0f);
  v.at(i) = 1.0f;
  return v;
}

std::vector<double> RandomPairCosines(std::size_t count, std::size_t dim, std::uint64_t seed) {
  const EmbeddingSet a = RandomUnitSet("a", count, dim, seed);
  const EmbeddingSet b = RandomUnitSet("b", count, dim, seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<double> scores(count);
  for (std::size_t i = 0; i < count; ++i) scores[i] = OracleDot(a.Row(i), b.Row(i));
  return scores;
}

AuditFiles WriteAuditInputs(const fs::path& dir, const EmbeddingSet& synthetic,
                            const EmbeddingSet& real, const BenchmarkScores& benchmark) {
  fs::create_directories(dir / "images" / synthetic.dataset_id());
  fs::create_directories(dir / "images" / real.dataset_id());
  WriteEmbeddingSet(synthetic, dir / (synthetic.dataset_id() + ".embs"));
  WriteEmbeddingSet(real, dir / (real.dataset_id() + ".embs"));
  DatasetRegistryEntry real_entry;
  real_entry.dataset_id = real.dataset_id();
  real_entry.kind = DatasetKind::kReal;
  real_entry.embeddings = real.dataset_id() + ".embs";
  real_entry.image_root = "images";
  DatasetRegistryEntry synth_entry;
  synth_entry.dataset_id = synthetic.dataset_id();
  synth_entry.kind = DatasetKind::kSynthetic;
  synth_entry.generator_name = "test-generator";
  synth_entry.training_dataset_id = real.dataset_id();
  synth_entry.embeddings = synthetic.dataset_id() + ".embs";
  synth_entry.image_root = "images";
  DatasetRegistry::FromEntries({real_entry, synth_entry}, dir).Save(dir / "registry.json");
  WriteBenchmarkScores(benchmark, dir / "benchmark.csv");
  return {dir / "registry.json", dir / "benchmark.csv", synthetic.dataset_id(), real.dataset_id()};
}

AuditFiles WriteRandomAuditInputs(const fs::path& dir, std::size_t synthetic_count,
                                  std::size_t real_count, std::size_t dim, std::uint64_t seed) {
  const EmbeddingSet synthetic = RandomUnitSet("synth", synthetic_count, dim, seed);
  const EmbeddingSet real = RandomUnitSet("real", real_count, dim, seed + 1);
  BenchmarkScores benchmark;
  benchmark.impostor = RandomPairCosines(2000, dim, seed + 2);
  benchmark.genuine = {0.9, 0.8, 0.7};
  return WriteAuditInputs(dir, synthetic, real, benchmark);
}

PlantedLeak MakePlantedLeak(std::size_t gallery_count, std::size_t background_count,
                            std::size_t planted_count, std::size_t dim, double sigma,
                            std::size_t impostor_count, std::uint64_t seed) {
  if (planted_count > gallery_count) throw std::invalid_argument("too many planted rows");
  PlantedLeak leak;
  leak.gallery = RandomUnitSet("gallery", gallery_count, dim, seed);
  const EmbeddingSet background = RandomUnitSet("background", background_count, dim, seed + 1);

  std::vector<float> rows(background.data().begin(), background.data().end());
  GaussianSource noise(seed + 2);
  // Distinct gallery rows spread over the whole set.
  const std::size_t stride = gallery_count / planted_count;
  for (std::size_t p = 0; p < planted_count; ++p) {
    const std::size_t j = p * stride + (p * 7919) % stride;
    std::vector<float> row(leak.gallery.Row(j).begin(), leak.gallery.Row(j).end());
    for (float& x : row) x += static_cast<float>(sigma * noise.Next());
    NormalizeInPlace(row);
    rows.insert(rows.end(), row.begin(), row.end());
    leak.planted.emplace_back(background_count + p, j);
  }
  const std::size_t total = background_count + planted_count;
  std::vector<ManifestRecord> manifest = SequentialManifest(total, "synthetic/");
  leak.synthetic = EmbeddingSet::Create("synthetic", dim, std::move(rows), std::move(manifest),
                                        true);

  leak.benchmark.source_id = "planted";
  leak.benchmark.impostor = RandomPairCosines(impostor_count, dim, seed + 3);
  for (const auto& [s, r] : leak.planted) {
    leak.benchmark.genuine.push_back(OracleDot(leak.synthetic.Row(s), leak.gallery.Row(r)));
  }
  return leak;
}

AuditReport QueueOnlyReport(std::size_t n, std::size_t required_reviewers) {
  AuditReport report;
  report.report_id = "fixture";
  report.created_at = "2026-01-01T00:00:00Z";
  report.config.synthetic_id = "s";
  report.config.real_id = "r";
  report.config.required_reviewers = required_reviewers;
  for (std::size_t i = 0; i < n; ++i) {
    QueueEntry e;
    e.rank = i + 1;
    e.synth_index = i;
    e.pair_id = MakePairId(i, 0);
    e.score = 0.9 - 0.01 * static_cast<double>(i);
    e.synth_path = "s/" + std::to_string(i) + ".png";
    e.real_path = "r/0.png";
    report.queue.push_back(e);
  }
  return report;
}

}  // namespace leakcheck::testing
