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

// Acceptance suite. Each criterion prints one PASS/FAIL line; with no
// arguments every criterion runs, otherwise only the named ones.
//
//   acceptance [--list] [criterion ...]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cli.h"
#include "json.hpp"
#include "leakcheck/audit.h"
#include "leakcheck/calibration.h"
#include "leakcheck/error.h"
#include "leakcheck/file_util.h"
#include "leakcheck/random_embeddings.h"
#include "leakcheck/reference_engine.h"
#include "leakcheck/result_io.h"
#include "leakcheck/similarity_engine.h"
#include "testing/fixtures.h"
#include "testing/oracles.h"

namespace leakcheck::acceptance {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double SecondsSince(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string Format(const char* fmt, double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), fmt, value);
  return buf;
}

int RunCli(const std::vector<std::string>& args, std::string* err_text = nullptr) {
  std::ostringstream out, err;
  const int code = cli::RunCli(args, out, err);
  if (err_text != nullptr) *err_text = err.str();
  return code;
}

// Vectors with entries in {-1, 0, 1}: many exactly tied scores.
EmbeddingSet LatticeSet(const std::string& id, std::size_t count, std::size_t dim,
                        std::mt19937_64& rng) {
  std::vector<std::vector<float>> rows(count, std::vector<float>(dim));
  for (auto& row : rows) {
    bool nonzero = false;
    for (float& x : row) {
      x = static_cast<float>(static_cast<int>(rng() % 3) - 1);
      nonzero = nonzero || x != 0.0f;
    }
    if (!nonzero) row[0] = 1.0f;
  }
  return testing::SetFromRows(id, rows);
}

Outcome OracleEquivalence() {
  const auto start = Clock::now();
  const std::size_t dims[] = {8, 64, 512};
  const std::size_t ks[] = {1, 10, 1500};
  std::mt19937_64 rng(20260101);
  auto log_uniform_count = [&] {
    const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    return std::min<std::size_t>(2000, static_cast<std::size_t>(std::exp(u * std::log(2001.0))));
  };
  const int kInstances = 108;
  std::size_t mismatches = 0, lattice = 0, largest = 0;
  std::string first_failure;
  for (int i = 0; i < kInstances; ++i) {
    const std::size_t dim = dims[i % 3];
    const std::size_t k = ks[(i / 3) % 3];
    const std::size_t n = std::max<std::size_t>(1, log_uniform_count());
    const std::size_t m = std::max<std::size_t>(1, log_uniform_count());
    largest = std::max(largest, n * m);
    EmbeddingSet s(1), r(1);
    if (i % 4 == 3) {
      s = LatticeSet("s", n, dim, rng);
      r = LatticeSet("r", m, dim, rng);
      ++lattice;
    } else {
      s = RandomUnitSet("s", n, dim, rng());
      r = RandomUnitSet("r", m, dim, rng());
    }
    const bool topk_ok = TopKPairs(s, r, k).pairs == testing::OracleTopK(s, r, k);
    const bool nearest_ok = FindNearestMatches(s, r).rows == testing::OracleNearest(s, r);
    const bool unique_ok = UniqueRealTopK(s, r, k).pairs == testing::OracleUniqueReal(s, r, k);
    if (!(topk_ok && nearest_ok && unique_ok)) {
      ++mismatches;
      if (first_failure.empty()) {
        first_failure = "; first mismatch: instance " + std::to_string(i) + " (" +
                        std::to_string(n) + "x" + std::to_string(m) + ", dim " +
                        std::to_string(dim) + ", k " + std::to_string(k) + ")";
      }
    }
  }
  const double seconds = SecondsSince(start);
  Outcome o;
  o.pass = mismatches == 0 && seconds < 60.0;
  o.detail = std::to_string(kInstances) + " instances (" + std::to_string(lattice) +
             " with exact ties, largest " + std::to_string(largest) + " pairs), " +
             std::to_string(mismatches) + " mismatches, " + Format("%.1f s", seconds) +
             " (limit 60 s)" + first_failure;
  return o;
}

Outcome Determinism() {
  const EmbeddingSet s = RandomUnitSet("s", 5000, 512, 7001);
  const EmbeddingSet r = RandomUnitSet("r", 20000, 512, 7002);
  struct Config {
    unsigned workers;
    std::size_t query_tile, gallery_tile;
  };
  std::vector<Config> configs;
  for (unsigned w : {1u, 2u, 8u}) {
    configs.push_back({w, 32, 128});
    configs.push_back({w, 256, 4096});
  }
  std::string reference;
  std::size_t differing = 0;
  for (const Config& c : configs) {
    const EngineOptions options{c.query_tile, c.gallery_tile, c.workers};
    const std::string bytes =
        EncodeResultCache(CacheOf(TopKPairs(s, r, 1500, options), ResultKind::kTopKPairs)) +
        EncodeResultCache(CacheOf(UniqueRealTopK(s, r, 1500, options), ResultKind::kUniqueRealTopK)) +
        EncodeNearestJsonl(FindNearestMatches(s, r, options));
    if (reference.empty()) {
      reference = bytes;
    } else if (bytes != reference) {
      ++differing;
    }
  }
  Outcome o;
  o.pass = differing == 0;
  o.detail = std::to_string(configs.size()) +
             " configurations (workers 1/2/8 x tiles 32x128, 256x4096) on 5000x20000 dim 512; " +
             std::to_string(differing) + " differ; output sha256 " +
             Sha256Hex(reference).substr(0, 16);
  return o;
}

Outcome PlantedLeakEndToEnd() {
  const auto start = Clock::now();
  testing::TempDir dir;
  const testing::PlantedLeak leak =
      testing::MakePlantedLeak(10000, 5000, 50, 512, 0.05, 100000, 4242);
  const testing::AuditFiles files =
      testing::WriteAuditInputs(dir.path(), leak.synthetic, leak.gallery, leak.benchmark);
  std::string err;
  const int code = RunCli({"audit", "--registry", files.registry.string(), "--benchmark",
                           files.benchmark.string(), "--synthetic", files.synthetic_id, "--real",
                           files.real_id, "--out", (dir / "out").string(), "--k", "100"},
                          &err);
  const double seconds = SecondsSince(start);
  if (code != 0) return {false, "audit exited " + std::to_string(code) + ": " + err};

  const auto queue = ParseQueueJsonl(ReadFileBytes(dir / "out" / "queue.jsonl"));
  const json report = json::parse(ReadFileBytes(dir / "out" / "report.json"));
  std::map<std::string, const QueueEntry*> by_id;
  for (const QueueEntry& e : queue) by_id[e.pair_id] = &e;
  std::size_t found = 0, above = 0;
  for (const auto& [s, r] : leak.planted) {
    auto it = by_id.find(MakePairId(s, r));
    if (it == by_id.end()) continue;
    ++found;
    above += it->second->above_threshold ? 1 : 0;
  }
  double planted_min = 2.0, planted_sum = 0.0;
  for (double g : leak.benchmark.genuine) {
    planted_min = std::min(planted_min, g);
    planted_sum += g;
  }
  const NearestMatches nearest = FindNearestMatches(leak.synthetic, leak.gallery);
  double background_max = -2.0;
  for (std::size_t i = 0; i < 5000; ++i) background_max = std::max(background_max, nearest.rows[i].score);

  const double threshold = report["far_threshold"]["threshold"].get<double>();
  const double target_far = report["far_threshold"]["target_far"].get<double>();
  Outcome o;
  o.pass = queue.size() == 100 && found == 50 && above == 50 && target_far == 1e-4 &&
           seconds < 120.0;
  o.detail = std::to_string(found) + "/50 planted pairs in the k=100 queue, " +
             std::to_string(above) + "/50 above the FAR " + Format("%g", target_far) +
             " threshold " + Format("%.4f", threshold) + "; planted cosine min " +
             Format("%.3f", planted_min) + " mean " + Format("%.3f", planted_sum / 50.0) +
             ", background max " + Format("%.3f", background_max) + "; " +
             Format("%.1f s", seconds) + " (limit 120 s)";
  return o;
}

std::vector<double> RandomImpostors(std::mt19937_64& rng) {
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  const std::size_t n = std::max<std::size_t>(1, static_cast<std::size_t>(std::exp(u * std::log(50000.0))));
  std::vector<double> scores(n);
  std::normal_distribution<double> gauss(0.0, 0.05);
  switch (rng() % 4) {
    case 0:  // continuous
      for (double& x : scores) x = gauss(rng);
      break;
    case 1:  // coarse grid: heavy ties
      for (double& x : scores) x = std::round(gauss(rng) * 40.0) / 40.0;
      break;
    case 2:  // few distinct values
      for (double& x : scores) x = 0.1 * static_cast<double>(rng() % 3);
      break;
    default:  // uniform over [-1, 1]
      for (double& x : scores) x = std::uniform_real_distribution<double>(-1.0, 1.0)(rng);
  }
  return scores;
}

Outcome FarGuarantee() {
  std::mt19937_64 rng(777);
  std::size_t checks = 0, violations = 0, threshold_mismatch = 0;
  for (int set = 0; set < 1000; ++set) {
    BenchmarkScores scores;
    scores.impostor = RandomImpostors(rng);
    const std::uint64_t n = scores.impostor.size();
    for (double far : {1e-4, 1e-2, 0.2}) {
      const FarThreshold t = DeriveFarThreshold(scores, far);
      const std::uint64_t above = testing::OracleCountAbove(scores.impostor, t.threshold);
      const double recomputed = static_cast<double>(above) / static_cast<double>(n);
      if (!(recomputed <= far) || !(t.achieved_far <= far) ||
          above > testing::OracleMaxFalseAccepts(far, n)) {
        ++violations;
      }
      if (t.threshold != testing::OracleFarThreshold(scores.impostor, far)) ++threshold_mismatch;
      ++checks;
    }
  }

  // Worked examples.
  BenchmarkScores ten;
  ten.impostor = {1.0, 0.9, 0.8, 0.7, 0.6, 0.5, 0.4, 0.3, 0.2, 0.1};
  BenchmarkScores tied;
  tied.impostor = {0.5, 0.5, 0.5, 0.1};
  const FarThreshold a = DeriveFarThreshold(ten, 0.2);
  const FarThreshold b = DeriveFarThreshold(ten, 0.05);
  const FarThreshold c = DeriveFarThreshold(tied, 0.5);
  const bool examples_ok = a.threshold == 0.8 && a.achieved_far == 0.2 && b.threshold == 1.0 &&
                           b.achieved_far == 0.0 && c.threshold == 0.5 && c.achieved_far == 0.0;
  Outcome o;
  o.pass = violations == 0 && threshold_mismatch == 0 && examples_ok;
  o.detail = std::to_string(checks) + " (set, target) checks over 1000 impostor sets: " +
             std::to_string(violations) + " violations, " + std::to_string(threshold_mismatch) +
             " threshold mismatches; worked examples " + (examples_ok ? "exact" : "WRONG") +
             " (0.8/0.2, 1.0/0.0, 0.5/0.0)";
  return o;
}

Outcome Performance() {
  const EmbeddingSet s = RandomUnitSet("s", 50000, 512, 9001);
  const EmbeddingSet r = RandomUnitSet("r", 50000, 512, 9002);
  const std::size_t k = kDefaultTopK;
  auto t0 = Clock::now();
  const TopKResult blocked = TopKPairs(s, r, k);
  const double blocked_s = SecondsSince(t0);
  t0 = Clock::now();
  const TopKResult naive = NaiveTopKPairs(s, r, k);
  const double naive_s = SecondsSince(t0);
  if (blocked != naive) return {false, "blocked and naive results differ"};
  const double speedup = naive_s / blocked_s;
  Outcome o;
  o.pass = speedup >= 10.0;
  o.detail = "50000x50000 dim 512 k " + std::to_string(k) + ": results identical; naive " +
             Format("%.1f s", naive_s) + ", blocked " + Format("%.1f s", blocked_s) +
             ", speedup " + Format("%.2fx", speedup) + " (floor 10x)";
  return o;
}

Outcome DefaultsFidelity() {
  testing::TempDir dir;
  const testing::AuditFiles files = testing::WriteRandomAuditInputs(dir.path(), 40, 60, 16, 31);
  std::string err;
  const int code = RunCli({"audit", "--registry", files.registry.string(), "--benchmark",
                           files.benchmark.string(), "--synthetic", files.synthetic_id, "--real",
                           files.real_id, "--out", (dir / "out").string()},
                          &err);
  if (code != 0) return {false, "audit exited " + std::to_string(code) + ": " + err};
  const json report = json::parse(ReadFileBytes(dir / "out" / "report.json"));
  const auto k = report["config"]["k"].get<std::uint64_t>();
  const double far = report["config"]["target_far"].get<double>();
  const double far_used = report["far_threshold"]["target_far"].get<double>();
  Outcome o;
  o.pass = k == 1500 && far == 1e-4 && far_used == 1e-4;
  o.detail = "report config k=" + std::to_string(k) + ", target_far=" + Format("%g", far) +
             " (threshold derived at " + Format("%g", far_used) + ")";
  return o;
}

Outcome Consensus() {
  auto leaked_count = [](std::size_t required, std::vector<std::pair<std::string, Label>> votes) {
    std::vector<ReviewRecord> records;
    for (std::size_t i = 0; i < votes.size(); ++i) {
      records.push_back({i + 1, "s0-r0", votes[i].first, votes[i].second,
                         "2026-01-01T00:00:0" + std::to_string(i) + "Z", std::nullopt});
    }
    return FinalizeReport(testing::QueueOnlyReport(1, required), records).review;
  };
  const ReviewSummary unanimous =
      leaked_count(2, {{"a", Label::kLeaked}, {"b", Label::kLeaked}});
  const ReviewSummary mixed = leaked_count(2, {{"a", Label::kLeaked}, {"b", Label::kChild}});
  const ReviewSummary single = leaked_count(2, {{"a", Label::kLeaked}});
  const bool ok = unanimous.consensus_leaked_count == 1 && mixed.consensus_leaked_count == 0 &&
                  mixed.tallies.at(Label::kChild) == 1 && single.consensus_leaked_count == 0;
  Outcome o;
  o.pass = ok;
  o.detail = "[leaked, leaked] rr=2 -> " + std::to_string(unanimous.consensus_leaked_count) +
             " (want 1); [leaked, child] rr=2 -> " + std::to_string(mixed.consensus_leaked_count) +
             " with child tally " + std::to_string(mixed.tallies.at(Label::kChild)) +
             " (want 0, 1); [leaked] rr=2 -> " + std::to_string(single.consensus_leaked_count) +
             " (want 0)";
  return o;
}

const std::vector<std::pair<std::string, std::function<Outcome()>>>& Criteria() {
  static const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"oracle_equivalence", OracleEquivalence},
      {"determinism", Determinism},
      {"planted_leak", PlantedLeakEndToEnd},
      {"far_guarantee", FarGuarantee},
      {"performance", Performance},
      {"defaults_fidelity", DefaultsFidelity},
      {"consensus", Consensus},
  };
  return criteria;
}

}  // namespace
}  // namespace leakcheck::acceptance

int main(int argc, char** argv) {
  using leakcheck::acceptance::Criteria;
  std::vector<std::string> selected(argv + 1, argv + argc);
  if (selected.size() == 1 && selected[0] == "--list") {
    for (const auto& [name, fn] : Criteria()) std::cout << name << "\n";
    return 0;
  }
  std::set<std::string> known;
  for (const auto& [name, fn] : Criteria()) known.insert(name);
  for (const std::string& name : selected) {
    if (!known.contains(name)) {
      std::cerr << "acceptance: unknown criterion '" << name << "' (try --list)\n";
      return 2;
    }
  }
  int failures = 0;
  for (const auto& [name, fn] : Criteria()) {
    if (!selected.empty() && std::find(selected.begin(), selected.end(), name) == selected.end()) {
      continue;
    }
    leakcheck::acceptance::Outcome outcome;
    const auto start = leakcheck::acceptance::Clock::now();
    try {
      outcome = fn();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = leakcheck::acceptance::SecondsSince(start);
    std::cout << (outcome.pass ? "PASS " : "FAIL ") << name << ": " << outcome.detail << " ["
              << leakcheck::acceptance::Format("%.1f s", seconds) << "]" << std::endl;
    failures += outcome.pass ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
