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

#include "leakcheck/audit.h"

#include <algorithm>
#include <map>
#include <set>
#include <system_error>
#include <utility>

#include "json.hpp"
#include "leakcheck/embedding_io.h"
#include "leakcheck/error.h"
#include "leakcheck/file_util.h"
#include "leakcheck/registry.h"

namespace leakcheck {
using nlohmann::json;

namespace fs = std::filesystem;

std::string_view DedupModeName(DedupMode mode) {
  return mode == DedupMode::kUniqueReal ? "unique_real" : "all_pairs";
}

DedupMode ParseDedupMode(std::string_view name) {
  if (name == "all_pairs") return DedupMode::kAllPairs;
  if (name == "unique_real") return DedupMode::kUniqueReal;
  throw Error(ErrorCode::kInvalidArgument,
              "unknown dedup mode '" + std::string(name) + "' (expected all_pairs or unique_real)");
}

void AuditConfig::Validate() const {
  if (synthetic_id.empty() || real_id.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "synthetic_id and real_id are required");
  }
  if (k < 1) throw Error(ErrorCode::kInvalidArgument, "k must be at least 1");
  if (!(target_far > 0.0 && target_far < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "target_far must lie in (0, 1)");
  }
  if (required_reviewers < 1) {
    throw Error(ErrorCode::kInvalidArgument, "required_reviewers must be at least 1");
  }
  if (!(histogram.lo < histogram.hi) || histogram.bins == 0) {
    throw Error(ErrorCode::kInvalidRange, "histogram needs lo < hi and bins >= 1");
  }
}

std::string MakePairId(std::uint64_t synth_index, std::uint64_t real_index) {
  return "s" + std::to_string(synth_index) + "-r" + std::to_string(real_index);
}

namespace {

json ConfigToJson(const AuditConfig& c) {
  return {{"synthetic_id", c.synthetic_id},
          {"real_id", c.real_id},
          {"k", c.k},
          {"target_far", c.target_far},
          {"dedup_mode", std::string(DedupModeName(c.dedup_mode))},
          {"histogram", {{"lo", c.histogram.lo}, {"hi", c.histogram.hi}, {"bins", c.histogram.bins}}},
          {"required_reviewers", c.required_reviewers}};
}

AuditConfig ConfigFromJson(const json& j) {
  AuditConfig c;
  c.synthetic_id = j.at("synthetic_id").get<std::string>();
  c.real_id = j.at("real_id").get<std::string>();
  c.k = j.at("k").get<std::size_t>();
  c.target_far = j.at("target_far").get<double>();
  c.dedup_mode = ParseDedupMode(j.at("dedup_mode").get<std::string>());
  const json& h = j.at("histogram");
  c.histogram = {h.at("lo").get<double>(), h.at("hi").get<double>(), h.at("bins").get<std::size_t>()};
  c.required_reviewers = j.at("required_reviewers").get<std::size_t>();
  return c;
}

json QueueEntryToJson(const QueueEntry& e) {
  return {{"pair_id", e.pair_id},         {"rank", e.rank},
          {"synth_index", e.synth_index}, {"real_index", e.real_index},
          {"score", e.score},             {"synth_path", e.synth_path},
          {"real_path", e.real_path},     {"above_threshold", e.above_threshold}};
}

QueueEntry QueueEntryFromJson(const json& j) {
  QueueEntry e;
  e.pair_id = j.at("pair_id").get<std::string>();
  e.rank = j.at("rank").get<std::size_t>();
  e.synth_index = j.at("synth_index").get<std::uint64_t>();
  e.real_index = j.at("real_index").get<std::uint64_t>();
  e.score = j.at("score").get<double>();
  e.synth_path = j.at("synth_path").get<std::string>();
  e.real_path = j.at("real_path").get<std::string>();
  e.above_threshold = j.at("above_threshold").get<bool>();
  return e;
}

ScoreSummary Summarize(const NearestMatches& matches) {
  ScoreSummary s;
  if (matches.rows.empty()) return s;
  s.min = s.max = matches.rows.front().score;
  double sum = 0.0;
  for (const NearestMatch& m : matches.rows) {
    s.min = std::min(s.min, m.score);
    s.max = std::max(s.max, m.score);
    sum += m.score;
  }
  s.mean = sum / static_cast<double>(matches.rows.size());
  return s;
}

InputFile Digest(std::string role, const fs::path& path) {
  return {std::move(role), path.string(), Sha256HexOfFile(path)};
}

std::string ComputeReportId(const AuditConfig& config, const std::vector<InputFile>& inputs) {
  std::string material = ConfigToJson(config).dump();
  for (const InputFile& f : inputs) material += "\n" + f.role + ":" + f.sha256;
  return Sha256Hex(material);
}

std::vector<HistogramMarker> MarkersFor(const AuditReport& report) {
  std::vector<HistogramMarker> markers;
  if (!report.queue.empty()) {
    markers.push_back({"top_score", report.queue.front().score});
    markers.push_back({"topk_cutoff", report.queue.back().score});
  }
  return markers;
}

const QueueEntry* FindEntry(const std::vector<QueueEntry>& queue, const std::string& pair_id) {
  for (const QueueEntry& e : queue) {
    if (e.pair_id == pair_id) return &e;
  }
  return nullptr;
}

}  // namespace

AuditReport ComputeAudit(const AuditConfig& config, const AuditInputs& inputs,
                         const AuditRunOptions& options) {
  config.Validate();
  const DatasetRegistry registry = DatasetRegistry::Load(inputs.registry);
  const DatasetRegistryEntry& synth_entry = registry.Get(config.synthetic_id);
  const DatasetRegistryEntry& real_entry = registry.Get(config.real_id);
  const fs::path synth_path = registry.EmbeddingsPath(synth_entry);
  const fs::path real_path = registry.EmbeddingsPath(real_entry);

  const EmbeddingSet synthetic = ReadEmbeddingSet(synth_path, config.synthetic_id);
  const EmbeddingSet real = ReadEmbeddingSet(real_path, config.real_id);
  const BenchmarkScores benchmark = LoadBenchmarkScores(inputs.benchmark);

  AuditReport report;
  report.config = config;
  report.inputs = {Digest("registry", inputs.registry),
                   Digest("synthetic_embeddings", synth_path),
                   Digest("synthetic_manifest", ManifestPathFor(synth_path)),
                   Digest("real_embeddings", real_path),
                   Digest("real_manifest", ManifestPathFor(real_path)),
                   Digest("benchmark_scores", inputs.benchmark)};
  report.report_id = ComputeReportId(config, report.inputs);
  report.created_at = options.created_at ? *options.created_at : UtcTimestampNow();
  report.synthetic_count = synthetic.count();
  report.real_count = real.count();
  report.dim = synthetic.dim();

  report.far = DeriveFarThreshold(benchmark, config.target_far);

  const NearestMatches nearest = FindNearestMatches(synthetic, real, options.engine);
  report.above_threshold_fraction = AboveThresholdFraction(nearest, report.far.threshold);
  report.nearest_scores = Summarize(nearest);
  std::vector<double> nearest_scores;
  nearest_scores.reserve(nearest.rows.size());
  for (const NearestMatch& m : nearest.rows) nearest_scores.push_back(m.score);
  report.histogram = BuildHistogram(nearest_scores, config.histogram.lo, config.histogram.hi,
                                    config.histogram.bins);

  const TopKResult top = config.dedup_mode == DedupMode::kUniqueReal
                             ? UniqueRealTopK(synthetic, real, config.k, options.engine)
                             : TopKPairs(synthetic, real, config.k, options.engine);
  report.queue.reserve(top.pairs.size());
  for (std::size_t i = 0; i < top.pairs.size(); ++i) {
    const ScoredPair& p = top.pairs[i];
    QueueEntry e;
    e.pair_id = MakePairId(p.synth_index, p.real_index);
    e.rank = i + 1;
    e.synth_index = p.synth_index;
    e.real_index = p.real_index;
    e.score = p.score;
    e.synth_path = synthetic.manifest()[p.synth_index].image_path;
    e.real_path = real.manifest()[p.real_index].image_path;
    e.above_threshold = p.score > report.far.threshold;
    report.queue.push_back(std::move(e));
  }
  return report;
}

void WriteAuditOutputs(const AuditReport& report, const fs::path& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) {
    throw Error(ErrorCode::kIoFailure,
                "cannot create output directory " + out_dir.string() + ": " + ec.message());
  }
  const std::vector<HistogramMarker> markers = MarkersFor(report);
  const std::vector<std::pair<fs::path, std::string>> files = {
      {out_dir / kQueueFile, EncodeQueueJsonl(report.queue)},
      {out_dir / kHistogramCsvFile, EncodeHistogramCsv(report.histogram)},
      {out_dir / kHistogramSidecarFile,
       EncodeHistogramSidecar(report.histogram, &report.far, markers)},
      {out_dir / kReportFile, EncodeAuditReport(report)},
  };
  std::vector<fs::path> written;
  try {
    for (const auto& [path, contents] : files) {
      WriteFileAtomic(path, contents);
      written.push_back(path);
    }
  } catch (...) {
    RemoveQuietly(written);
    throw;
  }
}

AuditReport RunAudit(const AuditConfig& config, const AuditInputs& inputs, const fs::path& out_dir,
                     const AuditRunOptions& options) {
  AuditReport report = ComputeAudit(config, inputs, options);
  WriteAuditOutputs(report, out_dir);
  return report;
}

AuditReport FinalizeReport(const AuditReport& report, std::span<const ReviewRecord> labels) {
  std::map<std::string, std::size_t> rank_of;
  for (const QueueEntry& e : report.queue) rank_of.emplace(e.pair_id, e.rank);

  ReviewSummary summary = EmptyReviewSummary();
  summary.finalized = true;
  summary.label_count = labels.size();

  // (pair, reviewer) -> effective record
  std::map<std::pair<std::string, std::string>, const ReviewRecord*> effective;
  for (const ReviewRecord& r : labels) {
    if (!rank_of.contains(r.pair_id)) {
      throw Error(ErrorCode::kUnknownPair, "label for unknown pair '" + r.pair_id + "'");
    }
    auto [it, inserted] = effective.try_emplace({r.pair_id, r.reviewer_id}, &r);
    if (!inserted) {
      summary.supersessions.push_back({it->second->record_id, r.record_id, r.pair_id, r.reviewer_id});
      it->second = &r;
    }
  }

  struct PairVotes {
    std::vector<std::string> reviewers;
    bool all_leaked = true;
  };
  std::map<std::string, PairVotes> votes;
  for (const auto& [key, record] : effective) {
    ++summary.tallies[record->label];
    PairVotes& v = votes[key.first];
    v.reviewers.push_back(key.second);
    v.all_leaked = v.all_leaked && record->label == Label::kLeaked;
  }
  summary.reviewed_pairs = votes.size();

  std::vector<std::pair<std::size_t, std::pair<std::string, std::vector<std::string>>>> leaked;
  for (auto& [pair_id, v] : votes) {
    if (v.all_leaked && v.reviewers.size() >= report.config.required_reviewers) {
      leaked.push_back({rank_of[pair_id], {pair_id, std::move(v.reviewers)}});
    }
  }
  std::sort(leaked.begin(), leaked.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  for (auto& [rank, entry] : leaked) summary.leaked_pairs.push_back(std::move(entry));
  summary.consensus_leaked_count = summary.leaked_pairs.size();

  AuditReport out = report;
  out.review = std::move(summary);
  return out;
}

std::string EncodeQueueJsonl(std::span<const QueueEntry> queue) {
  std::string out;
  for (const QueueEntry& e : queue) {
    out += QueueEntryToJson(e).dump();
    out += '\n';
  }
  return out;
}

std::vector<QueueEntry> ParseQueueJsonl(std::string_view text) {
  std::vector<QueueEntry> queue;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const std::size_t nl = text.find('\n');
    const std::string_view line = text.substr(0, nl);
    ++line_no;
    if (!line.empty() && line != "\r") {
      try {
        queue.push_back(QueueEntryFromJson(json::parse(line)));
      } catch (const json::exception& e) {
        throw Error(ErrorCode::kParseFailure,
                    "queue line " + std::to_string(line_no) + ": " + e.what());
      }
    }
    if (nl == std::string_view::npos) break;
    text.remove_prefix(nl + 1);
  }
  return queue;
}

std::string EncodeAuditReport(const AuditReport& report) {
  json inputs = json::array();
  for (const InputFile& f : report.inputs) {
    inputs.push_back({{"role", f.role}, {"path", f.path}, {"sha256", f.sha256}});
  }

  std::size_t above = 0;
  for (const QueueEntry& e : report.queue) above += e.above_threshold ? 1 : 0;
  json queue = {{"file", std::string(kQueueFile)},
                {"entries", report.queue.size()},
                {"above_threshold", above}};
  if (!report.queue.empty()) {
    queue["top_score"] = report.queue.front().score;
    queue["cutoff_score"] = report.queue.back().score;
  }

  const Histogram& h = report.histogram;
  json histogram = {{"csv", std::string(kHistogramCsvFile)},
                    {"sidecar", std::string(kHistogramSidecarFile)},
                    {"lo", h.lo},
                    {"hi", h.hi},
                    {"bins", h.bins},
                    {"counts", h.counts},
                    {"underflow", h.underflow},
                    {"overflow", h.overflow}};

  const ReviewSummary& r = report.review;
  json tallies = json::object();
  for (Label label : kAllLabels) {
    auto it = r.tallies.find(label);
    tallies[std::string(LabelName(label))] = it == r.tallies.end() ? 0 : it->second;
  }
  json leaked = json::array();
  for (const auto& [pair_id, reviewers] : r.leaked_pairs) {
    json item = {{"pair_id", pair_id}, {"reviewers", reviewers}};
    if (const QueueEntry* e = FindEntry(report.queue, pair_id)) {
      item["rank"] = e->rank;
      item["synth_index"] = e->synth_index;
      item["real_index"] = e->real_index;
      item["score"] = e->score;
      item["synth_path"] = e->synth_path;
      item["real_path"] = e->real_path;
    }
    leaked.push_back(std::move(item));
  }
  json supersessions = json::array();
  for (const Supersession& s : r.supersessions) {
    supersessions.push_back({{"superseded", s.superseded},
                             {"by", s.by},
                             {"pair_id", s.pair_id},
                             {"reviewer_id", s.reviewer_id}});
  }
  json review = {{"status", r.finalized ? "finalized" : "pending"},
                 {"label_count", r.label_count},
                 {"tallies", tallies},
                 {"reviewed_pairs", r.reviewed_pairs},
                 {"consensus_leaked_count", r.consensus_leaked_count},
                 {"leaked_pairs", leaked},
                 {"supersessions", supersessions}};

  json doc = {{"schema_version", report.schema_version},
              {"report_id", report.report_id},
              {"created_at", report.created_at},
              {"config", ConfigToJson(report.config)},
              {"inputs", inputs},
              {"counts", {{"synthetic", report.synthetic_count},
                          {"real", report.real_count},
                          {"dim", report.dim}}},
              {"far_threshold", {{"target_far", report.far.target_far},
                                 {"threshold", report.far.threshold},
                                 {"achieved_far", report.far.achieved_far},
                                 {"impostor_count", report.far.impostor_count}}},
              {"nearest", {{"above_threshold_fraction", report.above_threshold_fraction},
                           {"min", report.nearest_scores.min},
                           {"max", report.nearest_scores.max},
                           {"mean", report.nearest_scores.mean}}},
              {"histogram", histogram},
              {"queue", queue},
              {"review", review}};
  return doc.dump(2) + "\n";
}

AuditReport DecodeAuditReport(std::string_view json_text, std::vector<QueueEntry> queue) {
  AuditReport report;
  try {
    const json doc = json::parse(json_text);
    report.schema_version = doc.at("schema_version").get<int>();
    if (report.schema_version != 1) {
      throw Error(ErrorCode::kUnsupportedVersion,
                  "report schema_version " + std::to_string(report.schema_version));
    }
    report.report_id = doc.at("report_id").get<std::string>();
    report.created_at = doc.at("created_at").get<std::string>();
    report.config = ConfigFromJson(doc.at("config"));
    for (const json& f : doc.at("inputs")) {
      report.inputs.push_back({f.at("role").get<std::string>(), f.at("path").get<std::string>(),
                               f.at("sha256").get<std::string>()});
    }
    const json& counts = doc.at("counts");
    report.synthetic_count = counts.at("synthetic").get<std::uint64_t>();
    report.real_count = counts.at("real").get<std::uint64_t>();
    report.dim = counts.at("dim").get<std::size_t>();
    const json& far = doc.at("far_threshold");
    report.far = {far.at("target_far").get<double>(), far.at("threshold").get<double>(),
                  far.at("achieved_far").get<double>(),
                  far.at("impostor_count").get<std::uint64_t>()};
    const json& nearest = doc.at("nearest");
    report.above_threshold_fraction = nearest.at("above_threshold_fraction").get<double>();
    report.nearest_scores = {nearest.at("min").get<double>(), nearest.at("max").get<double>(),
                             nearest.at("mean").get<double>()};
    const json& h = doc.at("histogram");
    report.histogram.lo = h.at("lo").get<double>();
    report.histogram.hi = h.at("hi").get<double>();
    report.histogram.bins = h.at("bins").get<std::size_t>();
    report.histogram.counts = h.at("counts").get<std::vector<std::uint64_t>>();
    report.histogram.underflow = h.at("underflow").get<std::uint64_t>();
    report.histogram.overflow = h.at("overflow").get<std::uint64_t>();

    if (doc.at("queue").at("entries").get<std::size_t>() != queue.size()) {
      throw Error(ErrorCode::kManifestMismatch, "queue file length disagrees with report");
    }
    report.queue = std::move(queue);

    const json& r = doc.at("review");
    report.review = EmptyReviewSummary();
    report.review.finalized = r.at("status").get<std::string>() == "finalized";
    report.review.label_count = r.at("label_count").get<std::uint64_t>();
    for (Label label : kAllLabels) {
      report.review.tallies[label] = r.at("tallies").at(std::string(LabelName(label))).get<std::uint64_t>();
    }
    report.review.reviewed_pairs = r.at("reviewed_pairs").get<std::uint64_t>();
    report.review.consensus_leaked_count = r.at("consensus_leaked_count").get<std::uint64_t>();
    for (const json& item : r.at("leaked_pairs")) {
      report.review.leaked_pairs.push_back(
          {item.at("pair_id").get<std::string>(),
           item.at("reviewers").get<std::vector<std::string>>()});
    }
    for (const json& s : r.at("supersessions")) {
      report.review.supersessions.push_back(
          {s.at("superseded").get<std::uint64_t>(), s.at("by").get<std::uint64_t>(),
           s.at("pair_id").get<std::string>(), s.at("reviewer_id").get<std::string>()});
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParseFailure, std::string("report: ") + e.what());
  }
  return report;
}

AuditReport LoadAuditReport(const fs::path& audit_dir) {
  const std::string text = ReadFileBytes(audit_dir / kReportFile);
  std::string queue_file(kQueueFile);
  try {
    queue_file = json::parse(text).at("queue").at("file").get<std::string>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParseFailure, std::string("report: ") + e.what());
  }
  if (fs::path(queue_file).has_parent_path()) {
    throw Error(ErrorCode::kParseFailure, "report names a queue file outside its directory");
  }
  return DecodeAuditReport(text, ParseQueueJsonl(ReadFileBytes(audit_dir / queue_file)));
}

}  // namespace leakcheck
