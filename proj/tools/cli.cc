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

#include "cli.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <limits>
#include <optional>
#include <sstream>
#include <string_view>
#include <system_error>

#include "CLI11.hpp"
#include "json.hpp"
#include "leakcheck/audit.h"
#include "leakcheck/calibration.h"
#include "leakcheck/embedding_io.h"
#include "leakcheck/error.h"
#include "leakcheck/extractor.h"
#include "leakcheck/file_util.h"
#include "leakcheck/random_embeddings.h"
#include "leakcheck/reference_engine.h"
#include "leakcheck/registry.h"
#include "leakcheck/result_io.h"
#include "leakcheck/review_server.h"
#include "leakcheck/review_session.h"
#include "leakcheck/similarity_engine.h"
#include "leakcheck/tile_kernel.h"

namespace leakcheck::cli {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct EngineFlags {
  unsigned threads = 0;
  std::size_t query_tile = EngineOptions{}.query_tile;
  std::size_t gallery_tile = EngineOptions{}.gallery_tile;

  void Register(CLI::App* app) {
    app->add_option("--threads", threads, "Worker threads (0 = machine parallelism)")
        ->capture_default_str();
    app->add_option("--query-tile", query_tile, "Synthetic rows per tile")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    app->add_option("--gallery-tile", gallery_tile, "Real rows per tile")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
  }

  EngineOptions Options() const { return {query_tile, gallery_tile, threads}; }
};

std::string Fixed(double value, int precision = 6) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(precision) << value;
  return s.str();
}

std::string General(double value) {
  std::ostringstream s;
  s << std::setprecision(6) << value;
  return s.str();
}

fs::path DataRoot() {
  const char* root = std::getenv("LEAKCHECK_DATA_ROOT");
  return root != nullptr && *root != '\0' ? fs::path(root) : fs::path(".");
}

// ---- ingest ---------------------------------------------------------------

struct IngestFlags {
  fs::path csv;
  fs::path manifest;
  std::string id;
  fs::path out;
  bool no_normalize = false;
  std::optional<fs::path> registry;
  std::string kind = "real";
  std::optional<std::string> generator;
  std::optional<std::string> training_dataset;
  std::optional<fs::path> image_root;
};

void RegisterWithRegistry(const fs::path& registry_path, DatasetRegistryEntry entry) {
  std::vector<DatasetRegistryEntry> entries;
  std::error_code ec;
  if (fs::exists(registry_path, ec)) entries = DatasetRegistry::Load(registry_path).entries();
  const fs::path base = registry_path.parent_path();
  auto relative_to_base = [&](const fs::path& p) {
    if (p.empty() || p.is_absolute()) return p;
    const fs::path rel = fs::relative(fs::absolute(p), fs::absolute(base.empty() ? "." : base), ec);
    return ec || rel.empty() ? fs::absolute(p) : rel;
  };
  entry.embeddings = relative_to_base(entry.embeddings);
  entry.image_root = relative_to_base(entry.image_root);
  auto it = std::find_if(entries.begin(), entries.end(),
                         [&](const auto& e) { return e.dataset_id == entry.dataset_id; });
  if (it != entries.end()) {
    *it = std::move(entry);
  } else {
    entries.push_back(std::move(entry));
  }
  DatasetRegistry::FromEntries(std::move(entries), base).Save(registry_path);
}

int RunIngest(const IngestFlags& f, std::ostream& out) {
  const DatasetKind kind = ParseDatasetKind(f.kind);
  EmbeddingSet set = ImportCsv(f.csv, f.manifest, f.id);
  if (!f.no_normalize) set = Normalize(set);
  WriteEmbeddingSet(set, f.out);
  out << "wrote " << f.out.string() << ": " << set.count() << " x " << set.dim()
      << (set.normalized() ? " (normalized)" : " (raw)") << "\n";
  if (f.registry) {
    DatasetRegistryEntry entry;
    entry.dataset_id = f.id;
    entry.kind = kind;
    entry.generator_name = f.generator;
    entry.training_dataset_id = f.training_dataset;
    entry.embeddings = f.out;
    entry.image_root = f.image_root.value_or(fs::path());
    RegisterWithRegistry(*f.registry, std::move(entry));
    out << "registered " << f.id << " in " << f.registry->string() << "\n";
  }
  return 0;
}

// ---- extract --------------------------------------------------------------

struct ExtractFlags {
  fs::path images;
  fs::path image_root = ".";
  fs::path out;
  std::string id;
  std::size_t dim = 512;
  std::uint64_t seed = 0;
  std::optional<std::string> extractor_cmd;
};

int RunExtract(const ExtractFlags& f, std::ostream& out) {
  EmbeddingSet set;
  if (f.extractor_cmd) {
    set = RunExtractorCommand(*f.extractor_cmd, f.images, f.out, f.id);
  } else {
    set = ExtractToySet(ReadImageList(f.images), f.image_root, f.dim, f.seed, f.id);
    WriteEmbeddingSet(set, f.out);
  }
  out << "wrote " << f.out.string() << ": " << set.count() << " x " << set.dim() << "\n";
  return 0;
}

// ---- search ---------------------------------------------------------------

struct SearchFlags {
  fs::path synthetic;
  fs::path real;
  std::string mode = "all_pairs";
  std::size_t k = kDefaultTopK;
  fs::path out;
  std::optional<fs::path> cache;
  EngineFlags engine;
};

int RunSearch(const SearchFlags& f, std::ostream& out) {
  const EmbeddingSet synthetic = ReadEmbeddingSet(f.synthetic);
  const EmbeddingSet real = ReadEmbeddingSet(f.real);
  EngineStats stats;
  std::string jsonl;
  ResultCache cache;
  std::size_t rows = 0;
  if (f.mode == "nearest") {
    const NearestMatches matches = FindNearestMatches(synthetic, real, f.engine.Options(), &stats);
    jsonl = EncodeNearestJsonl(matches);
    cache = CacheOf(matches);
    rows = matches.rows.size();
  } else {
    const DedupMode mode = ParseDedupMode(f.mode);
    const TopKResult result = mode == DedupMode::kUniqueReal
                                  ? UniqueRealTopK(synthetic, real, f.k, f.engine.Options(), &stats)
                                  : TopKPairs(synthetic, real, f.k, f.engine.Options(), &stats);
    jsonl = EncodePairsJsonl(result.pairs);
    cache = CacheOf(result, mode == DedupMode::kUniqueReal ? ResultKind::kUniqueRealTopK
                                                           : ResultKind::kTopKPairs);
    rows = result.pairs.size();
  }
  std::vector<fs::path> written;
  try {
    WriteFileAtomic(f.out, jsonl);
    written.push_back(f.out);
    if (f.cache) WriteResultCache(cache, *f.cache);
  } catch (...) {
    RemoveQuietly(written);
    throw;
  }
  out << f.mode << ": " << rows << " rows -> " << f.out.string() << " (" << stats.pairs_examined
      << " pairs scored, " << stats.workers_used << " workers, kernel " << TileKernelName()
      << ")\n";
  return 0;
}

// ---- calibrate ------------------------------------------------------------

struct CalibrateFlags {
  fs::path benchmark;
  double far = kDefaultTargetFar;
  std::optional<fs::path> out;
};

int RunCalibrate(const CalibrateFlags& f, std::ostream& out) {
  const BenchmarkScores scores = LoadBenchmarkScores(f.benchmark);
  const FarThreshold t = DeriveFarThreshold(scores, f.far);
  const json doc = {{"source", scores.source_id},
                    {"target_far", t.target_far},
                    {"threshold", t.threshold},
                    {"achieved_far", t.achieved_far},
                    {"impostor_count", t.impostor_count},
                    {"genuine_count", scores.genuine.size()}};
  if (f.out) WriteFileAtomic(*f.out, doc.dump(2) + "\n");
  out << "threshold " << Fixed(t.threshold) << " at target FAR " << General(t.target_far)
      << " (achieved " << General(t.achieved_far) << " over " << t.impostor_count
      << " impostor scores)\n";
  return 0;
}

// ---- hist -----------------------------------------------------------------

struct HistFlags {
  fs::path scores;
  std::string label = "impostor";
  double lo = HistogramParams{}.lo;
  double hi = HistogramParams{}.hi;
  std::size_t bins = HistogramParams{}.bins;
  fs::path out_csv;
  std::optional<fs::path> out_json;
  std::optional<fs::path> benchmark;
  double far = kDefaultTargetFar;
};

std::vector<double> ReadScoreColumn(const fs::path& path, const std::string& label) {
  if (path.extension() == ".csv") {
    const BenchmarkScores b = LoadBenchmarkScores(path);
    std::vector<double> scores;
    if (label == "genuine" || label == "all") {
      scores.insert(scores.end(), b.genuine.begin(), b.genuine.end());
    }
    if (label == "impostor" || label == "all") {
      scores.insert(scores.end(), b.impostor.begin(), b.impostor.end());
    }
    return scores;
  }
  std::vector<double> scores;
  std::istringstream in(ReadFileBytes(path));
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      scores.push_back(json::parse(line).at("score").get<double>());
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kParseFailure,
                  path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return scores;
}

int RunHist(const HistFlags& f, std::ostream& out) {
  const std::vector<double> scores = ReadScoreColumn(f.scores, f.label);
  std::optional<FarThreshold> threshold;
  if (f.benchmark) threshold = DeriveFarThreshold(LoadBenchmarkScores(*f.benchmark), f.far);
  const Histogram h = BuildHistogram(scores, f.lo, f.hi, f.bins);
  const fs::path sidecar = f.out_json.value_or(fs::path(f.out_csv).replace_extension(".json"));
  std::vector<fs::path> written;
  try {
    WriteFileAtomic(f.out_csv, EncodeHistogramCsv(h));
    written.push_back(f.out_csv);
    WriteFileAtomic(sidecar, EncodeHistogramSidecar(h, threshold ? &*threshold : nullptr, {}));
  } catch (...) {
    RemoveQuietly(written);
    throw;
  }
  out << "histogram of " << h.Total() << " scores (" << h.underflow << " below, " << h.overflow
      << " above range) -> " << f.out_csv.string() << ", " << sidecar.string() << "\n";
  return 0;
}

// ---- audit ----------------------------------------------------------------

struct AuditFlags {
  fs::path registry;
  fs::path benchmark;
  std::string synthetic;
  std::string real;
  fs::path out;
  std::size_t k = kDefaultTopK;
  double far = kDefaultTargetFar;
  std::string dedup = "all_pairs";
  double hist_lo = HistogramParams{}.lo;
  double hist_hi = HistogramParams{}.hi;
  std::size_t hist_bins = HistogramParams{}.bins;
  std::size_t required_reviewers = 1;
  EngineFlags engine;
};

void PrintAuditSummary(const AuditReport& r, const fs::path& dir, std::ostream& out) {
  std::size_t above = 0;
  for (const QueueEntry& e : r.queue) above += e.above_threshold ? 1 : 0;
  out << "report " << r.report_id.substr(0, 16) << " -> " << (dir / kReportFile).string() << "\n"
      << "  synthetic " << r.config.synthetic_id << ": " << r.synthetic_count << " rows; real "
      << r.config.real_id << ": " << r.real_count << " rows; dim " << r.dim << "\n"
      << "  threshold " << Fixed(r.far.threshold) << " at FAR " << General(r.far.target_far)
      << " (achieved " << General(r.far.achieved_far) << ", " << r.far.impostor_count
      << " impostor scores)\n"
      << "  nearest matches above threshold: " << Fixed(100.0 * r.above_threshold_fraction, 2)
      << "%\n"
      << "  queue: " << r.queue.size() << " pairs (" << DedupModeName(r.config.dedup_mode)
      << "), " << above << " above threshold\n"
      << "  top scores:";
  const std::size_t shown = std::min<std::size_t>(5, r.queue.size());
  for (std::size_t i = 0; i < shown; ++i) {
    out << (i == 0 ? " " : ", ") << r.queue[i].pair_id << "=" << Fixed(r.queue[i].score);
  }
  out << "\n";
}

int RunAuditCommand(const AuditFlags& f, std::ostream& out) {
  AuditConfig config;
  config.synthetic_id = f.synthetic;
  config.real_id = f.real;
  config.k = f.k;
  config.target_far = f.far;
  config.dedup_mode = ParseDedupMode(f.dedup);
  config.histogram = {f.hist_lo, f.hist_hi, f.hist_bins};
  config.required_reviewers = f.required_reviewers;
  AuditRunOptions options;
  options.engine = f.engine.Options();
  const AuditReport report = RunAudit(config, {f.registry, f.benchmark}, f.out, options);
  PrintAuditSummary(report, f.out, out);
  return 0;
}

// ---- report ---------------------------------------------------------------

struct ReportFlags {
  fs::path audit_dir;
  std::optional<fs::path> labels;
  std::optional<fs::path> out;
};

int RunReport(const ReportFlags& f, std::ostream& out) {
  const AuditReport report = LoadAuditReport(f.audit_dir);
  const fs::path log = f.labels.value_or(f.audit_dir / kLabelLogFile);
  std::vector<ReviewRecord> labels;
  std::error_code ec;
  if (f.labels || fs::exists(log, ec)) labels = ParseLabelLog(ReadFileBytes(log));
  const AuditReport final_report = FinalizeReport(report, labels);
  const fs::path dest = f.out.value_or(f.audit_dir / kFinalReportFile);
  WriteFileAtomic(dest, EncodeAuditReport(final_report));
  const ReviewSummary& s = final_report.review;
  out << "finalized " << s.label_count << " labels over " << s.reviewed_pairs << " pairs -> "
      << dest.string() << "\n  tallies:";
  for (Label label : kAllLabels) out << " " << LabelName(label) << "=" << s.tallies.at(label);
  out << "\n  consensus leaked pairs: " << s.consensus_leaked_count << " (required reviewers "
      << final_report.config.required_reviewers << ")\n";
  return 0;
}

// ---- serve ----------------------------------------------------------------

struct ServeFlags {
  std::optional<fs::path> audit_dir;
  std::optional<fs::path> registry;
  std::optional<fs::path> labels;
  std::optional<fs::path> static_dir;
  std::string listen = "127.0.0.1:8080";
};

std::atomic<ReviewServer*> g_server{nullptr};

extern "C" void StopServerOnSignal(int) {
  if (ReviewServer* server = g_server.load()) server->Stop();
}

int RunServe(const ServeFlags& f, std::ostream& out, std::ostream& err) {
  const fs::path root = DataRoot();
  const fs::path audit_dir = f.audit_dir.value_or(root);
  const fs::path registry_path = f.registry.value_or(root / "registry.json");

  ReviewSession session;
  session.Open(audit_dir, f.labels);

  ServerOptions options;
  std::tie(options.host, options.port) = ParseListenAddress(f.listen);
  options.static_dir = f.static_dir;
  std::error_code ec;
  if (fs::exists(registry_path, ec)) {
    const DatasetRegistry registry = DatasetRegistry::Load(registry_path);
    for (const std::string& id : {session.synthetic_id(), session.real_id()}) {
      const DatasetRegistryEntry* entry = registry.Find(id);
      if (entry != nullptr && !entry->image_root.empty()) {
        options.image_roots[id] = registry.ImageRoot(*entry);
      }
    }
  } else {
    err << "leakcheck: warning: no registry at " << registry_path.string()
        << "; images will not be served\n";
  }

  ReviewServer server(session, options);
  const int port = server.Bind();
  out << "serving " << audit_dir.string() << " on http://" << options.host << ":" << port << "\n"
      << std::flush;
  g_server.store(&server);
  auto previous_int = std::signal(SIGINT, StopServerOnSignal);
  auto previous_term = std::signal(SIGTERM, StopServerOnSignal);
  server.Run();
  std::signal(SIGINT, previous_int);
  std::signal(SIGTERM, previous_term);
  g_server.store(nullptr);
  return 0;
}

// ---- bench ----------------------------------------------------------------

struct BenchFlags {
  std::size_t synthetic = 10000;
  std::size_t real = 10000;
  std::size_t dim = 512;
  std::size_t k = kDefaultTopK;
  std::uint64_t seed = 42;
  EngineFlags engine;
};

void CheckBenchSizes(const BenchFlags& f) {
  if (f.synthetic == 0 || f.real == 0 || f.dim == 0) {
    throw Error(ErrorCode::kInvalidArgument, "bench needs nonzero --synthetic, --real and --dim");
  }
  if (f.k == 0) throw Error(ErrorCode::kInvalidArgument, "k must be at least 1");
  std::size_t pairs = 0;
  std::size_t synth_floats = 0;
  std::size_t real_floats = 0;
  if (__builtin_mul_overflow(f.synthetic, f.real, &pairs) ||
      __builtin_mul_overflow(f.synthetic, f.dim, &synth_floats) ||
      __builtin_mul_overflow(f.real, f.dim, &real_floats) ||
      synth_floats > std::numeric_limits<std::size_t>::max() / sizeof(float) ||
      real_floats > std::numeric_limits<std::size_t>::max() / sizeof(float) ||
      f.synthetic > std::numeric_limits<std::uint32_t>::max() ||
      f.real > std::numeric_limits<std::uint32_t>::max()) {
    throw Error(ErrorCode::kSizeOverflow, "bench sizes overflow the addressable range");
  }
}

template <typename F>
double SecondsOf(F&& f) {
  const auto start = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

int RunBench(const BenchFlags& f, std::ostream& out) {
  CheckBenchSizes(f);
  const EmbeddingSet synthetic = RandomUnitSet("bench_synthetic", f.synthetic, f.dim, f.seed);
  const EmbeddingSet real = RandomUnitSet("bench_real", f.real, f.dim, f.seed + 1);
  const double pairs = static_cast<double>(f.synthetic) * static_cast<double>(f.real);

  TopKResult blocked;
  EngineStats stats;
  const double blocked_s =
      SecondsOf([&] { blocked = TopKPairs(synthetic, real, f.k, f.engine.Options(), &stats); });
  TopKResult naive;
  const double naive_s = SecondsOf([&] { naive = NaiveTopKPairs(synthetic, real, f.k); });
  if (!(blocked == naive)) {
    throw Error(ErrorCode::kInternal, "blocked and naive top-k results differ");
  }
  out << "bench synthetic=" << f.synthetic << " real=" << f.real << " dim=" << f.dim
      << " k=" << f.k << " seed=" << f.seed << " kernel=" << TileKernelName()
      << " workers=" << stats.workers_used << "\n"
      << "  naive:   " << Fixed(naive_s, 3) << " s, " << General(pairs / naive_s) << " pairs/s\n"
      << "  blocked: " << Fixed(blocked_s, 3) << " s, " << General(pairs / blocked_s)
      << " pairs/s\n"
      << "  speedup: " << Fixed(naive_s / blocked_s, 2) << "x\n"
      << "  results: identical, digest " << Sha256Hex(EncodePairsJsonl(blocked.pairs)) << "\n";
  return 0;
}

int ReportError(const Error& e, std::ostream& err) {
  err << "leakcheck: " << ErrorCodeName(e.code()) << ": " << e.what() << "\n";
  return static_cast<int>(ExitCodeFor(e.code()));
}

bool HasFlag(const std::vector<std::string>& args, const std::string& flag) {
  return std::any_of(args.begin(), args.end(), [&](const std::string& a) {
    return a == flag || a.rfind(flag + "=", 0) == 0;
  });
}

// `audit --config FILE`: appends "--key value" for every key in FILE that is
// not already given on the command line. Keys may use '-' or '_'.
std::vector<std::string> ExpandAuditConfig(std::vector<std::string> args) {
  if (args.empty() || args.front() != "audit") return args;
  std::string path;
  for (std::size_t i = 1; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty()) return args;
  if (!fs::is_regular_file(path)) throw Error(ErrorCode::kNotFound, "no such config file: " + path);
  std::vector<CLI::ConfigItem> items;
  try {
    items = CLI::ConfigTOML().from_file(path);
  } catch (const CLI::Error& e) {
    throw Error(ErrorCode::kParseFailure, path + ": " + e.what());
  }
  std::vector<std::string> extra;
  for (const CLI::ConfigItem& item : items) {
    if (item.name == "++" || item.name == "--") continue;  // section markers
    if (!item.parents.empty() && !(item.parents.size() == 1 && item.parents[0] == "audit")) {
      throw Error(ErrorCode::kParseFailure, path + ": unexpected section for key " + item.name);
    }
    std::string name = item.name;
    std::replace(name.begin(), name.end(), '_', '-');
    if (name == "config" || HasFlag(args, "--" + name)) continue;
    extra.push_back("--" + name);
    extra.insert(extra.end(), item.inputs.begin(), item.inputs.end());
  }
  args.insert(args.end(), extra.begin(), extra.end());
  return args;
}

}  // namespace

int RunCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Cross-dataset identity leakage audit for synthetic face datasets", "leakcheck"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "leakcheck 0.1.0");

  IngestFlags ingest;
  CLI::App* ingest_cmd = app.add_subcommand("ingest", "Import CSV embeddings into an EMBS file");
  ingest_cmd->add_option("--csv", ingest.csv, "Row-per-vector CSV")->required();
  ingest_cmd->add_option("--manifest", ingest.manifest, "Manifest JSON lines")->required();
  ingest_cmd->add_option("--id", ingest.id, "Dataset id")->required();
  ingest_cmd->add_option("--out", ingest.out, "Output .embs path")->required();
  ingest_cmd->add_flag("--no-normalize", ingest.no_normalize, "Keep vectors as given");
  ingest_cmd->add_option("--registry", ingest.registry, "Registry file to add the dataset to");
  ingest_cmd->add_option("--kind", ingest.kind, "real, synthetic or benchmark")
      ->capture_default_str()
      ->check(CLI::IsMember({"real", "synthetic", "benchmark"}));
  ingest_cmd->add_option("--generator", ingest.generator, "Generator model name");
  ingest_cmd->add_option("--training-dataset", ingest.training_dataset,
                         "Real dataset the generator was trained on");
  ingest_cmd->add_option("--image-root", ingest.image_root, "Directory of the dataset's images");

  ExtractFlags extract;
  CLI::App* extract_cmd = app.add_subcommand("extract", "Embed an image list");
  extract_cmd->add_option("--images", extract.images, "Image list, one path per line")
      ->required();
  extract_cmd->add_option("--image-root", extract.image_root, "Directory the list is relative to")
      ->capture_default_str();
  extract_cmd->add_option("--out", extract.out, "Output .embs path")->required();
  extract_cmd->add_option("--id", extract.id, "Dataset id")->required();
  extract_cmd->add_option("--dim", extract.dim, "Toy extractor dimension")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  extract_cmd->add_option("--seed", extract.seed, "Toy extractor seed")->capture_default_str();
  extract_cmd->add_option("--extractor-cmd", extract.extractor_cmd,
                          "External extractor, run as CMD <image_list> <output>");

  SearchFlags search;
  CLI::App* search_cmd = app.add_subcommand("search", "Exact cross-dataset similarity search");
  search_cmd->add_option("--synthetic", search.synthetic, "Synthetic .embs file")->required();
  search_cmd->add_option("--real", search.real, "Real .embs file")->required();
  search_cmd->add_option("--mode", search.mode, "all_pairs, unique_real or nearest")
      ->capture_default_str()
      ->check(CLI::IsMember({"all_pairs", "unique_real", "nearest"}));
  search_cmd->add_option("--k", search.k, "Pairs to keep")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  search_cmd->add_option("--out", search.out, "Output JSON lines")->required();
  search_cmd->add_option("--cache", search.cache, "Also write a binary TOPK cache");
  search.engine.Register(search_cmd);

  CalibrateFlags calibrate;
  CLI::App* calibrate_cmd =
      app.add_subcommand("calibrate", "Derive the decision threshold for a target FAR");
  calibrate_cmd->add_option("--benchmark", calibrate.benchmark, "label,score CSV")->required();
  calibrate_cmd->add_option("--far", calibrate.far, "Target false accept rate")
      ->capture_default_str();
  calibrate_cmd->add_option("--out", calibrate.out, "Write the threshold as JSON");

  HistFlags hist;
  CLI::App* hist_cmd = app.add_subcommand("hist", "Histogram of similarity scores");
  hist_cmd->add_option("--scores", hist.scores, "JSON lines with a score field, or benchmark CSV")
      ->required();
  hist_cmd->add_option("--label", hist.label, "Benchmark CSV rows to use")
      ->capture_default_str()
      ->check(CLI::IsMember({"genuine", "impostor", "all"}));
  hist_cmd->add_option("--lo", hist.lo, "Range start")->capture_default_str();
  hist_cmd->add_option("--hi", hist.hi, "Range end")->capture_default_str();
  hist_cmd->add_option("--bins", hist.bins, "Bin count")->capture_default_str();
  hist_cmd->add_option("--out-csv", hist.out_csv, "Histogram CSV")->required();
  hist_cmd->add_option("--out-json", hist.out_json, "Sidecar JSON (default: CSV path, .json)");
  hist_cmd->add_option("--benchmark", hist.benchmark, "Add the FAR threshold to the sidecar");
  hist_cmd->add_option("--far", hist.far, "Target FAR for --benchmark")->capture_default_str();

  AuditFlags audit;
  CLI::App* audit_cmd = app.add_subcommand("audit", "Run the full leakage audit");
  std::string audit_config;
  audit_cmd->add_option("--config", audit_config,
                        "TOML-style key = value file of audit flags; flags take precedence");
  audit_cmd->add_option("--registry", audit.registry, "Dataset registry JSON")->required();
  audit_cmd->add_option("--benchmark", audit.benchmark, "Benchmark label,score CSV")->required();
  audit_cmd->add_option("--synthetic", audit.synthetic, "Synthetic dataset id")->required();
  audit_cmd->add_option("--real", audit.real, "Real (training) dataset id")->required();
  audit_cmd->add_option("--out", audit.out, "Output directory")->required();
  audit_cmd->add_option("--k", audit.k, "Pairs sent to review")->capture_default_str();
  audit_cmd->add_option("--far", audit.far, "Target false accept rate")->capture_default_str();
  audit_cmd->add_option("--dedup", audit.dedup, "all_pairs or unique_real")
      ->capture_default_str()
      ->check(CLI::IsMember({"all_pairs", "unique_real"}));
  audit_cmd->add_option("--hist-lo", audit.hist_lo, "Histogram range start")
      ->capture_default_str();
  audit_cmd->add_option("--hist-hi", audit.hist_hi, "Histogram range end")->capture_default_str();
  audit_cmd->add_option("--hist-bins", audit.hist_bins, "Histogram bins")->capture_default_str();
  audit_cmd->add_option("--required-reviewers", audit.required_reviewers,
                        "Distinct reviewers needed for a consensus leak")
      ->capture_default_str();
  audit.engine.Register(audit_cmd);

  ReportFlags report;
  CLI::App* report_cmd = app.add_subcommand("report", "Fold the label log into the report");
  report_cmd->add_option("--audit-dir", report.audit_dir, "Audit output directory")->required();
  report_cmd->add_option("--labels", report.labels, "Label log (default: <audit-dir>/labels.jsonl)");
  report_cmd->add_option("--out", report.out,
                         "Finalized report (default: <audit-dir>/report.final.json)");

  ServeFlags serve;
  CLI::App* serve_cmd = app.add_subcommand(
      "serve", "Serve the review queue over HTTP (paths default to $LEAKCHECK_DATA_ROOT)");
  serve_cmd->add_option("--audit-dir", serve.audit_dir, "Audit output directory");
  serve_cmd->add_option("--registry", serve.registry, "Dataset registry for image roots");
  serve_cmd->add_option("--labels", serve.labels, "Label log (default: <audit-dir>/labels.jsonl)");
  serve_cmd->add_option("--static", serve.static_dir, "Built review UI assets");
  serve_cmd->add_option("--listen", serve.listen, "host:port")->capture_default_str();

  BenchFlags bench;
  CLI::App* bench_cmd = app.add_subcommand("bench", "Time the engine against the naive loop");
  bench_cmd->add_option("--synthetic", bench.synthetic, "Synthetic rows")->capture_default_str();
  bench_cmd->add_option("--real", bench.real, "Real rows")->capture_default_str();
  bench_cmd->add_option("--dim", bench.dim, "Dimension")->capture_default_str();
  bench_cmd->add_option("--k", bench.k, "Pairs to keep")->capture_default_str();
  bench_cmd->add_option("--seed", bench.seed, "Generator seed")->capture_default_str();
  bench.engine.Register(bench_cmd);

  std::vector<std::string> expanded;
  try {
    expanded = ExpandAuditConfig(args);
  } catch (const Error& e) {
    return ReportError(e, err);
  }
  std::vector<std::string> reversed(expanded.rbegin(), expanded.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    // Help and version requests are successful exits.
    if (e.get_exit_code() == static_cast<int>(CLI::ExitCodes::Success)) return app.exit(e, out, err);
    err << "leakcheck: usage: " << e.what() << "\n";
    return static_cast<int>(ExitCode::kUsage);
  }

  try {
    if (*ingest_cmd) return RunIngest(ingest, out);
    if (*extract_cmd) return RunExtract(extract, out);
    if (*search_cmd) return RunSearch(search, out);
    if (*calibrate_cmd) return RunCalibrate(calibrate, out);
    if (*hist_cmd) return RunHist(hist, out);
    if (*audit_cmd) return RunAuditCommand(audit, out);
    if (*report_cmd) return RunReport(report, out);
    if (*serve_cmd) return RunServe(serve, out, err);
    if (*bench_cmd) return RunBench(bench, out);
  } catch (const Error& e) {
    return ReportError(e, err);
  } catch (const fs::filesystem_error& e) {
    return ReportError(Error(ErrorCode::kIoFailure, e.what()), err);
  } catch (const std::exception& e) {
    return ReportError(Error(ErrorCode::kInternal, e.what()), err);
  }
  err << "leakcheck: usage: no subcommand\n";
  return static_cast<int>(ExitCode::kUsage);
}

}  // namespace leakcheck::cli
