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

#include "leakcheck/review_server.h"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <charconv>
#include <system_error>
#include <utility>

#include "httplib.h"
#include "json.hpp"
#include "leakcheck/error.h"
#include "leakcheck/file_util.h"

namespace leakcheck {
using nlohmann::json;

namespace fs = std::filesystem;

std::pair<std::string, int> ParseListenAddress(const std::string& listen) {
  const std::size_t colon = listen.rfind(':');
  if (colon == std::string::npos || colon + 1 == listen.size()) {
    throw Error(ErrorCode::kInvalidArgument, "--listen expects host:port, got '" + listen + "'");
  }
  std::string host = listen.substr(0, colon);
  if (!host.empty() && host.front() == '[') {
    if (host.size() < 2 || host.back() != ']') {
      throw Error(ErrorCode::kInvalidArgument, "unterminated [ in '" + listen + "'");
    }
    host = host.substr(1, host.size() - 2);
  } else if (host.find(':') != std::string::npos) {
    throw Error(ErrorCode::kInvalidArgument, "IPv6 hosts need brackets: '" + listen + "'");
  }
  if (host.empty()) host = "0.0.0.0";
  int port = -1;
  const char* first = listen.data() + colon + 1;
  const char* last = listen.data() + listen.size();
  auto [ptr, ec] = std::from_chars(first, last, port);
  if (ec != std::errc() || ptr != last || port < 0 || port > 65535) {
    throw Error(ErrorCode::kInvalidArgument, "invalid port in '" + listen + "'");
  }
  return {host, port};
}

std::optional<fs::path> ResolveInsideRoot(const fs::path& root, const std::string& relative) {
  if (relative.empty() || relative.find('\0') != std::string::npos) return std::nullopt;
  const fs::path rel(relative);
  if (rel.is_absolute() || rel.has_root_name()) return std::nullopt;
  for (const fs::path& part : rel) {
    if (part == "..") return std::nullopt;
  }
  std::error_code ec;
  const fs::path base = fs::canonical(root, ec);
  if (ec) return std::nullopt;
  const fs::path target = fs::canonical(base / rel, ec);
  if (ec || !fs::is_regular_file(target, ec)) return std::nullopt;
  // canonical() resolves symlinks, so this also rejects links pointing out.
  auto [root_end, target_it] = std::mismatch(base.begin(), base.end(), target.begin(), target.end());
  if (root_end != base.end()) return std::nullopt;
  return target;
}

namespace {

std::string PercentEncodePath(std::string_view path) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : path) {
    if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~' || c == '/') {
      out.push_back(static_cast<char>(c));
    } else {
      out.push_back('%');
      out.push_back(kHex[c >> 4]);
      out.push_back(kHex[c & 0xf]);
    }
  }
  return out;
}

std::string ImageUrl(const std::string& dataset_id, const std::string& image_path) {
  if (image_path.find("://") != std::string::npos) return image_path;
  return "/images/" + PercentEncodePath(dataset_id) + "/" + PercentEncodePath(image_path);
}

int HttpStatusFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kUnknownPair:
    case ErrorCode::kNotFound:
      return 404;
    case ErrorCode::kInvalidLabel:
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kParseFailure:
      return 400;
    case ErrorCode::kQueueNotLoaded:
      return 503;
    default:
      return 500;
  }
}

std::string_view MimeTypeFor(const fs::path& path) {
  std::string ext = path.extension().string();
  for (char& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (ext == ".png") return "image/png";
  if (ext == ".jpg" || ext == ".jpeg") return "image/jpeg";
  if (ext == ".gif") return "image/gif";
  if (ext == ".webp") return "image/webp";
  if (ext == ".bmp") return "image/bmp";
  if (ext == ".ppm" || ext == ".pgm") return "image/x-portable-anymap";
  return "application/octet-stream";
}

constexpr std::string_view kPlaceholderPage =
    "<!doctype html>\n<html><head><meta charset=\"utf-8\"><title>leakcheck review</title>"
    "</head><body><p>No UI assets installed. The review API is under /api/.</p>"
    "</body></html>\n";

void SendJson(httplib::Response& res, const json& body, int status = 200) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void SendError(httplib::Response& res, const Error& e) {
  SendJson(res,
           {{"ok", false},
            {"error", {{"code", std::string(ErrorCodeName(e.code()))}, {"message", e.what()}}}},
           HttpStatusFor(e.code()));
}

}  // namespace

struct ReviewServer::Impl {
  ReviewSession& session;
  ServerOptions options;
  httplib::Server server;
  int bound_port = -1;
  std::atomic<bool> run_requested{false};

  Impl(ReviewSession& s, ServerOptions o) : session(s), options(std::move(o)) {}

  json EntryJson(const QueueEntry& e) const {
    return {{"pair_id", e.pair_id},
            {"rank", e.rank},
            {"synth_index", e.synth_index},
            {"real_index", e.real_index},
            {"score", e.score},
            {"synth_path", e.synth_path},
            {"real_path", e.real_path},
            {"above_threshold", e.above_threshold},
            {"synth_image_url", ImageUrl(session.synthetic_id(), e.synth_path)},
            {"real_image_url", ImageUrl(session.real_id(), e.real_path)}};
  }

  template <typename F>
  httplib::Server::Handler Guarded(F f) {
    return [f = std::move(f)](const httplib::Request& req, httplib::Response& res) {
      try {
        f(req, res);
      } catch (const Error& e) {
        SendError(res, e);
      } catch (const std::exception& e) {
        SendError(res, Error(ErrorCode::kInternal, e.what()));
      }
    };
  }

  void Routes() {
    server.Get("/api/queue/next", Guarded([this](const httplib::Request& req,
                                                 httplib::Response& res) {
      const std::string reviewer = req.get_param_value("reviewer");
      if (reviewer.empty()) throw Error(ErrorCode::kInvalidArgument, "reviewer is required");
      const std::optional<QueueEntry> next = session.NextPair(reviewer);
      const ReviewProgress p = session.Progress(reviewer);
      json body = next ? EntryJson(*next) : json::object();
      body["done"] = !next.has_value();
      body["progress"] = {{"labeled", p.labeled}, {"total", p.total}};
      SendJson(res, body);
    }));

    server.Post("/api/labels", Guarded([this](const httplib::Request& req,
                                              httplib::Response& res) {
      LabelSubmission sub;
      try {
        const json body = json::parse(req.body);
        sub.pair_id = body.at("pair_id").get<std::string>();
        sub.reviewer_id = body.at("reviewer_id").get<std::string>();
        sub.label = body.at("label").get<std::string>();
        if (body.contains("timestamp") && !body["timestamp"].is_null()) {
          sub.timestamp = body["timestamp"].get<std::string>();
        }
      } catch (const json::exception& e) {
        throw Error(ErrorCode::kParseFailure, std::string("label body: ") + e.what());
      }
      const SubmitResult result = session.Submit(sub);
      SendJson(res, {{"ok", true}, {"record_id", result.record_id}, {"duplicate", result.duplicate}});
    }));

    server.Get("/api/report", Guarded([this](const httplib::Request&, httplib::Response& res) {
      res.set_content(EncodeAuditReport(session.Report()), "application/json");
    }));

    server.Get(R"(/api/pairs/([^/]+))", Guarded([this](const httplib::Request& req,
                                                       httplib::Response& res) {
      const std::string pair_id = req.matches[1];
      json body = EntryJson(session.FindPair(pair_id));
      json labels = json::array();
      for (const ReviewRecord& r : session.RecordsForPair(pair_id)) {
        labels.push_back(json::parse(EncodeReviewRecord(r)));
      }
      body["labels"] = std::move(labels);
      SendJson(res, body);
    }));

    server.Get(R"(/images/([^/]+)/(.+))", Guarded([this](const httplib::Request& req,
                                                         httplib::Response& res) {
      const std::string dataset_id = req.matches[1];
      auto root = options.image_roots.find(dataset_id);
      if (root == options.image_roots.end()) {
        throw Error(ErrorCode::kNotFound, "no image root for dataset '" + dataset_id + "'");
      }
      const std::optional<fs::path> file = ResolveInsideRoot(root->second, req.matches[2]);
      if (!file) throw Error(ErrorCode::kNotFound, "image not found");
      res.set_content(ReadFileBytes(*file), std::string(MimeTypeFor(*file)));
    }));

    if (options.static_dir) {
      if (!server.set_mount_point("/", options.static_dir->string())) {
        throw Error(ErrorCode::kNotFound,
                    "static directory not found: " + options.static_dir->string());
      }
    } else {
      server.Get("/", [](const httplib::Request&, httplib::Response& res) {
        res.set_content(std::string(kPlaceholderPage), "text/html; charset=utf-8");
      });
    }
  }
};

ReviewServer::ReviewServer(ReviewSession& session, ServerOptions options)
    : impl_(std::make_unique<Impl>(session, std::move(options))) {
  impl_->Routes();
}

ReviewServer::~ReviewServer() { Stop(); }

int ReviewServer::Bind() {
  if (impl_->bound_port >= 0) return impl_->bound_port;
  const ServerOptions& o = impl_->options;
  if (o.port == 0) {
    impl_->bound_port = impl_->server.bind_to_any_port(o.host);
  } else if (impl_->server.bind_to_port(o.host, o.port)) {
    impl_->bound_port = o.port;
  }
  if (impl_->bound_port < 0) {
    throw Error(ErrorCode::kIoFailure,
                "cannot listen on " + o.host + ":" + std::to_string(o.port));
  }
  return impl_->bound_port;
}

void ReviewServer::Run() {
  Bind();
  impl_->run_requested = true;
  impl_->server.listen_after_bind();
}

void ReviewServer::Stop() {
  if (!impl_ || !impl_->run_requested) return;
  // A Stop() racing a Run() that has not entered its accept loop would be lost.
  impl_->server.wait_until_ready();
  impl_->server.stop();
}

int ReviewServer::port() const { return impl_->bound_port; }

}  // namespace leakcheck
