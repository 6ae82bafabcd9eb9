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

#ifndef LEAKCHECK_REVIEW_SERVER_H_
#define LEAKCHECK_REVIEW_SERVER_H_

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>

#include "leakcheck/review_session.h"

namespace leakcheck {

struct ServerOptions {
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 picks a free port
  // dataset_id -> directory its manifest image paths are relative to
  std::map<std::string, std::filesystem::path> image_roots;
  // Built UI assets; a placeholder page is served at / when unset.
  std::optional<std::filesystem::path> static_dir;
};

// Parses "host:port". Throws kInvalidArgument.
std::pair<std::string, int> ParseListenAddress(const std::string& listen);

// Joins `relative` onto `root` and returns the canonical result if it stays
// inside root; nullopt for absolute paths, escapes via ".." or symlinks, and
// files that do not exist.
std::optional<std::filesystem::path> ResolveInsideRoot(const std::filesystem::path& root,
                                                       const std::string& relative);

// JSON HTTP front end for a ReviewSession:
//   GET  /api/queue/next?reviewer=ID   next entry or {"done":true}
//   POST /api/labels                   {"pair_id","reviewer_id","label"[,"timestamp"]}
//   GET  /api/report                   finalized report
//   GET  /api/pairs/{pair_id}          entry plus its labels
//   GET  /images/{dataset_id}/{path}   image bytes
//   GET  /                             UI assets
class ReviewServer {
 public:
  ReviewServer(ReviewSession& session, ServerOptions options);
  ~ReviewServer();
  ReviewServer(const ReviewServer&) = delete;
  ReviewServer& operator=(const ReviewServer&) = delete;

  // Binds the socket and returns the bound port. Throws kIoFailure.
  int Bind();
  // Serves until Stop(). Binds first if needed.
  void Run();
  void Stop();

  int port() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace leakcheck

#endif  // LEAKCHECK_REVIEW_SERVER_H_
