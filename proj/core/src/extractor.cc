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

#include "leakcheck/extractor.h"

#include <array>
#include <cstdlib>
#include <utility>

#include "leakcheck/embedding_io.h"
#include "leakcheck/error.h"
#include "leakcheck/file_util.h"
#include "leakcheck/random_embeddings.h"

namespace leakcheck {
namespace fs = std::filesystem;

namespace {

constexpr std::size_t kHistogramBins = 256;

std::string ShellQuote(const std::string& arg) {
  std::string quoted = "'";
  for (char c : arg) {
    if (c == '\'') {
      quoted += "'\\''";
    } else {
      quoted.push_back(c);
    }
  }
  quoted.push_back('\'');
  return quoted;
}

}  // namespace

ToyExtractor::ToyExtractor(std::size_t dim, std::uint64_t seed)
    : dim_(dim), projection_(dim * kHistogramBins) {
  if (dim == 0) throw Error(ErrorCode::kDimensionZero, "extractor dim must be >= 1");
  GaussianSource gauss(seed);
  for (double& w : projection_) w = gauss.Next();
}

std::vector<float> ToyExtractor::Extract(std::string_view image_bytes) const {
  if (image_bytes.empty()) throw Error(ErrorCode::kEmptyInput, "empty image byte sequence");
  std::array<double, kHistogramBins> histogram{};
  for (char c : image_bytes) histogram[static_cast<unsigned char>(c)] += 1.0;
  const double scale = 1.0 / static_cast<double>(image_bytes.size());
  std::vector<float> embedding(dim_);
  for (std::size_t i = 0; i < dim_; ++i) {
    const double* row = projection_.data() + i * kHistogramBins;
    double acc = 0.0;
    for (std::size_t b = 0; b < kHistogramBins; ++b) acc += row[b] * histogram[b];
    embedding[i] = static_cast<float>(acc * scale);
  }
  NormalizeInPlace(embedding);
  return embedding;
}

std::vector<float> ToyExtract(std::string_view image_bytes, std::size_t dim,
                              std::uint64_t seed) {
  return ToyExtractor(dim, seed).Extract(image_bytes);
}

std::vector<std::string> ReadImageList(const fs::path& path) {
  const std::string text = ReadFileBytes(path);
  std::vector<std::string> paths;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    std::string line = text.substr(start, end - start);
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (!line.empty()) paths.push_back(std::move(line));
    start = end + 1;
  }
  return paths;
}

EmbeddingSet ExtractToySet(const std::vector<std::string>& image_paths,
                           const fs::path& image_root, std::size_t dim, std::uint64_t seed,
                           std::string dataset_id) {
  const ToyExtractor extractor(dim, seed);
  std::vector<float> vectors;
  vectors.reserve(image_paths.size() * dim);
  std::vector<ManifestRecord> manifest;
  manifest.reserve(image_paths.size());
  for (std::size_t i = 0; i < image_paths.size(); ++i) {
    const std::string bytes = ReadFileBytes(image_root / image_paths[i]);
    std::vector<float> embedding;
    try {
      embedding = extractor.Extract(bytes);
    } catch (const Error& e) {
      throw Error(e.code(), image_paths[i] + ": " + e.what());
    }
    vectors.insert(vectors.end(), embedding.begin(), embedding.end());
    manifest.push_back(ManifestRecord{i, image_paths[i], std::nullopt, std::nullopt});
  }
  return EmbeddingSet::Create(std::move(dataset_id), dim, std::move(vectors),
                              std::move(manifest), /*normalized=*/true);
}

EmbeddingSet RunExtractorCommand(const std::string& command, const fs::path& image_list,
                                 const fs::path& output, std::string dataset_id) {
  const std::vector<std::string> images = ReadImageList(image_list);
  std::error_code ec;
  fs::remove(output, ec);
  const std::string invocation =
      command + " " + ShellQuote(image_list.string()) + " " + ShellQuote(output.string());
  const int status = std::system(invocation.c_str());
  if (status != 0) {
    throw Error(ErrorCode::kExtractorFailed,
                "extractor command exited with status " + std::to_string(status));
  }
  if (!fs::is_regular_file(output, ec)) {
    throw Error(ErrorCode::kExtractorFailed,
                "extractor command did not write " + output.string());
  }
  std::vector<ManifestRecord> manifest;
  manifest.reserve(images.size());
  for (std::size_t i = 0; i < images.size(); ++i) {
    manifest.push_back(ManifestRecord{i, images[i], std::nullopt, std::nullopt});
  }
  EmbeddingSet set =
      DecodeEmbeddingFile(ReadFileBytes(output), std::move(manifest), std::move(dataset_id));
  WriteManifest(ManifestPathFor(output), set.manifest());
  return set;
}

}  // namespace leakcheck
