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

#ifndef LEAKCHECK_EXTRACTOR_H_
#define LEAKCHECK_EXTRACTOR_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "leakcheck/embedding_set.h"

namespace leakcheck {

// Deterministic stand-in for a face recognition model: the 256-bin byte
// histogram of the input, multiplied by a fixed-seed Gaussian projection
// (dim x 256) and normalized. Inputs that differ in a few bytes map to nearby
// unit vectors. It has no notion of faces and exists so the pipeline runs
// end to end without model weights.
class ToyExtractor {
 public:
  ToyExtractor(std::size_t dim, std::uint64_t seed);

  // Throws kEmptyInput for an empty byte sequence.
  std::vector<float> Extract(std::string_view image_bytes) const;

  std::size_t dim() const { return dim_; }

 private:
  std::size_t dim_;
  std::vector<double> projection_;  // dim x 256, row-major
};

std::vector<float> ToyExtract(std::string_view image_bytes, std::size_t dim,
                              std::uint64_t seed);

// Image list file: one image path per line (relative to an image root).
// Blank lines are skipped.
std::vector<std::string> ReadImageList(const std::filesystem::path& path);

// Runs the toy extractor over image_root/<path> for each listed path.
EmbeddingSet ExtractToySet(const std::vector<std::string>& image_paths,
                           const std::filesystem::path& image_root, std::size_t dim,
                           std::uint64_t seed, std::string dataset_id);

// Adapter for an external extractor: runs `<command> <image_list> <output>`
// through the shell. The command must write an EMBS file (manifest optional)
// to `output`; on success the manifest is rebuilt from the image list and
// written next to it. Throws kExtractorFailed on a nonzero exit status or a
// missing output, and kManifestMismatch if the row count differs from the
// list length.
EmbeddingSet RunExtractorCommand(const std::string& command,
                                 const std::filesystem::path& image_list,
                                 const std::filesystem::path& output,
                                 std::string dataset_id);

}  // namespace leakcheck

#endif  // LEAKCHECK_EXTRACTOR_H_
