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

#ifndef LEAKCHECK_TILE_KERNEL_H_
#define LEAKCHECK_TILE_KERNEL_H_

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "leakcheck/embedding_set.h"

namespace leakcheck {

// Row-major, densely packed block of `rows` vectors of length `dim`.
struct MatrixView {
  std::span<const float> data;
  std::size_t rows = 0;
  std::size_t dim = 0;

  static MatrixView Of(const EmbeddingSet& set) {
    return MatrixView{set.data(), set.count(), set.dim()};
  }

  std::span<const float> Row(std::size_t i) const { return data.subspan(i * dim, dim); }

  MatrixView Slice(std::size_t begin, std::size_t end) const {
    return MatrixView{data.subspan(begin * dim, (end - begin) * dim), end - begin, dim};
  }
};

// Dot product with f64 accumulation in index order. This is the reference
// score: engine results are re-scored with it, so they are bit-identical to a
// naive double loop that sums the same way.
double ReferenceDot(std::span<const float> a, std::span<const float> b);

// out[i * gallery.rows + j] = <queries.Row(i), gallery.Row(j)>, accumulated in
// f32 with the widest SIMD kernel the CPU supports. No pruning and no
// approximation beyond f32 rounding. Throws kDimMismatch; `out` must hold
// queries.rows * gallery.rows floats (kInvalidArgument otherwise).
void TilePass(const MatrixView& queries, const MatrixView& gallery, std::span<float> out);
std::vector<float> TilePass(const MatrixView& queries, const MatrixView& gallery);

// Name of the kernel TilePass dispatches to: "avx512", "avx2" or "scalar".
std::string_view TileKernelName();

// Kernels usable on this CPU, widest first. TilePassUsing runs a specific one
// so tests and benchmarks can cover the narrower paths too.
std::vector<std::string_view> AvailableTileKernels();
void TilePassUsing(std::string_view kernel, const MatrixView& queries,
                   const MatrixView& gallery, std::span<float> out);

// Bound on |TilePass score - ReferenceDot score| / (|q| * |g|) for vectors of
// the given length. Covers any f32 summation order with at most dim + 8
// roundings per term plus the f64 reference's own rounding.
double TileErrorBound(std::size_t dim);

}  // namespace leakcheck

#endif  // LEAKCHECK_TILE_KERNEL_H_
