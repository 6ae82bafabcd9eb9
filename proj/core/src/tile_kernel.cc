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

#include "leakcheck/tile_kernel.h"

#include <immintrin.h>

#include <algorithm>
#include <string>
#include <vector>

#include "leakcheck/error.h"

namespace leakcheck {

double ReferenceDot(std::span<const float> a, std::span<const float> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    acc += static_cast<double>(a[i]) * static_cast<double>(b[i]);
  }
  return acc;
}

double TileErrorBound(std::size_t dim) {
  const auto gamma = [](double n, double unit_roundoff) {
    return n * unit_roundoff / (1.0 - n * unit_roundoff);
  };
  return gamma(static_cast<double>(dim) + 8.0, 0x1.0p-24) +
         gamma(static_cast<double>(dim), 0x1.0p-53);
}

namespace {

using KernelFn = void (*)(const float* queries, std::size_t query_rows, const float* gallery,
                          std::size_t gallery_rows, std::size_t dim, float* out);

void ScalarTile(const float* queries, std::size_t query_rows, const float* gallery,
                std::size_t gallery_rows, std::size_t dim, float* out) {
  for (std::size_t i = 0; i < query_rows; ++i) {
    const float* q = queries + i * dim;
    for (std::size_t j = 0; j < gallery_rows; ++j) {
      const float* g = gallery + j * dim;
      float acc = 0.0f;
      for (std::size_t t = 0; t < dim; ++t) acc += q[t] * g[t];
      out[i * gallery_rows + j] = acc;
    }
  }
}

#if defined(__x86_64__) || defined(__i386__)

// ---------------------------------------------------------------------------
// AVX-512: the gallery is packed into strips of 64 rows stored column-major
// (strip[t][col]), so each accumulator holds 16 finished dot products and no
// horizontal reductions are needed. Micro-tile: 6 query rows x 4 vectors.

#define LEAKCHECK_AVX512 __attribute__((target("avx512f,fma")))

constexpr std::size_t kAvx512Lanes = 16;
constexpr std::size_t kAvx512Vecs = 4;
constexpr std::size_t kAvx512Strip = kAvx512Lanes * kAvx512Vecs;
constexpr std::size_t kAvx512Rows = 6;

// strip[t * kAvx512Strip + c] = gallery row (j0 + c), component t; zero past
// the last row.
void PackStrip(const float* gallery, std::size_t gallery_rows, std::size_t j0,
               std::size_t dim, float* strip) {
  const std::size_t cols = std::min(kAvx512Strip, gallery_rows - j0);
  for (std::size_t c = 0; c < kAvx512Strip; ++c) {
    if (c < cols) {
      const float* row = gallery + (j0 + c) * dim;
      for (std::size_t t = 0; t < dim; ++t) strip[t * kAvx512Strip + c] = row[t];
    } else {
      for (std::size_t t = 0; t < dim; ++t) strip[t * kAvx512Strip + c] = 0.0f;
    }
  }
}

template <int kRows, int kVecs>
LEAKCHECK_AVX512 inline void Avx512Micro(const float* queries, const float* strip,
                                         std::size_t dim, std::size_t cols, float* out,
                                         std::size_t out_stride) {
  __m512 acc[kRows][kVecs];
  for (int r = 0; r < kRows; ++r)
    for (int v = 0; v < kVecs; ++v) acc[r][v] = _mm512_setzero_ps();
  for (std::size_t t = 0; t < dim; ++t) {
    const float* p = strip + t * kAvx512Strip;
    __m512 g[kVecs];
    for (int v = 0; v < kVecs; ++v) g[v] = _mm512_loadu_ps(p + v * kAvx512Lanes);
    for (int r = 0; r < kRows; ++r) {
      const __m512 q = _mm512_set1_ps(queries[r * dim + t]);
      for (int v = 0; v < kVecs; ++v) acc[r][v] = _mm512_fmadd_ps(q, g[v], acc[r][v]);
    }
  }
  for (int r = 0; r < kRows; ++r) {
    for (int v = 0; v < kVecs; ++v) {
      const std::size_t col = v * kAvx512Lanes;
      float* dst = out + r * out_stride + col;
      if (col + kAvx512Lanes <= cols) {
        _mm512_storeu_ps(dst, acc[r][v]);
      } else {
        const __mmask16 mask = static_cast<__mmask16>((1u << (cols - col)) - 1u);
        _mm512_mask_storeu_ps(dst, mask, acc[r][v]);
      }
    }
  }
}

template <int kRows>
LEAKCHECK_AVX512 inline void Avx512Rows(const float* queries, const float* strip,
                                        std::size_t dim, std::size_t cols, float* out,
                                        std::size_t out_stride) {
  switch ((cols + kAvx512Lanes - 1) / kAvx512Lanes) {
    case 1: Avx512Micro<kRows, 1>(queries, strip, dim, cols, out, out_stride); break;
    case 2: Avx512Micro<kRows, 2>(queries, strip, dim, cols, out, out_stride); break;
    case 3: Avx512Micro<kRows, 3>(queries, strip, dim, cols, out, out_stride); break;
    default: Avx512Micro<kRows, 4>(queries, strip, dim, cols, out, out_stride); break;
  }
}

LEAKCHECK_AVX512 void Avx512Tile(const float* queries, std::size_t query_rows,
                                 const float* gallery, std::size_t gallery_rows,
                                 std::size_t dim, float* out) {
  thread_local std::vector<float> strip;
  strip.resize(dim * kAvx512Strip);
  for (std::size_t j0 = 0; j0 < gallery_rows; j0 += kAvx512Strip) {
    const std::size_t cols = std::min(kAvx512Strip, gallery_rows - j0);
    PackStrip(gallery, gallery_rows, j0, dim, strip.data());
    std::size_t i = 0;
    for (; i + kAvx512Rows <= query_rows; i += kAvx512Rows) {
      Avx512Rows<kAvx512Rows>(queries + i * dim, strip.data(), dim, cols,
                              out + i * gallery_rows + j0, gallery_rows);
    }
    float* tail_out = out + i * gallery_rows + j0;
    const float* tail_q = queries + i * dim;
    switch (query_rows - i) {
      case 1: Avx512Rows<1>(tail_q, strip.data(), dim, cols, tail_out, gallery_rows); break;
      case 2: Avx512Rows<2>(tail_q, strip.data(), dim, cols, tail_out, gallery_rows); break;
      case 3: Avx512Rows<3>(tail_q, strip.data(), dim, cols, tail_out, gallery_rows); break;
      case 4: Avx512Rows<4>(tail_q, strip.data(), dim, cols, tail_out, gallery_rows); break;
      case 5: Avx512Rows<5>(tail_q, strip.data(), dim, cols, tail_out, gallery_rows); break;
      default: break;
    }
  }
}

// ---------------------------------------------------------------------------
// AVX2: 4 query rows x 3 gallery rows, 12 accumulators.

#define LEAKCHECK_AVX2 __attribute__((target("avx2,fma")))

LEAKCHECK_AVX2 inline float Avx2HorizontalSum(__m256 v) {
  const __m128 lo = _mm256_castps256_ps128(v);
  const __m128 hi = _mm256_extractf128_ps(v, 1);
  __m128 sum = _mm_add_ps(lo, hi);
  sum = _mm_add_ps(sum, _mm_movehl_ps(sum, sum));
  sum = _mm_add_ss(sum, _mm_shuffle_ps(sum, sum, 0x55));
  return _mm_cvtss_f32(sum);
}

template <int kRows, int kCols>
LEAKCHECK_AVX2 inline void Avx2Block(const float* queries, const float* gallery,
                                     std::size_t dim, float* out, std::size_t out_stride) {
  __m256 acc[kRows][kCols];
  for (int r = 0; r < kRows; ++r)
    for (int c = 0; c < kCols; ++c) acc[r][c] = _mm256_setzero_ps();
  std::size_t t = 0;
  for (; t + 8 <= dim; t += 8) {
    __m256 g[kCols];
    for (int c = 0; c < kCols; ++c) g[c] = _mm256_loadu_ps(gallery + c * dim + t);
    for (int r = 0; r < kRows; ++r) {
      const __m256 q = _mm256_loadu_ps(queries + r * dim + t);
      for (int c = 0; c < kCols; ++c) acc[r][c] = _mm256_fmadd_ps(q, g[c], acc[r][c]);
    }
  }
  if (t < dim) {
    alignas(32) int lanes[8];
    for (int l = 0; l < 8; ++l) lanes[l] = (t + l < dim) ? -1 : 0;
    const __m256i mask = _mm256_load_si256(reinterpret_cast<const __m256i*>(lanes));
    __m256 g[kCols];
    for (int c = 0; c < kCols; ++c) g[c] = _mm256_maskload_ps(gallery + c * dim + t, mask);
    for (int r = 0; r < kRows; ++r) {
      const __m256 q = _mm256_maskload_ps(queries + r * dim + t, mask);
      for (int c = 0; c < kCols; ++c) acc[r][c] = _mm256_fmadd_ps(q, g[c], acc[r][c]);
    }
  }
  for (int r = 0; r < kRows; ++r)
    for (int c = 0; c < kCols; ++c) out[r * out_stride + c] = Avx2HorizontalSum(acc[r][c]);
}

LEAKCHECK_AVX2 void Avx2Tile(const float* queries, std::size_t query_rows,
                             const float* gallery, std::size_t gallery_rows, std::size_t dim,
                             float* out) {
  constexpr std::size_t kRows = 4;
  constexpr std::size_t kCols = 3;
  std::size_t j = 0;
  for (; j + kCols <= gallery_rows; j += kCols) {
    const float* g = gallery + j * dim;
    std::size_t i = 0;
    for (; i + kRows <= query_rows; i += kRows) {
      Avx2Block<kRows, kCols>(queries + i * dim, g, dim, out + i * gallery_rows + j,
                              gallery_rows);
    }
    for (; i < query_rows; ++i) {
      Avx2Block<1, kCols>(queries + i * dim, g, dim, out + i * gallery_rows + j, gallery_rows);
    }
  }
  for (; j < gallery_rows; ++j) {
    const float* g = gallery + j * dim;
    for (std::size_t i = 0; i < query_rows; ++i) {
      Avx2Block<1, 1>(queries + i * dim, g, dim, out + i * gallery_rows + j, gallery_rows);
    }
  }
}

struct Dispatch {
  KernelFn fn;
  std::string_view name;
};

std::vector<Dispatch> UsableKernels() {
  __builtin_cpu_init();
  std::vector<Dispatch> kernels;
  if (__builtin_cpu_supports("avx512f")) kernels.push_back({&Avx512Tile, "avx512"});
  if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) {
    kernels.push_back({&Avx2Tile, "avx2"});
  }
  kernels.push_back({&ScalarTile, "scalar"});
  return kernels;
}

#else

struct Dispatch {
  KernelFn fn;
  std::string_view name;
};

std::vector<Dispatch> UsableKernels() { return {{&ScalarTile, "scalar"}}; }

#endif

Dispatch SelectKernel() { return UsableKernels().front(); }

void CheckTileArgs(const MatrixView& queries, const MatrixView& gallery,
                   std::span<float> out) {
  if (queries.dim != gallery.dim) {
    throw Error(ErrorCode::kDimMismatch, "tile dim mismatch: " + std::to_string(queries.dim) +
                                             " vs " + std::to_string(gallery.dim));
  }
  if (out.size() < queries.rows * gallery.rows) {
    throw Error(ErrorCode::kInvalidArgument, "tile output buffer too small");
  }
}

const Dispatch& ActiveKernel() {
  static const Dispatch dispatch = SelectKernel();
  return dispatch;
}

}  // namespace

std::string_view TileKernelName() { return ActiveKernel().name; }

std::vector<std::string_view> AvailableTileKernels() {
  std::vector<std::string_view> names;
  for (const auto& k : UsableKernels()) names.push_back(k.name);
  return names;
}

void TilePass(const MatrixView& queries, const MatrixView& gallery, std::span<float> out) {
  CheckTileArgs(queries, gallery, out);
  if (queries.rows == 0 || gallery.rows == 0) return;
  ActiveKernel().fn(queries.data.data(), queries.rows, gallery.data.data(), gallery.rows,
                    queries.dim, out.data());
}

void TilePassUsing(std::string_view kernel, const MatrixView& queries,
                   const MatrixView& gallery, std::span<float> out) {
  CheckTileArgs(queries, gallery, out);
  for (const auto& k : UsableKernels()) {
    if (k.name != kernel) continue;
    if (queries.rows == 0 || gallery.rows == 0) return;
    k.fn(queries.data.data(), queries.rows, gallery.data.data(), gallery.rows, queries.dim,
         out.data());
    return;
  }
  throw Error(ErrorCode::kInvalidArgument,
              "tile kernel '" + std::string(kernel) + "' is not available");
}

std::vector<float> TilePass(const MatrixView& queries, const MatrixView& gallery) {
  std::vector<float> out(queries.rows * gallery.rows);
  TilePass(queries, gallery, out);
  return out;
}

}  // namespace leakcheck
