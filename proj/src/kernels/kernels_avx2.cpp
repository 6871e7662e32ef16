// Copyright 2025 The mgtdetect Authors
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

// AVX2 kernel variants. Lane j of the 4-wide accumulator holds exactly the
// partial sum s_j of the scalar reference, and the horizontal combine uses
// the same (s0 + s1) + (s2 + s3) order, so results match the scalar backend
// bit for bit. No FMA: mul and add round separately, as in the reference.

#include <cstddef>
#include <cstdint>

#include "mgtdetect/kernels.hpp"

#if defined(__AVX2__)

#include <immintrin.h>

namespace mgtdetect::kernels {

namespace {

inline double combine_lanes(__m256d acc) {
  const __m128d lo = _mm256_castpd256_pd128(acc);      // lanes 0,1
  const __m128d hi = _mm256_extractf128_pd(acc, 1);    // lanes 2,3
  const double s0 = _mm_cvtsd_f64(lo);
  const double s1 = _mm_cvtsd_f64(_mm_unpackhi_pd(lo, lo));
  const double s2 = _mm_cvtsd_f64(hi);
  const double s3 = _mm_cvtsd_f64(_mm_unpackhi_pd(hi, hi));
  return (s0 + s1) + (s2 + s3);
}

double sum_squares_avx2(const double* x, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_loadu_pd(x + i);
    acc = _mm256_add_pd(acc, _mm256_mul_pd(v, v));
  }
  double total = combine_lanes(acc);
  for (; i < n; ++i) total += x[i] * x[i];
  return total;
}

void scale_avx2(double* x, std::size_t n, double alpha) {
  const __m256d a = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(x + i, _mm256_mul_pd(_mm256_loadu_pd(x + i), a));
  }
  for (; i < n; ++i) x[i] *= alpha;
}

double gather_dot_avx2(const double* values, const std::uint32_t* indices,
                       std::size_t nnz, const double* dense) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t j = 0;
  for (; j + 4 <= nnz; j += 4) {
    const __m128i idx =
        _mm_loadu_si128(reinterpret_cast<const __m128i*>(indices + j));
    const __m256d g = _mm256_i32gather_pd(dense, idx, 8);
    acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(values + j), g));
  }
  double total = combine_lanes(acc);
  for (; j < nnz; ++j) total += values[j] * dense[indices[j]];
  return total;
}

// AVX2 has no scatter store; the scalar loop is the implementation.
void scatter_axpy_avx2(double alpha, const double* values,
                       const std::uint32_t* indices, std::size_t nnz,
                       double* dense) {
  for (std::size_t j = 0; j < nnz; ++j) {
    dense[indices[j]] += alpha * values[j];
  }
}

double squared_error_sum_avx2(const double* a, const double* b,
                              std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d =
        _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    acc = _mm256_add_pd(acc, _mm256_mul_pd(d, d));
  }
  double total = combine_lanes(acc);
  for (; i < n; ++i) {
    const double d = a[i] - b[i];
    total += d * d;
  }
  return total;
}

}  // namespace

const Ops* avx2_ops() {
  static const Ops table{
      sum_squares_avx2,
      scale_avx2,
      gather_dot_avx2,
      scatter_axpy_avx2,
      squared_error_sum_avx2,
  };
  return &table;
}

}  // namespace mgtdetect::kernels

#else  // !__AVX2__

namespace mgtdetect::kernels {

const Ops* avx2_ops() { return nullptr; }

}  // namespace mgtdetect::kernels

#endif
