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

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

namespace mgtdetect::kernels {

// Double-precision inner loops shared by the vectorizer, the classifier, and
// the metric suite. Every kernel has a scalar reference implementation and an
// AVX2 variant selected at runtime.
//
// Bit-exactness contract: reductions accumulate into four interleaved partial
// sums (lane j takes elements with index congruent to j mod 4), combined as
// (s0 + s1) + (s2 + s3), then fold the tail sequentially. Both backends
// implement exactly this order and are compiled without FP contraction, so
// scalar and AVX2 results are identical bit for bit. Model files and reports
// therefore do not depend on which backend ran.

struct Ops {
  // sum of x[i]^2
  double (*sum_squares)(const double* x, std::size_t n);
  // x[i] *= alpha
  void (*scale)(double* x, std::size_t n, double alpha);
  // sum of values[j] * dense[indices[j]]
  double (*gather_dot)(const double* values, const std::uint32_t* indices,
                       std::size_t nnz, const double* dense);
  // dense[indices[j]] += alpha * values[j]; indices must be distinct
  void (*scatter_axpy)(double alpha, const double* values,
                       const std::uint32_t* indices, std::size_t nnz,
                       double* dense);
  // sum of (a[i] - b[i])^2
  double (*squared_error_sum)(const double* a, const double* b, std::size_t n);
};

enum class Backend { scalar, avx2 };

bool backend_available(Backend backend);

/// Kernel table for an explicit backend; throws UsageError if unavailable.
const Ops& ops(Backend backend);

/// The dispatched table: the best available backend, overridable with the
/// MGTDETECT_KERNELS environment variable ("scalar" or "avx2") or select().
const Ops& active();
Backend active_backend();
void select(Backend backend);

std::string backend_name(Backend backend);

}  // namespace mgtdetect::kernels
