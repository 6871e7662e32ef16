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

// Scalar reference kernels. These define the numeric contract: the blocked
// accumulation order here is what the AVX2 variants reproduce lane for lane.

#include <cstddef>
#include <cstdint>

#include "mgtdetect/kernels.hpp"

namespace mgtdetect::kernels {

namespace {

double sum_squares_scalar(const double* x, std::size_t n) {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 += x[i] * x[i];
    s1 += x[i + 1] * x[i + 1];
    s2 += x[i + 2] * x[i + 2];
    s3 += x[i + 3] * x[i + 3];
  }
  double total = (s0 + s1) + (s2 + s3);
  for (; i < n; ++i) total += x[i] * x[i];
  return total;
}

void scale_scalar(double* x, std::size_t n, double alpha) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= alpha;
}

double gather_dot_scalar(const double* values, const std::uint32_t* indices,
                         std::size_t nnz, const double* dense) {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t j = 0;
  for (; j + 4 <= nnz; j += 4) {
    s0 += values[j] * dense[indices[j]];
    s1 += values[j + 1] * dense[indices[j + 1]];
    s2 += values[j + 2] * dense[indices[j + 2]];
    s3 += values[j + 3] * dense[indices[j + 3]];
  }
  double total = (s0 + s1) + (s2 + s3);
  for (; j < nnz; ++j) total += values[j] * dense[indices[j]];
  return total;
}

void scatter_axpy_scalar(double alpha, const double* values,
                         const std::uint32_t* indices, std::size_t nnz,
                         double* dense) {
  for (std::size_t j = 0; j < nnz; ++j) {
    dense[indices[j]] += alpha * values[j];
  }
}

double squared_error_sum_scalar(const double* a, const double* b,
                                std::size_t n) {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const double d0 = a[i] - b[i];
    const double d1 = a[i + 1] - b[i + 1];
    const double d2 = a[i + 2] - b[i + 2];
    const double d3 = a[i + 3] - b[i + 3];
    s0 += d0 * d0;
    s1 += d1 * d1;
    s2 += d2 * d2;
    s3 += d3 * d3;
  }
  double total = (s0 + s1) + (s2 + s3);
  for (; i < n; ++i) {
    const double d = a[i] - b[i];
    total += d * d;
  }
  return total;
}

}  // namespace

const Ops& scalar_ops() {
  static const Ops table{
      sum_squares_scalar,
      scale_scalar,
      gather_dot_scalar,
      scatter_axpy_scalar,
      squared_error_sum_scalar,
  };
  return table;
}

}  // namespace mgtdetect::kernels
