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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "mgtdetect/kernels.hpp"
#include "mgtdetect/rng.hpp"

using mgtdetect::SplitMix64;
namespace kernels = mgtdetect::kernels;

namespace {

std::vector<double> random_vector(SplitMix64& rng, std::size_t n) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.next_double() * 2.0 - 1.0;
  return v;
}

// Distinct indices into a dense array of the given size, unsorted on purpose.
std::vector<std::uint32_t> random_indices(SplitMix64& rng, std::size_t nnz,
                                          std::size_t dense_size) {
  std::vector<std::uint32_t> all(dense_size);
  std::iota(all.begin(), all.end(), 0u);
  mgtdetect::shuffle(all, rng);
  all.resize(nnz);
  return all;
}

long double sum_squares_ref(const std::vector<double>& x) {
  long double s = 0;
  for (double v : x) s += static_cast<long double>(v) * v;
  return s;
}

}  // namespace

TEST_CASE("scalar reductions match a long double reference") {
  SplitMix64 rng(41);
  const auto& k = kernels::ops(kernels::Backend::scalar);
  for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 17u, 64u, 1001u}) {
    auto x = random_vector(rng, n);
    auto y = random_vector(rng, n);
    CHECK(k.sum_squares(x.data(), n) ==
          doctest::Approx(static_cast<double>(sum_squares_ref(x)))
              .epsilon(1e-13));
    long double se = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const long double d = static_cast<long double>(x[i]) - y[i];
      se += d * d;
    }
    CHECK(k.squared_error_sum(x.data(), y.data(), n) ==
          doctest::Approx(static_cast<double>(se)).epsilon(1e-13));
  }
}

TEST_CASE("gather_dot and scatter_axpy agree with naive loops") {
  SplitMix64 rng(42);
  const auto& k = kernels::ops(kernels::Backend::scalar);
  for (std::size_t nnz : {0u, 1u, 4u, 7u, 33u}) {
    const std::size_t dense_size = 64;
    auto dense = random_vector(rng, dense_size);
    auto values = random_vector(rng, nnz);
    auto indices = random_indices(rng, nnz, dense_size);

    long double dot = 0;
    for (std::size_t j = 0; j < nnz; ++j) {
      dot += static_cast<long double>(values[j]) * dense[indices[j]];
    }
    CHECK(k.gather_dot(values.data(), indices.data(), nnz, dense.data()) ==
          doctest::Approx(static_cast<double>(dot)).epsilon(1e-13));

    auto updated = dense;
    k.scatter_axpy(0.25, values.data(), indices.data(), nnz, updated.data());
    std::vector<double> expected = dense;
    for (std::size_t j = 0; j < nnz; ++j) {
      expected[indices[j]] += 0.25 * values[j];
    }
    CHECK(updated == expected);
  }
}

TEST_CASE("scale multiplies every element") {
  const auto& k = kernels::ops(kernels::Backend::scalar);
  std::vector<double> x{1.0, -2.0, 3.5, 0.0, 8.25};
  k.scale(x.data(), x.size(), 0.5);
  CHECK(x == std::vector<double>{0.5, -1.0, 1.75, 0.0, 4.125});
}

TEST_CASE("AVX2 backend is bit-identical to the scalar reference") {
  if (!kernels::backend_available(kernels::Backend::avx2)) {
    MESSAGE("AVX2 not available on this host; skipping equivalence checks");
    return;
  }
  const auto& scalar = kernels::ops(kernels::Backend::scalar);
  const auto& avx2 = kernels::ops(kernels::Backend::avx2);
  SplitMix64 rng(43);

  // Sizes straddling the 4-wide block boundary, plus larger runs.
  for (std::size_t n = 0; n <= 67; ++n) {
    auto x = random_vector(rng, n);
    auto y = random_vector(rng, n);
    CHECK(scalar.sum_squares(x.data(), n) == avx2.sum_squares(x.data(), n));
    CHECK(scalar.squared_error_sum(x.data(), y.data(), n) ==
          avx2.squared_error_sum(x.data(), y.data(), n));

    auto xs = x;
    auto xa = x;
    scalar.scale(xs.data(), n, 1.0 / 3.0);
    avx2.scale(xa.data(), n, 1.0 / 3.0);
    CHECK(xs == xa);
  }

  for (std::size_t trial = 0; trial < 200; ++trial) {
    const std::size_t dense_size = 1 + rng.next_below(256);
    const std::size_t nnz = rng.next_below(dense_size + 1);
    auto dense = random_vector(rng, dense_size);
    auto values = random_vector(rng, nnz);
    auto indices = random_indices(rng, nnz, dense_size);
    CHECK(scalar.gather_dot(values.data(), indices.data(), nnz,
                            dense.data()) ==
          avx2.gather_dot(values.data(), indices.data(), nnz, dense.data()));

    auto ds = dense;
    auto da = dense;
    scalar.scatter_axpy(-0.75, values.data(), indices.data(), nnz, ds.data());
    avx2.scatter_axpy(-0.75, values.data(), indices.data(), nnz, da.data());
    CHECK(ds == da);
  }
}

TEST_CASE("backend selection is sticky and reversible") {
  const kernels::Backend before = kernels::active_backend();
  kernels::select(kernels::Backend::scalar);
  CHECK(kernels::active_backend() == kernels::Backend::scalar);
  CHECK(kernels::backend_name(kernels::Backend::scalar) == "scalar");
  if (kernels::backend_available(kernels::Backend::avx2)) {
    kernels::select(kernels::Backend::avx2);
    CHECK(kernels::active_backend() == kernels::Backend::avx2);
  }
  kernels::select(before);
}
