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

#include <cstdlib>
#include <string>

#include "mgtdetect/common.hpp"
#include "mgtdetect/kernels.hpp"

namespace mgtdetect::kernels {

const Ops& scalar_ops();   // kernels_scalar.cpp
const Ops* avx2_ops();     // kernels_avx2.cpp; null when not compiled in

namespace {

bool cpu_has_avx2() {
#if defined(__GNUC__) && (defined(__x86_64__) || defined(__i386__))
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Backend pick_default() {
  if (const char* env = std::getenv("MGTDETECT_KERNELS")) {
    const std::string want(env);
    if (want == "scalar") return Backend::scalar;
    if (want == "avx2" && backend_available(Backend::avx2)) return Backend::avx2;
    // Unknown or unavailable value: fall through to auto detection.
  }
  return backend_available(Backend::avx2) ? Backend::avx2 : Backend::scalar;
}

Backend& current() {
  static Backend backend = pick_default();
  return backend;
}

}  // namespace

bool backend_available(Backend backend) {
  switch (backend) {
    case Backend::scalar:
      return true;
    case Backend::avx2:
      return avx2_ops() != nullptr && cpu_has_avx2();
  }
  return false;
}

const Ops& ops(Backend backend) {
  if (!backend_available(backend)) {
    throw UsageError("kernel backend not available: " + backend_name(backend));
  }
  return backend == Backend::avx2 ? *avx2_ops() : scalar_ops();
}

const Ops& active() { return ops(current()); }

Backend active_backend() { return current(); }

void select(Backend backend) {
  if (!backend_available(backend)) {
    throw UsageError("kernel backend not available: " + backend_name(backend));
  }
  current() = backend;
}

std::string backend_name(Backend backend) {
  return backend == Backend::avx2 ? "avx2" : "scalar";
}

}  // namespace mgtdetect::kernels
