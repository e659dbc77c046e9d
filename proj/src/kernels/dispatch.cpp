// Copyright 2026 The SCGP Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <string>

#include "kernel_impls.hpp"
#include "scgp/error.hpp"
#include "scgp/kernels.hpp"

namespace scgp::kernels {

namespace {

constexpr KernelTable kScalar{Backend::scalar, "scalar", detail::axpy_scalar, detail::scale_scalar,
                              detail::dot_scalar, detail::relu_scalar};
#if defined(SCGP_HAVE_AVX2)
constexpr KernelTable kAvx2{Backend::avx2, "avx2", detail::axpy_avx2, detail::scale_avx2,
                            detail::dot_avx2, detail::relu_avx2};
#endif
#if defined(SCGP_HAVE_NEON)
constexpr KernelTable kNeon{Backend::neon, "neon", detail::axpy_neon, detail::scale_neon,
                            detail::dot_neon, detail::relu_neon};
#endif

const KernelTable* select_default() {
  if (const char* env = std::getenv("SCGP_KERNELS"); env != nullptr && *env != '\0') {
    try {
      return &table(parse_backend(env));
    } catch (const InvalidArgument& e) {
      std::fprintf(stderr, "scgp: warning: SCGP_KERNELS ignored: %s\n", e.what());
    }
  }
  for (Backend b : {Backend::avx2, Backend::neon}) {
    if (supported(b)) return &table(b);
  }
  return &kScalar;
}

std::atomic<const KernelTable*>& current() {
  static std::atomic<const KernelTable*> ptr{select_default()};
  return ptr;
}

}  // namespace

bool supported(Backend b) {
  switch (b) {
    case Backend::scalar:
      return true;
    case Backend::avx2:
#if defined(SCGP_HAVE_AVX2)
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
    case Backend::neon:
#if defined(SCGP_HAVE_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

std::vector<Backend> available_backends() {
  std::vector<Backend> out;
  for (Backend b : {Backend::scalar, Backend::avx2, Backend::neon}) {
    if (supported(b)) out.push_back(b);
  }
  return out;
}

const KernelTable& table(Backend b) {
  if (!supported(b)) {
    throw InvalidArgument("kernel backend '" + std::string(backend_name(b)) +
                          "' is not available on this machine");
  }
  switch (b) {
#if defined(SCGP_HAVE_AVX2)
    case Backend::avx2:
      return kAvx2;
#endif
#if defined(SCGP_HAVE_NEON)
    case Backend::neon:
      return kNeon;
#endif
    default:
      return kScalar;
  }
}

const KernelTable& active() { return *current().load(std::memory_order_acquire); }

void set_active(Backend b) { current().store(&table(b), std::memory_order_release); }

Backend parse_backend(std::string_view name) {
  if (name == "scalar") return Backend::scalar;
  if (name == "avx2") return Backend::avx2;
  if (name == "neon") return Backend::neon;
  throw InvalidArgument("unknown kernel backend '" + std::string(name) + "' (scalar|avx2|neon)");
}

std::string_view backend_name(Backend b) {
  switch (b) {
    case Backend::scalar:
      return "scalar";
    case Backend::avx2:
      return "avx2";
    case Backend::neon:
      return "neon";
  }
  return "unknown";
}

}  // namespace scgp::kernels
