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

#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

// Dense vector kernels behind a runtime-selected backend.
//
// Every backend produces bit-identical results to the scalar reference:
// elementwise kernels vectorize across independent lanes, and `dot` uses a
// fixed 4-lane partial-sum order ((s0 + s1) + (s2 + s3), then the tail in
// index order) that the scalar code reproduces exactly. The build disables
// FMA contraction so no backend fuses multiply-adds.

namespace scgp::kernels {

enum class Backend { scalar, avx2, neon };

struct KernelTable {
  Backend backend;
  const char* name;
  // y[i] += alpha * x[i]
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // x[i] *= alpha
  void (*scale)(double alpha, double* x, std::size_t n);
  double (*dot)(const double* x, const double* y, std::size_t n);
  // x[i] = x[i] > 0 ? x[i] : +0.0
  void (*relu)(double* x, std::size_t n);
};

/// Whether the backend was compiled in and the running CPU supports it.
bool supported(Backend b);
std::vector<Backend> available_backends();

/// Table for a specific backend; throws InvalidArgument if unsupported.
const KernelTable& table(Backend b);

/// Currently selected table. Defaults to the best supported backend, or the
/// one named by the SCGP_KERNELS environment variable (scalar|avx2|neon).
const KernelTable& active();
void set_active(Backend b);

Backend parse_backend(std::string_view name);
std::string_view backend_name(Backend b);

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  active().axpy(alpha, x.data(), y.data(), x.size() < y.size() ? x.size() : y.size());
}
inline void scale(double alpha, std::span<double> x) { active().scale(alpha, x.data(), x.size()); }
inline double dot(std::span<const double> x, std::span<const double> y) {
  return active().dot(x.data(), y.data(), x.size() < y.size() ? x.size() : y.size());
}
inline void relu(std::span<double> x) { active().relu(x.data(), x.size()); }

}  // namespace scgp::kernels
