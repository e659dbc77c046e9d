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

namespace scgp::kernels::detail {

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n);
void scale_scalar(double alpha, double* x, std::size_t n);
double dot_scalar(const double* x, const double* y, std::size_t n);
void relu_scalar(double* x, std::size_t n);

#if defined(SCGP_HAVE_AVX2)
void axpy_avx2(double alpha, const double* x, double* y, std::size_t n);
void scale_avx2(double alpha, double* x, std::size_t n);
double dot_avx2(const double* x, const double* y, std::size_t n);
void relu_avx2(double* x, std::size_t n);
#endif

#if defined(SCGP_HAVE_NEON)
void axpy_neon(double alpha, const double* x, double* y, std::size_t n);
void scale_neon(double alpha, double* x, std::size_t n);
double dot_neon(const double* x, const double* y, std::size_t n);
void relu_neon(double* x, std::size_t n);
#endif

}  // namespace scgp::kernels::detail
