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

#include "scgp/modular_group.hpp"

#include <limits>
#include <numeric>

#include "scgp/error.hpp"

namespace scgp {

namespace {

std::uint64_t checked_mul(std::uint64_t x, std::uint64_t y) {
  std::uint64_t out = 0;
  if (__builtin_mul_overflow(x, y, &out)) {
    throw InvalidArgument("modulus too large: group order overflows 64 bits");
  }
  return out;
}

std::uint32_t reduce(std::int64_t v, std::uint32_t n) {
  std::int64_t r = v % static_cast<std::int64_t>(n);
  if (r < 0) r += n;
  return static_cast<std::uint32_t>(r);
}

}  // namespace

Modulus::Modulus(std::uint64_t n) {
  if (n < 2) throw InvalidArgument("modulus must be >= 2, got " + std::to_string(n));
  if (n > std::numeric_limits<std::uint32_t>::max()) {
    throw InvalidArgument("modulus must fit in 32 bits, got " + std::to_string(n));
  }
  n_ = static_cast<std::uint32_t>(n);
}

std::vector<PrimePower> factorize(std::uint32_t n) {
  std::vector<PrimePower> out;
  std::uint64_t rest = n;
  for (std::uint64_t p = 2; p * p <= rest; ++p) {
    if (rest % p != 0) continue;
    PrimePower pp{static_cast<std::uint32_t>(p), 0};
    while (rest % p == 0) {
      rest /= p;
      ++pp.exponent;
    }
    out.push_back(pp);
  }
  if (rest > 1) out.push_back({static_cast<std::uint32_t>(rest), 1});
  return out;
}

std::uint32_t inverse_mod(std::uint32_t a, Modulus n) {
  std::int64_t old_r = a % n.value(), r = n.value();
  std::int64_t old_s = 1, s = 0;
  while (r != 0) {
    const std::int64_t q = old_r / r;
    old_r -= q * r;
    std::swap(old_r, r);
    old_s -= q * s;
    std::swap(old_s, s);
  }
  if (old_r != 1) {
    throw InvalidArgument(std::to_string(a) + " is not a unit mod " + std::to_string(n.value()));
  }
  return reduce(old_s, n.value());
}

Mat2 Mat2::make(std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t d, Modulus n) {
  const std::uint32_t m = n.value();
  std::array<std::uint32_t, 4> e{reduce(a, m), reduce(b, m), reduce(c, m), reduce(d, m)};
  const std::uint64_t ad = std::uint64_t{e[0]} * e[3] % m;
  const std::uint64_t bc = std::uint64_t{e[1]} * e[2] % m;
  if ((ad + m - bc) % m != 1 % m) {
    throw InvalidArgument("matrix (" + std::to_string(a) + "," + std::to_string(b) + ";" +
                          std::to_string(c) + "," + std::to_string(d) +
                          ") does not have determinant 1 mod " + std::to_string(m));
  }
  return Mat2(e, n);
}

Mat2 Mat2::identity(Modulus n) { return Mat2({1, 0, 0, 1}, n); }

std::string Mat2::to_string() const {
  return "(" + std::to_string(e_[0]) + "," + std::to_string(e_[1]) + ";" + std::to_string(e_[2]) +
         "," + std::to_string(e_[3]) + ")";
}

Mat2 mat_mul(const Mat2& x, const Mat2& y) {
  if (x.n_ != y.n_) {
    throw InvalidArgument("modulus mismatch in mat_mul: " + std::to_string(x.n_.value()) + " vs " +
                          std::to_string(y.n_.value()));
  }
  const std::uint64_t m = x.n_.value();
  const auto& p = x.e_;
  const auto& q = y.e_;
  auto dot = [m](std::uint64_t u0, std::uint64_t v0, std::uint64_t u1, std::uint64_t v1) {
    return static_cast<std::uint32_t>((u0 * v0 % m + u1 * v1 % m) % m);
  };
  return Mat2({dot(p[0], q[0], p[1], q[2]), dot(p[0], q[1], p[1], q[3]),
               dot(p[2], q[0], p[3], q[2]), dot(p[2], q[1], p[3], q[3])},
              x.n_);
}

Mat2 mat_inverse(const Mat2& x) {
  const std::uint32_t m = x.n_.value();
  auto neg = [m](std::uint32_t v) { return v == 0 ? 0u : m - v; };
  return Mat2({x.e_[3], neg(x.e_[1]), neg(x.e_[2]), x.e_[0]}, x.n_);
}

std::uint64_t group_order(Modulus n) {
  // n^3 * prod (p^2 - 1) / prod p^2, dividing first: prod p^2 divides n^3.
  const std::uint64_t m = n.value();
  std::uint64_t cube = checked_mul(checked_mul(m, m), m);
  std::uint64_t numer = 1;
  for (const auto& [p, e] : factorize(n.value())) {
    const std::uint64_t p2 = std::uint64_t{p} * p;
    if (cube % p2 != 0) throw InternalError("group_order: p^2 does not divide n^3");
    cube /= p2;
    numer = checked_mul(numer, p2 - 1);
  }
  return checked_mul(cube, numer);
}

std::uint64_t euler_phi(Modulus n) {
  std::uint64_t phi = n.value();
  for (const auto& pp : factorize(n.value())) phi = phi / pp.prime * (pp.prime - 1);
  return phi;
}

std::uint64_t coset_count(Modulus n) {
  const std::uint64_t order = group_order(n);
  const std::uint64_t phi = euler_phi(n);
  if (order % phi != 0) {
    throw InternalError("coset_count: |G| = " + std::to_string(order) +
                        " not divisible by phi(n) = " + std::to_string(phi));
  }
  return order / phi;
}

std::vector<Mat2> enumerate_group(Modulus n, std::uint32_t guard) {
  const std::uint32_t m = n.value();
  if (m > guard) {
    throw GuardExceeded("enumerate_group: n = " + std::to_string(m) + " exceeds guard " +
                        std::to_string(guard));
  }
  std::vector<Mat2> out;
  out.reserve(group_order(n));
  for (std::uint32_t a = 0; a < m; ++a)
    for (std::uint32_t b = 0; b < m; ++b)
      for (std::uint32_t c = 0; c < m; ++c)
        for (std::uint32_t d = 0; d < m; ++d) {
          if ((a * d + m * m - b * c) % m == 1 % m) out.push_back(Mat2::make(a, b, c, d, n));
        }
  return out;
}

std::size_t Mat2Hash::operator()(const Mat2& x) const noexcept {
  std::uint64_t h = x.modulus().value();
  for (std::uint32_t v : x.entries()) h = h * 0x100000001b3ULL ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
  return static_cast<std::size_t>(h);
}

}  // namespace scgp
