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

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace scgp {

/// The modulus n of the ring Z_n. Always n >= 2.
class Modulus {
 public:
  explicit Modulus(std::uint64_t n);

  [[nodiscard]] std::uint32_t value() const noexcept { return n_; }

  friend bool operator==(Modulus, Modulus) = default;
  friend auto operator<=>(Modulus, Modulus) = default;

 private:
  std::uint32_t n_;
};

struct PrimePower {
  std::uint32_t prime;
  std::uint32_t exponent;
};

/// Trial-division factorization, primes ascending.
std::vector<PrimePower> factorize(std::uint32_t n);

/// Inverse of a unit modulo n. Throws InvalidArgument if gcd(a, n) != 1.
std::uint32_t inverse_mod(std::uint32_t a, Modulus n);

/// A 2x2 matrix over Z_n with determinant 1.
///
/// Entries are kept as canonical residues in [0, n). Ordering is lexicographic
/// on (a, b, c, d); comparing matrices over different moduli orders by modulus
/// first.
class Mat2 {
 public:
  /// Reduces the entries mod n and checks det == 1 (mod n).
  static Mat2 make(std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t d, Modulus n);
  static Mat2 identity(Modulus n);

  [[nodiscard]] std::uint32_t a() const noexcept { return e_[0]; }
  [[nodiscard]] std::uint32_t b() const noexcept { return e_[1]; }
  [[nodiscard]] std::uint32_t c() const noexcept { return e_[2]; }
  [[nodiscard]] std::uint32_t d() const noexcept { return e_[3]; }
  [[nodiscard]] const std::array<std::uint32_t, 4>& entries() const noexcept { return e_; }
  [[nodiscard]] Modulus modulus() const noexcept { return n_; }

  friend bool operator==(const Mat2&, const Mat2&) = default;
  friend std::strong_ordering operator<=>(const Mat2& x, const Mat2& y) noexcept {
    if (auto cmp = x.n_ <=> y.n_; cmp != 0) return cmp;
    return x.e_ <=> y.e_;
  }

  [[nodiscard]] std::string to_string() const;

 private:
  friend Mat2 mat_mul(const Mat2&, const Mat2&);
  friend Mat2 mat_inverse(const Mat2&);
  Mat2(std::array<std::uint32_t, 4> e, Modulus n) : e_(e), n_(n) {}

  std::array<std::uint32_t, 4> e_;
  Modulus n_;
};

/// Matrix product x*y mod n. Throws InvalidArgument on modulus mismatch.
Mat2 mat_mul(const Mat2& x, const Mat2& y);

/// Adjugate inverse (d, -b; -c, a) mod n.
Mat2 mat_inverse(const Mat2& x);

/// |SL(2, Z_n)| = n^3 * prod_{p | n} (1 - 1/p^2), in exact integer arithmetic.
std::uint64_t group_order(Modulus n);

/// Euler's totient; also the order of the diagonal subgroup.
std::uint64_t euler_phi(Modulus n);

/// Index of the diagonal subgroup: group_order(n) / euler_phi(n).
std::uint64_t coset_count(Modulus n);

inline constexpr std::uint32_t kEnumerationGuard = 12;

/// Every element of SL(2, Z_n) in lexicographic (a, b, c, d) order.
/// Exhaustive over n^4 candidates, so n is limited to `guard`.
std::vector<Mat2> enumerate_group(Modulus n, std::uint32_t guard = kEnumerationGuard);

struct Mat2Hash {
  std::size_t operator()(const Mat2& m) const noexcept;
};

}  // namespace scgp
