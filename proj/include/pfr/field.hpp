// Copyright 2026 The pfrlab Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace pfr {

using BigInt = boost::multiprecision::cpp_int;
// Normalized on construction: denominator > 0, gcd(num, den) = 1.
using Rational = boost::multiprecision::cpp_rational;

/// Raw residue in [0, q). Bulk containers store these next to a PrimeField.
using Residue = std::uint32_t;

class FieldError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

constexpr bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  if (n % 2 == 0) return n == 2;
  for (std::uint64_t d = 3; d * d <= n; d += 2) {
    if (n % d == 0) return false;
  }
  return true;
}

/// Arithmetic context for F_q with q prime.
class PrimeField {
 public:
  explicit PrimeField(std::uint32_t q) : q_(q) {
    if (!is_prime(q)) {
      throw FieldError("field modulus " + std::to_string(q) + " is not prime");
    }
  }

  struct Unchecked {};
  static constexpr Unchecked unchecked{};
  PrimeField(std::uint32_t q, Unchecked) : q_(q) {}

  std::uint32_t modulus() const { return q_; }

  Residue reduce(std::int64_t v) const {
    auto r = v % static_cast<std::int64_t>(q_);
    return static_cast<Residue>(r < 0 ? r + q_ : r);
  }
  Residue add(Residue a, Residue b) const {
    std::uint64_t s = std::uint64_t{a} + b;
    return static_cast<Residue>(s >= q_ ? s - q_ : s);
  }
  Residue sub(Residue a, Residue b) const { return a >= b ? a - b : a + (q_ - b); }
  Residue neg(Residue a) const { return a == 0 ? 0 : q_ - a; }
  Residue mul(Residue a, Residue b) const {
    return static_cast<Residue>((std::uint64_t{a} * b) % q_);
  }
  Residue pow(Residue a, std::uint64_t e) const {
    Residue result = 1 % q_;
    while (e != 0) {
      if (e & 1U) result = mul(result, a);
      a = mul(a, a);
      e >>= 1U;
    }
    return result;
  }
  /// Fermat inverse; throws on zero.
  Residue inv(Residue a) const {
    if (a % q_ == 0) throw FieldError("inverse of zero requested");
    return pow(a, q_ - 2);
  }
  /// +1 or -1 realized in the field (q-1 for the negative sign).
  Residue sign(int s) const { return s >= 0 ? 1 % q_ : neg(1 % q_); }

  bool operator==(const PrimeField&) const = default;

 private:
  std::uint32_t q_;
};

/// A single element of F_q that carries its modulus, so mixing fields is an
/// error instead of silent garbage.
class FieldElement {
 public:
  FieldElement(const PrimeField& field, std::int64_t value)
      : q_(field.modulus()), value_(field.reduce(value)) {}

  std::uint32_t modulus() const { return q_; }
  Residue value() const { return value_; }
  PrimeField field() const { return field_ops(); }

  friend FieldElement operator+(const FieldElement& a, const FieldElement& b) {
    check_same(a, b);
    return {a.q_, a.field_ops().add(a.value_, b.value_)};
  }
  friend FieldElement operator-(const FieldElement& a, const FieldElement& b) {
    check_same(a, b);
    return {a.q_, a.field_ops().sub(a.value_, b.value_)};
  }
  friend FieldElement operator*(const FieldElement& a, const FieldElement& b) {
    check_same(a, b);
    return {a.q_, a.field_ops().mul(a.value_, b.value_)};
  }
  FieldElement operator-() const { return {q_, field_ops().neg(value_)}; }
  FieldElement inverse() const { return {q_, field_ops().inv(value_)}; }

  friend bool operator==(const FieldElement& a, const FieldElement& b) {
    return a.q_ == b.q_ && a.value_ == b.value_;
  }

  friend std::ostream& operator<<(std::ostream& os, const FieldElement& e) {
    return os << e.value_ << " (mod " << e.q_ << ")";
  }

 private:
  FieldElement(std::uint32_t q, Residue v) : q_(q), value_(v) {}

  // q_ was validated when the first element of this field was made.
  PrimeField field_ops() const { return PrimeField(q_, PrimeField::unchecked); }

  static void check_same(const FieldElement& a, const FieldElement& b) {
    if (a.q_ != b.q_) {
      throw FieldError("mismatched field contexts: F_" + std::to_string(a.q_) + " vs F_" +
                       std::to_string(b.q_));
    }
  }

  std::uint32_t q_;
  Residue value_;
};

inline FieldElement fp_add(const FieldElement& a, const FieldElement& b) { return a + b; }
inline FieldElement fp_mul(const FieldElement& a, const FieldElement& b) { return a * b; }
inline FieldElement fp_inv(const FieldElement& a) { return a.inverse(); }

inline BigInt big_pow(std::uint64_t base, std::uint64_t exp) {
  return boost::multiprecision::pow(BigInt(base), static_cast<unsigned>(exp));
}

inline BigInt binomial(std::int64_t n, std::int64_t k) {
  if (k < 0 || n < 0 || k > n) return 0;
  BigInt result = 1;
  for (std::int64_t i = 1; i <= k; ++i) {
    result = result * (n - k + i) / i;
  }
  return result;
}

inline std::string to_string(const Rational& r) {
  using boost::multiprecision::denominator;
  using boost::multiprecision::numerator;
  if (denominator(r) == 1) return numerator(r).str();
  return numerator(r).str() + "/" + denominator(r).str();
}

}  // namespace pfr
