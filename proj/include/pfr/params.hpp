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
#include <stdexcept>
#include <string>

#include "pfr/field.hpp"

namespace pfr {

class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// (N, K) code, M messages over F_q, and everything derived from them.
/// Block and round numbers are 1-based throughout, as are the R_B counts.
struct SchemeParams {
  std::size_t n = 0;
  std::size_t k = 0;
  std::size_t m = 0;
  std::uint32_t q = 0;
  std::size_t v = 0;  // number of combination vectors, (q^M - 1)/(q - 1)

  // Rejects q composite, K >= N, and V too large to enumerate.
  static SchemeParams make(std::size_t n, std::size_t k, std::size_t m, std::uint32_t q) {
    if (!is_prime(q)) throw ParameterError("q=" + std::to_string(q) + " is not prime");
    if (k < 1 || k >= n) {
      throw ParameterError("need 1 <= K < N (got N=" + std::to_string(n) + ", K=" + std::to_string(k) +
                           "); K = N has no finite rate");
    }
    if (m < 1) throw ParameterError("need M >= 1");
    const BigInt vbig = (big_pow(q, m) - 1) / (q - 1);
    if (vbig > 4096) throw ParameterError("V=" + vbig.str() + " is too large to enumerate");
    SchemeParams p{n, k, m, q, static_cast<std::size_t>(vbig)};
    return p;
  }

  std::size_t neighbors() const { return n - k; }  // Nb

  BigInt segments_big() const { return big_pow(n, v); }
  BigInt length_big() const { return segments_big() * k; }

  /// R_B = K^(V-B) (N-K)^(B-1).
  BigInt repetitions_big(std::size_t block) const {
    return big_pow(k, v - block) * big_pow(n - k, block - 1);
  }

  /// True when a session (Ltilde = N^V slots) fits in memory and the type
  /// bitmasks fit in 64 bits.
  bool materializable(std::uint64_t max_segments = std::uint64_t{1} << 22) const {
    return v <= 62 && segments_big() <= max_segments;
  }

  void require_materializable() const {
    if (!materializable()) {
      throw ParameterError("N^V = " + segments_big().str() +
                           " slots is too large to generate a query session");
    }
  }

  std::uint64_t segments() const { return static_cast<std::uint64_t>(segments_big()); }
  std::uint64_t length() const { return segments() * k; }
  std::uint64_t repetitions(std::size_t block) const { return static_cast<std::uint64_t>(repetitions_big(block)); }

  Rational code_rate() const { return Rational(BigInt(k), BigInt(n)); }

  std::string describe() const {
    return "N=" + std::to_string(n) + " K=" + std::to_string(k) + " M=" + std::to_string(m) +
           " q=" + std::to_string(q) + " V=" + std::to_string(v);
  }

  bool operator==(const SchemeParams&) const = default;
};

}  // namespace pfr
