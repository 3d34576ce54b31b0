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


#include <random>

#include <gtest/gtest.h>

#include "test_support.hpp"

namespace {

using pfr::FpMatrix;
using pfr::PrimeField;
using pfr::Residue;

TEST(PrimeField, RejectsCompositeAndTrivialModuli) {
  for (std::uint32_t q : {0U, 1U, 4U, 9U, 15U, 49U}) EXPECT_THROW(PrimeField{q}, pfr::FieldError) << q;
  for (std::uint32_t q : {2U, 3U, 5U, 7U, 65521U}) EXPECT_NO_THROW(PrimeField{q}) << q;
}

TEST(PrimeField, ArithmeticMatchesIntegerReference) {
  for (std::uint32_t q : {2U, 3U, 5U, 7U, 13U}) {
    const PrimeField f(q);
    for (std::int64_t a = 0; a < q; ++a) {
      EXPECT_EQ(f.neg(a), oracle::mod(-a, q));
      if (a != 0) {
        EXPECT_EQ(f.inv(a), oracle::inv(a, q));
      }
      for (std::int64_t b = 0; b < q; ++b) {
        EXPECT_EQ(f.add(a, b), oracle::mod(a + b, q));
        EXPECT_EQ(f.sub(a, b), oracle::mod(a - b, q));
        EXPECT_EQ(f.mul(a, b), oracle::mod(a * b, q));
      }
    }
    EXPECT_THROW(f.inv(0), pfr::FieldError);
    EXPECT_EQ(f.reduce(-1), q - 1);
    EXPECT_EQ(f.sign(-1), f.reduce(-1));
    EXPECT_EQ(f.sign(+1), 1U % q);
  }
}

TEST(PrimeField, PowerAgreesWithRepeatedProduct) {
  const PrimeField f(11);
  for (Residue a = 0; a < 11; ++a) {
    std::int64_t acc = 1;
    for (std::uint64_t e = 0; e < 25; ++e) {
      EXPECT_EQ(f.pow(a, e), acc);
      acc = oracle::mod(acc * a, 11);
    }
  }
}

TEST(FieldElement, MixingFieldsThrows) {
  const pfr::FieldElement a(PrimeField(3), 2), b(PrimeField(5), 2);
  EXPECT_THROW(a + b, pfr::FieldError);
  EXPECT_THROW(a * b, pfr::FieldError);
  EXPECT_THROW(a - b, pfr::FieldError);
  EXPECT_FALSE(a == b);
}

TEST(FieldElement, OperatorsStayInField) {
  const PrimeField f(7);
  const pfr::FieldElement a(f, 5), b(f, -3);
  EXPECT_EQ(b.value(), 4U);
  EXPECT_EQ((a + b).value(), 2U);
  EXPECT_EQ((a - b).value(), 1U);
  EXPECT_EQ((a * b).value(), 6U);
  EXPECT_EQ((-a).value(), 2U);
  EXPECT_EQ((a * a.inverse()).value(), 1U);
  EXPECT_EQ(pfr::fp_add(a, b), a + b);
  EXPECT_EQ(pfr::fp_mul(a, pfr::fp_inv(a)), pfr::FieldElement(f, 1));
}

TEST(BigNumbers, BinomialMatchesPascal) {
  for (std::int64_t n = 0; n < 30; ++n) {
    for (std::int64_t k = -1; k <= n + 1; ++k) EXPECT_EQ(pfr::binomial(n, k), oracle::binom(n, k)) << n << " " << k;
  }
  EXPECT_EQ(pfr::big_pow(3, 40).str(), "12157665459056928801");
}

TEST(BigNumbers, RationalPrinting) {
  EXPECT_EQ(pfr::to_string(pfr::Rational(6, 10)), "3/5");
  EXPECT_EQ(pfr::to_string(pfr::Rational(4, 2)), "2");
}

FpMatrix random_matrix(std::mt19937_64& rng, std::size_t r, std::size_t c, std::uint32_t q) {
  FpMatrix m(r, c);
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < c; ++j) m(i, j) = static_cast<Residue>(rng() % q);
  }
  return m;
}

std::vector<std::vector<std::int64_t>> to_rows(const FpMatrix& m) {
  std::vector<std::vector<std::int64_t>> out(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) out[i].assign(m.row(i).begin(), m.row(i).end());
  return out;
}

TEST(Linalg, DeterminantMatchesCofactorExpansion) {
  std::mt19937_64 rng(42);
  for (std::uint32_t q : {2U, 3U, 5U, 7U}) {
    const PrimeField f(q);
    for (int trial = 0; trial < 200; ++trial) {
      const std::size_t n = 1 + trial % 5;
      const auto m = random_matrix(rng, n, n, q);
      EXPECT_EQ(pfr::determinant(f, m), oracle::det(to_rows(m), q));
    }
  }
}

TEST(Linalg, InverseExistsExactlyWhenDeterminantIsNonzero) {
  std::mt19937_64 rng(7);
  const PrimeField f(5);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + trial % 4;
    const auto m = random_matrix(rng, n, n, 5);
    const auto inv = pfr::inverse(f, m);
    ASSERT_EQ(inv.has_value(), oracle::det(to_rows(m), 5) != 0);
    if (!inv) continue;
    // m * inv == I, column by column.
    for (std::size_t c = 0; c < n; ++c) {
      std::vector<Residue> col(n);
      for (std::size_t r = 0; r < n; ++r) col[r] = (*inv)(r, c);
      const auto e = pfr::multiply(f, m, col);
      for (std::size_t r = 0; r < n; ++r) EXPECT_EQ(e[r], r == c ? 1U : 0U);
    }
  }
}

TEST(Linalg, RankOfKnownMatrices) {
  const PrimeField f(2);
  EXPECT_EQ(pfr::rank(f, FpMatrix(3, 3, {1, 1, 0, 0, 1, 1, 1, 0, 1})), 2U);  // rows sum to zero over F_2
  EXPECT_EQ(pfr::rank(PrimeField(3), FpMatrix(3, 3, {1, 1, 0, 0, 1, 1, 1, 0, 1})), 3U);
  EXPECT_EQ(pfr::rank(f, FpMatrix(2, 4)), 0U);
}

TEST(Linalg, ExpressInRowsReconstructsTarget) {
  std::mt19937_64 rng(3);
  const std::uint32_t q = 7;
  const PrimeField f(q);
  for (int trial = 0; trial < 100; ++trial) {
    const auto basis = random_matrix(rng, 3, 6, q);
    std::vector<Residue> c(3);
    for (auto& x : c) x = static_cast<Residue>(rng() % q);
    std::vector<Residue> target(6, 0);
    for (std::size_t i = 0; i < 3; ++i) {
      for (std::size_t j = 0; j < 6; ++j) target[j] = f.add(target[j], f.mul(c[i], basis(i, j)));
    }
    const auto got = pfr::express_in_rows(f, basis, target);
    ASSERT_TRUE(got.has_value());
    std::vector<Residue> back(6, 0);
    for (std::size_t i = 0; i < 3; ++i) {
      for (std::size_t j = 0; j < 6; ++j) back[j] = f.add(back[j], f.mul((*got)[i], basis(i, j)));
    }
    EXPECT_EQ(back, target);

    FpMatrix targets(1, 6, target);
    const auto multi = pfr::express_rows(f, basis, targets);
    ASSERT_TRUE(multi.has_value());
    EXPECT_EQ(multi->size(), 1U);
  }
}

TEST(Linalg, ExpressInRowsRejectsOutsideTheSpan) {
  const PrimeField f(3);
  const FpMatrix basis(2, 3, {1, 0, 0, 0, 1, 0});
  const std::vector<Residue> target{0, 0, 1};
  EXPECT_FALSE(pfr::express_in_rows(f, basis, target).has_value());
  EXPECT_FALSE(pfr::express_rows(f, basis, FpMatrix(1, 3, {1, 2, 1})).has_value());
  EXPECT_THROW(pfr::express_in_rows(f, basis, std::vector<Residue>{1, 0}), std::invalid_argument);
}

}  // namespace
