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

using pfr::Rational;
using pfr::SchemeParams;

Rational frac(std::int64_t a, std::int64_t b) { return Rational(pfr::BigInt(a), pfr::BigInt(b)); }

TEST(Rates, WorkedExampleValues) {
  EXPECT_EQ(pfr::scheme_rate(3, 2, 2), frac(3, 5));
  EXPECT_EQ(pfr::virtual_pir_rate(SchemeParams::make(3, 2, 2, 2)), frac(9, 19));
  EXPECT_EQ(pfr::scheme_rate(2, 1, 2), frac(2, 3));
  EXPECT_EQ(pfr::scheme_rate(5, 3, 1), 1);
}

TEST(Rates, ClosedFormMatchesGeometricSum) {
  // (1 - R)/(1 - R^M) = 1 / (1 + R + ... + R^(M-1)) with R = K/N.
  for (std::int64_t n = 2; n <= 6; ++n) {
    for (std::int64_t k = 1; k < n; ++k) {
      for (std::int64_t m = 1; m <= 6; ++m) {
        std::int64_t num = 0;  // sum K^i N^(M-1-i)
        for (std::int64_t i = 0; i < m; ++i) num += oracle::ipow(k, i) * oracle::ipow(n, m - 1 - i);
        EXPECT_EQ(pfr::scheme_rate(n, k, m), frac(oracle::ipow(n, m - 1), num)) << n << k << m;
      }
    }
  }
}

TEST(Rates, SchemeNeverLosesToTheVirtualBaseline) {
  for (std::size_t n = 2; n <= 5; ++n) {
    for (std::size_t k = 1; k < n; ++k) {
      Rational prev = 2;
      for (std::size_t m = 1; m <= 4; ++m) {
        for (std::uint32_t q : {2U, 3U}) {
          const auto b = pfr::baseline_rates(SchemeParams::make(n, k, m, q));
          EXPECT_GE(b.scheme, b.baseline);
          EXPECT_EQ(b.equal, m == 1);
          EXPECT_EQ(b.ratio, b.scheme / b.baseline);
        }
        const auto r = pfr::scheme_rate(n, k, m);
        EXPECT_LT(r, prev);  // strictly decreasing in M
        EXPECT_GT(r, 1 - Rational(pfr::BigInt(k), pfr::BigInt(n)));
        prev = r;
      }
    }
  }
}

TEST(Rates, CountedRateEqualsClosedFormOnTheGrid) {
  for (auto [n, k, m, q] : std::vector<std::tuple<std::size_t, std::size_t, std::size_t, std::uint32_t>>{
           {2, 1, 2, 2}, {3, 2, 2, 2}, {3, 1, 3, 2}, {4, 3, 2, 2}, {4, 2, 2, 3}, {5, 3, 2, 5}, {3, 2, 3, 2}, {3, 2, 1, 2}}) {
    const auto p = SchemeParams::make(n, k, m, q);
    const auto r = pfr::rate_report(pfr::generate_query_set(p, p.v - 1));
    EXPECT_TRUE(r.consistent()) << p.describe() << ": " << r.first_violation.value_or("");
    EXPECT_EQ(r.achieved, pfr::scheme_rate(n, k, m));
    EXPECT_EQ(r.chain.size(), 10U);
    for (const auto& line : r.decoded_chain) EXPECT_EQ(line.value, Rational(r.length)) << line.label;
    const auto j = r.to_json();
    EXPECT_EQ(j["rate"], pfr::to_string(r.achieved));
    EXPECT_EQ(j["blocks"].size(), p.v);
  }
}

TEST(Rates, TamperedCountIsFlagged) {
  const auto p = SchemeParams::make(3, 2, 2, 2);
  auto c = pfr::census(pfr::generate_query_set(p, 0));
  c.downloaded += 1;
  const auto r = pfr::rate_report(p, c);
  EXPECT_FALSE(r.consistent());
  EXPECT_FALSE(r.to_json()["consistent"].get<bool>());
}

TEST(OuterBound, TwoMessageExamples) {
  EXPECT_EQ(pfr::outer_bound_v2(1, 2, 3, 2), frac(3, 5));  // independent messages
  EXPECT_EQ(pfr::outer_bound_v2(1, 1, 3, 2), 1);           // identical messages
  EXPECT_EQ(pfr::outer_bound_v2(1, 2, 2, 1), frac(2, 3));
  EXPECT_EQ(pfr::outer_bound_v2(2, 3, 4, 1), frac(8, 9));  // 4*2 / (1*3 + 2*3)
}

TEST(OuterBound, AgreesWithSchemeForIndependentMessages) {
  for (std::size_t n = 2; n <= 7; ++n) {
    for (std::size_t k = 1; k < n; ++k) EXPECT_EQ(pfr::outer_bound_v2(1, 2, n, k), pfr::scheme_rate(n, k, 2));
  }
}

TEST(OuterBound, RejectsImpossibleEntropies) {
  EXPECT_THROW(pfr::outer_bound_v2(0, 0, 3, 2), pfr::ParameterError);
  EXPECT_THROW(pfr::outer_bound_v2(2, 1, 3, 2), pfr::ParameterError);
  EXPECT_THROW(pfr::outer_bound_v2(1, 3, 3, 2), pfr::ParameterError);
  EXPECT_THROW(pfr::outer_bound_v2(1, 2, 3, 3), pfr::ParameterError);
}

// Random relabeling of rows and slots plus per-slot sign flips.
pfr::QueryMatrix disguise(const pfr::QueryMatrix& qm, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const pfr::PrimeField f(qm.q());
  const auto slot = pfr::make_index_assignment(seed, qm.segments());
  std::vector<std::size_t> order(qm.rows());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  pfr::QueryMatrix out(qm.q(), qm.messages(), qm.segments());
  for (auto r : order) {
    std::vector<pfr::Residue> dense(qm.width(), 0);
    for (const auto& e : qm.row(r)) {
      const auto m = e.column / qm.segments(), t = e.column % qm.segments();
      const pfr::Residue v = slot.signs[t] < 0 ? f.neg(e.value) : e.value;
      dense[m * qm.segments() + slot.permutation[t]] = v;
    }
    pfr::SparseRow row;
    for (std::size_t c = 0; c < dense.size(); ++c) {
      if (dense[c] != 0) row.push_back({c, dense[c]});
    }
    out.add_row(std::move(row));
  }
  return out;
}

TEST(Canonical, InvariantUnderRelabeling) {
  const auto p = SchemeParams::make(3, 2, 2, 3);
  const auto qs = pfr::generate_query_set(p, 2);
  const auto qm = pfr::lower_to_matrix(qs, 0, pfr::IndexAssignment::identity(p.segments())).matrix;
  pfr::Canonicalizer canon;
  const auto form = canon.canonical_form(qm);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) EXPECT_EQ(pfr::Canonicalizer().canonical_form(disguise(qm, seed)), form);
  EXPECT_GT(canon.memo_size(), 0U);
}

TEST(Canonical, DistinguishesDifferentStructures) {
  pfr::QueryMatrix a(3, 2, 3), b(3, 2, 3), c(3, 2, 3);
  a.add_row({{0, 1}, {4, 1}});  // w1[1] + w2[2]
  b.add_row({{0, 1}, {3, 1}});  // w1[1] + w2[1]
  c.add_row({{0, 1}, {3, 2}});  // w1[1] - w2[1]
  pfr::Canonicalizer canon;
  EXPECT_NE(canon.canonical_form(a), canon.canonical_form(b));
  EXPECT_NE(canon.canonical_form(b), canon.canonical_form(c));
  pfr::QueryMatrix flipped(3, 2, 3);
  flipped.add_row({{0, 2}, {3, 1}});  // -(w1[1] - w2[1]) is the same row up to a slot sign
  EXPECT_EQ(canon.canonical_form(c), canon.canonical_form(flipped));
  pfr::QueryMatrix moved(3, 2, 3);
  moved.add_row({{2, 1}, {5, 1}});
  EXPECT_EQ(canon.canonical_form(b), canon.canonical_form(moved));
}

TEST(Privacy, StructureIsIdenticalAcrossRequests) {
  for (auto [n, k, m, q] : std::vector<std::tuple<std::size_t, std::size_t, std::size_t, std::uint32_t>>{
           {3, 2, 2, 2}, {2, 1, 2, 2}, {4, 3, 2, 2}, {3, 2, 2, 3}, {3, 1, 2, 2}}) {
    const auto p = SchemeParams::make(n, k, m, q);
    const auto r = pfr::privacy_audit_structural(p);
    EXPECT_TRUE(r.structural_private) << p.describe() << ": " << r.first_difference.value_or("");
    for (const auto& fps : r.fingerprints) {
      ASSERT_EQ(fps.size(), p.v);
      for (auto f : fps) EXPECT_EQ(f, fps[0]);
    }
    EXPECT_TRUE(r.to_json()["structural_private"].get<bool>());
  }
}

TEST(Privacy, ControlWithoutSymmetryIsCaught) {
  const auto p = SchemeParams::make(3, 2, 2, 2);
  const auto r = pfr::privacy_audit_structural(p, pfr::GenerationOptions{false});
  EXPECT_FALSE(r.structural_private);
  EXPECT_TRUE(r.first_difference.has_value());
}

TEST(Privacy, SampledObservationsDoNotSeparateRequests) {
  const auto p = SchemeParams::make(3, 2, 2, 2);
  for (std::size_t nu = 1; nu < p.v; ++nu) {
    const auto r = pfr::privacy_audit_statistical(p, 0, nu, 300, 17);
    EXPECT_EQ(r.tv_per_db.size(), 3U);
    EXPECT_LT(r.max_tv, 0.1);
  }
}

TEST(Privacy, GenerationOrderLeaksUnderSampling) {
  const auto p = SchemeParams::make(3, 2, 2, 2);
  // Unsorted rows start with the requested singleton.
  const auto r = pfr::privacy_audit_statistical(p, 0, 1, 200, 3, pfr::RowOrder::Generation);
  EXPECT_GT(r.max_tv, 0.5);
  EXPECT_THROW(pfr::privacy_audit_statistical(p, 0, 1, 99), pfr::ParameterError);
}

}  // namespace
