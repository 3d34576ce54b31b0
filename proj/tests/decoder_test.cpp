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


#include <gtest/gtest.h>

#include "test_support.hpp"

namespace {

using pfr::DecodeFailure;
using pfr::SchemeParams;

struct Case {
  std::size_t n, k, m;
  std::uint32_t q;
};

const std::vector<Case> kCases = {{2, 1, 2, 2}, {3, 2, 2, 2}, {3, 1, 2, 2}, {4, 3, 2, 2}, {2, 1, 3, 2},
                                  {3, 2, 2, 3}, {4, 2, 2, 3}, {3, 2, 1, 2}, {3, 1, 2, 3}};

// K-vector content of an atom, sum_terms sign * sigma * v_theta . w[pi(t)].
std::vector<std::int64_t> oracle_content(const pfr::QueryAtom& a, const pfr::MessageStore& store,
                                         const pfr::IndexAssignment& asg) {
  const std::int64_t q = store.field().modulus();
  const auto v = oracle::combinations(q, store.messages());
  std::vector<std::int64_t> out(store.k(), 0);
  for (const auto& t : a.terms) {
    for (std::size_t m = 0; m < store.messages(); ++m) {
      const auto seg = store.segment(m, asg.permutation[t.slot]);
      for (std::size_t j = 0; j < store.k(); ++j) {
        out[j] = oracle::mod(out[j] + t.sign * asg.signs[t.slot] * v[t.combo][m] * seg[j], q);
      }
    }
  }
  return out;
}

// The requested virtual message, symbol by symbol.
std::vector<std::int64_t> oracle_target(const pfr::MessageStore& store, std::size_t nu) {
  const std::int64_t q = store.field().modulus();
  const auto v = oracle::combinations(q, store.messages())[nu];
  std::vector<std::int64_t> out;
  for (std::size_t t = 0; t < store.segments(); ++t) {
    for (std::size_t j = 0; j < store.k(); ++j) {
      std::int64_t acc = 0;
      for (std::size_t m = 0; m < store.messages(); ++m) acc += v[m] * store.segment(m, t)[j];
      out.push_back(oracle::mod(acc, q));
    }
  }
  return out;
}

struct Fixture {
  SchemeParams p;
  std::shared_ptr<const pfr::QuerySet> qs;
  pfr::GeneratorMatrix g;
  pfr::MessageStore store;
  std::vector<pfr::DatabaseShard> shards;
  pfr::UserClient user;

  Fixture(const Case& c, std::size_t nu, std::uint64_t seed)
      : p(SchemeParams::make(c.n, c.k, c.m, c.q)),
        qs(std::make_shared<const pfr::QuerySet>(pfr::generate_query_set(p, nu))),
        g(pfr::build_generator(c.n, c.k, c.q)),
        store(pfr::MessageStore::random(g.field(), p.m, p.segments(), p.k, seed)),
        shards(pfr::encode_shards(store, g)),
        user(qs, seed + 1, g) {}

  std::vector<pfr::AnswerString> answers() const {
    std::vector<pfr::AnswerString> out;
    for (std::size_t db = 0; db < p.n; ++db) out.push_back(pfr::evaluate_answers(shards[db], user.lowered(db).matrix));
    return out;
  }
};

TEST(Decoder, RecoversTheRequestedCombination) {
  for (const auto& c : kCases) {
    const auto v = SchemeParams::make(c.n, c.k, c.m, c.q).v;
    for (std::size_t nu = 0; nu < v; ++nu) {
      for (std::uint64_t seed : {1ULL, 2ULL}) {
        const Fixture fx(c, nu, seed);
        const auto got = fx.user.decode(fx.answers());
        const auto want = oracle_target(fx.store, nu);
        ASSERT_EQ(got.size(), want.size());
        EXPECT_TRUE(std::equal(got.begin(), got.end(), want.begin()))
            << fx.p.describe() << " nu=" << nu << " seed=" << seed;
      }
    }
  }
}

TEST(Decoder, EveryResolvedAtomHasItsTrueContent) {
  for (const auto& c : kCases) {
    const Fixture fx(c, SchemeParams::make(c.n, c.k, c.m, c.q).v - 1, 5);
    pfr::DecodeState state;
    const auto answers = fx.answers();
    for (std::size_t db = 0; db < fx.p.n; ++db) pfr::absorb_answers(state, fx.user.lowered(db), answers[db]);
    pfr::regenerate_redundant(state, *fx.qs);
    pfr::peel_decode(state, *fx.qs, fx.g, fx.user.assignment());
    EXPECT_EQ(state.resolved.size(), fx.qs->atoms().size() / fx.p.k);
    for (const auto& [origin, content] : state.resolved) {
      // Desired atoms are stored with their side information already stripped.
      auto a = fx.qs->atom(origin);
      if (a.side_info) a.terms = {*a.term_for(fx.qs->nu())};
      const auto want = oracle_content(a, fx.store, fx.user.assignment());
      EXPECT_TRUE(std::equal(content.begin(), content.end(), want.begin())) << fx.p.describe() << " atom " << origin;
    }
  }
}

TEST(Decoder, RegeneratedValuesMatchDirectEvaluation) {
  for (const auto& c : kCases) {
    const Fixture fx(c, 0, 9);
    pfr::DecodeState state;
    const auto answers = fx.answers();
    for (std::size_t db = 0; db < fx.p.n; ++db) pfr::absorb_answers(state, fx.user.lowered(db), answers[db]);
    const auto& regen = pfr::regenerate_redundant(state, *fx.qs);
    EXPECT_EQ(regen.size(), fx.qs->with_status(pfr::AtomStatus::Eliminated).size());
    for (const auto& [id, value] : regen) {
      const auto& a = fx.qs->atom(id);
      EXPECT_EQ(value, oracle::evaluate_atom(a, fx.store, fx.g, fx.user.assignment(), a.db)) << fx.p.describe();
    }
  }
}

TEST(Decoder, MissingDatabaseIsReported) {
  const Fixture fx({3, 2, 2, 2}, 2, 1);
  pfr::DecodeState state;
  const auto answers = fx.answers();
  for (std::size_t db = 0; db + 1 < fx.p.n; ++db) pfr::absorb_answers(state, fx.user.lowered(db), answers[db]);
  try {
    pfr::regenerate_redundant(state, *fx.qs);
    pfr::peel_decode(state, *fx.qs, fx.g, fx.user.assignment());
    FAIL() << "decode without DB3 should fail";
  } catch (const DecodeFailure& e) {
    EXPECT_EQ(e.kind(), DecodeFailure::Kind::MissingProjection);
  }
}

TEST(Decoder, MisfiledOrShortAnswersAreRejected) {
  const Fixture fx({3, 2, 2, 2}, 2, 1);
  auto answers = fx.answers();
  pfr::DecodeState state;
  try {
    pfr::absorb_answers(state, fx.user.lowered(0), answers[1]);
    FAIL();
  } catch (const DecodeFailure& e) {
    EXPECT_EQ(e.kind(), DecodeFailure::Kind::AnswerMismatch);
  }
  answers[0].values.pop_back();
  EXPECT_THROW(fx.user.decode(answers), DecodeFailure);
  answers.pop_back();
  EXPECT_THROW(fx.user.decode(answers), DecodeFailure);
}

TEST(Decoder, CorruptedAnswerChangesTheOutput) {
  const Fixture fx({3, 2, 2, 3}, 3, 4);
  auto answers = fx.answers();
  answers[1].values[0] = (answers[1].values[0] + 1) % 3;
  const auto got = fx.user.decode(answers);
  const auto want = oracle_target(fx.store, 3);
  EXPECT_FALSE(std::equal(got.begin(), got.end(), want.begin()));
}

TEST(Decoder, GeneratorMustMatchTheScheme) {
  const Fixture fx({3, 2, 2, 2}, 0, 1);
  pfr::DecodeState state;
  EXPECT_THROW(pfr::peel_decode(state, *fx.qs, pfr::build_generator(4, 3, 2), fx.user.assignment()),
               pfr::DimensionMismatch);
}

TEST(Decoder, PlaintextTargetLayout) {
  const pfr::PrimeField f(5);
  const auto store = pfr::MessageStore::random(f, 2, 4, 3, 3);
  const pfr::CombinationSpace space(5, 2);
  for (std::size_t nu = 0; nu < space.size(); ++nu) {
    const auto got = pfr::plaintext_target(store, space, nu);
    const auto want = oracle_target(store, nu);
    EXPECT_TRUE(std::equal(got.begin(), got.end(), want.begin(), want.end()));
  }
}

}  // namespace
