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
using pfr::GeneratorMatrix;
using pfr::PrimeField;
using pfr::Residue;

TEST(Generator, BuiltCodesAreMdsByCofactorCheck) {
  const std::vector<std::tuple<std::size_t, std::size_t, std::uint32_t>> cases = {
      {2, 1, 2}, {3, 1, 2}, {3, 2, 2}, {4, 3, 2}, {5, 4, 2}, {4, 2, 3}, {4, 2, 5},
      {5, 3, 5}, {5, 2, 7}, {6, 3, 7}, {4, 1, 2}, {3, 2, 3}, {5, 1, 3},
  };
  for (auto [n, k, q] : cases) {
    const auto g = pfr::build_generator(n, k, q);
    EXPECT_EQ(g.n(), n);
    EXPECT_EQ(g.k(), k);
    EXPECT_TRUE(oracle::is_mds(g)) << n << "," << k << " over F_" << q;
    EXPECT_TRUE(pfr::verify_mds(g));
  }
}

TEST(Generator, NoTwoDimensionalFourColumnCodeOverF2) {
  // F_2^2 has three nonzero vectors, so four pairwise independent columns
  // cannot exist.
  EXPECT_THROW(pfr::build_generator(4, 2, 2), pfr::InfeasibleCode);
}

TEST(Generator, RejectsBadDimensions) {
  EXPECT_THROW(pfr::build_generator(3, 3, 2), std::invalid_argument);
  EXPECT_THROW(pfr::build_generator(3, 0, 2), std::invalid_argument);
  EXPECT_THROW(pfr::build_generator(3, 2, 4), pfr::FieldError);
}

TEST(Generator, PlantedSingularMinorIsRejected) {
  // Columns 2 and 4 are equal, so that 2x2 minor vanishes.
  const GeneratorMatrix g(PrimeField(5), FpMatrix(2, 4, {1, 1, 1, 1, 1, 2, 3, 2}));
  EXPECT_FALSE(oracle::is_mds(g));
  EXPECT_FALSE(pfr::verify_mds(g));
  const GeneratorMatrix zero_col(PrimeField(3), FpMatrix(1, 3, {1, 0, 2}));
  EXPECT_FALSE(pfr::verify_mds(zero_col));
}

TEST(Generator, RandomMatricesAgreeWithOracle) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    const std::uint32_t q = trial % 2 ? 3 : 5;
    const std::size_t k = 1 + trial % 3, n = k + 1 + trial % 2;
    std::vector<Residue> data(k * n);
    for (auto& x : data) x = static_cast<Residue>(rng() % q);
    const GeneratorMatrix g(PrimeField(q), FpMatrix(k, n, data));
    EXPECT_EQ(pfr::verify_mds(g), oracle::is_mds(g));
  }
}

TEST(Shards, EncodingIsTheColumnProjection) {
  const auto g = pfr::build_generator(5, 3, 7);
  const auto store = pfr::MessageStore::random(g.field(), 3, 10, 3, 99);
  const auto shards = pfr::encode_shards(store, g);
  ASSERT_EQ(shards.size(), 5U);
  for (std::size_t db = 0; db < 5; ++db) {
    EXPECT_EQ(shards[db].db_index(), db);
    for (std::size_t m = 0; m < 3; ++m) {
      for (std::size_t t = 0; t < 10; ++t) {
        std::int64_t acc = 0;
        for (std::size_t j = 0; j < 3; ++j) acc += std::int64_t{store.segment(m, t)[j]} * g.matrix()(j, db);
        EXPECT_EQ(shards[db].at(m, t), oracle::mod(acc, 7));
      }
    }
  }
}

TEST(Shards, AnyKDatabasesRecoverEverySegment) {
  const auto g = pfr::build_generator(4, 2, 5);
  const auto store = pfr::MessageStore::random(g.field(), 2, 6, 2, 5);
  const auto shards = pfr::encode_shards(store, g);
  for (std::size_t a = 0; a < 4; ++a) {
    for (std::size_t b = a + 1; b < 4; ++b) {
      for (std::size_t m = 0; m < 2; ++m) {
        for (std::size_t t = 0; t < 6; ++t) {
          const std::vector<pfr::Projection> ps{{b, shards[b].at(m, t)}, {a, shards[a].at(m, t)}};
          const auto w = pfr::decode_segment(ps, g);
          EXPECT_TRUE(std::equal(w.begin(), w.end(), store.segment(m, t).begin()));
        }
      }
    }
  }
}

TEST(Shards, DecodeRejectsBadProjectionSets) {
  const auto g = pfr::build_generator(3, 2, 3);
  const std::vector<pfr::Projection> dup{{1, 0}, {1, 0}};
  EXPECT_THROW(pfr::decode_segment(dup, g), std::invalid_argument);
  const std::vector<pfr::Projection> one{{0, 1}};
  EXPECT_THROW(pfr::decode_segment(one, g), pfr::DimensionMismatch);
  const GeneratorMatrix bad(PrimeField(3), FpMatrix(2, 3, {1, 1, 0, 1, 1, 1}));
  const std::vector<pfr::Projection> sing{{0, 1}, {1, 2}};
  EXPECT_THROW(pfr::decode_segment(sing, bad), pfr::SingularSystem);
}

TEST(Shards, StoreAndGeneratorMustAgree) {
  const auto g = pfr::build_generator(3, 2, 3);
  EXPECT_THROW(pfr::encode_shards(pfr::MessageStore(PrimeField(3), 1, 2, 3), g), pfr::DimensionMismatch);
  EXPECT_THROW(pfr::encode_shards(pfr::MessageStore(PrimeField(5), 1, 2, 2), g), pfr::DimensionMismatch);
}

TEST(ShardWire, RoundTripAndLayout) {
  const auto g = pfr::build_generator(3, 2, 3);
  const auto store = pfr::MessageStore::random(g.field(), 2, 9, 2, 1);
  for (const auto& shard : pfr::encode_shards(store, g)) {
    const auto bytes = pfr::encode_shard(shard);
    EXPECT_EQ(bytes.size(), 28U + 2 * 9);
    EXPECT_EQ(bytes[0], 0x50);  // little-endian magic
    EXPECT_EQ(bytes[24], shard.db_index() + 1);
    EXPECT_EQ(pfr::decode_shard(bytes), shard);
  }
}

TEST(ShardWire, MalformedInputIsRejected) {
  const auto g = pfr::build_generator(3, 2, 3);
  const auto shard = pfr::encode_shards(pfr::MessageStore::random(g.field(), 1, 3, 2, 1), g)[0];
  auto bytes = pfr::encode_shard(shard);
  auto bad_magic = bytes;
  bad_magic[0] ^= 1;
  EXPECT_THROW(pfr::decode_shard(bad_magic), pfr::wire::DecodeError);
  auto truncated = bytes;
  truncated.pop_back();
  EXPECT_THROW(pfr::decode_shard(truncated), pfr::wire::DecodeError);
  auto trailing = bytes;
  trailing.push_back(0);
  EXPECT_THROW(pfr::decode_shard(trailing), pfr::wire::DecodeError);
  auto out_of_field = bytes;
  out_of_field.back() = 3;
  EXPECT_THROW(pfr::decode_shard(out_of_field), pfr::wire::DecodeError);
}

}  // namespace
