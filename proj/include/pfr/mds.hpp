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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pfr/field.hpp"
#include "pfr/linalg.hpp"

namespace pfr {

class InfeasibleCode : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// K x N generator matrix of an (N, K) code over F_q. Column n is g_n.
class GeneratorMatrix {
 public:
  GeneratorMatrix(PrimeField field, FpMatrix g) : field_(field), g_(std::move(g)) {}

  const PrimeField& field() const { return field_; }
  std::size_t k() const { return g_.rows(); }
  std::size_t n() const { return g_.cols(); }
  const FpMatrix& matrix() const { return g_; }

  std::vector<Residue> column(std::size_t db) const {
    std::vector<Residue> col(k());
    for (std::size_t r = 0; r < k(); ++r) col[r] = g_(r, db);
    return col;
  }

  /// K x K matrix whose row i is g_{dbs[i]}^T.
  FpMatrix projection_matrix(std::span<const std::size_t> dbs) const {
    return g_.select_columns(dbs).transposed();
  }

  /// Code rate K/N.
  Rational rate() const { return Rational(BigInt(k()), BigInt(n())); }

 private:
  PrimeField field_;
  FpMatrix g_;
};

/// Calls fn(columns) for every K-subset of [0, N) in lexicographic order; stops
/// early when fn returns false.
template <typename Fn>
bool for_each_subset(std::size_t n, std::size_t k, Fn&& fn) {
  std::vector<std::size_t> idx(k);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  while (true) {
    if (!fn(std::span<const std::size_t>(idx))) return false;
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == n - k + (i - 1)) --i;
    if (i == 0) return true;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

/// True iff every K x K column submatrix is invertible.
inline bool verify_mds(const GeneratorMatrix& g) {
  if (g.k() == 0 || g.k() > g.n()) return false;
  return for_each_subset(g.n(), g.k(), [&](std::span<const std::size_t> cols) {
    return determinant(g.field(), g.matrix().select_columns(cols)) != 0;
  });
}

namespace detail {

inline GeneratorMatrix vandermonde(const PrimeField& f, std::size_t n, std::size_t k) {
  // Nonzero points 1..N when they fit, otherwise 0..N-1; both are distinct.
  const std::uint32_t first = (n + 1 <= f.modulus()) ? 1 : 0;
  FpMatrix g(k, n);
  for (std::size_t c = 0; c < n; ++c) {
    for (std::size_t r = 0; r < k; ++r) g(r, c) = f.pow(f.reduce(first + c), r);
  }
  return {f, std::move(g)};
}

inline GeneratorMatrix single_parity(const PrimeField& f, std::size_t k) {
  FpMatrix g(k, k + 1);
  for (std::size_t r = 0; r < k; ++r) {
    g(r, r) = 1;
    g(r, k) = 1;
  }
  return {f, std::move(g)};
}

}  // namespace detail

/// Search budget for generators that have no algebraic construction.
struct GeneratorSearch {
  std::uint64_t exhaustive_limit_log2 = 24;  // exhaustive when q^(K N) <= 2^24
  std::uint64_t random_trials = 100000;
  std::uint64_t seed = 0x5eed;
};

/// Builds a verified (N, K) MDS generator: Vandermonde when q >= N, systematic
/// single parity when K = N - 1, otherwise a search. Throws InfeasibleCode.
inline GeneratorMatrix build_generator(std::size_t n, std::size_t k, std::uint32_t q,
                                       const GeneratorSearch& search = {}) {
  const PrimeField f(q);
  if (k < 1 || k >= n) {
    throw std::invalid_argument("build_generator requires 1 <= K < N (got N=" + std::to_string(n) +
                                ", K=" + std::to_string(k) + ")");
  }
  std::vector<GeneratorMatrix> candidates;
  if (q >= n) candidates.push_back(detail::vandermonde(f, n, k));
  if (k + 1 == n) candidates.push_back(detail::single_parity(f, k));
  for (auto& c : candidates) {
    if (verify_mds(c)) return c;
  }

  const std::size_t entries = k * n;
  const double log2_space = static_cast<double>(entries) * std::log2(static_cast<double>(q));
  if (log2_space <= static_cast<double>(search.exhaustive_limit_log2)) {
    std::vector<Residue> digits(entries, 0);
    while (true) {
      GeneratorMatrix g(f, FpMatrix(k, n, digits));
      if (verify_mds(g)) return g;
      std::size_t i = entries;
      while (i > 0 && digits[i - 1] == q - 1) digits[--i] = 0;
      if (i == 0) break;
      ++digits[i - 1];
    }
    throw InfeasibleCode("no (" + std::to_string(n) + "," + std::to_string(k) + ") MDS code exists over F_" +
                         std::to_string(q) + " (every K x N matrix was tried)");
  } else {
    std::mt19937_64 rng(search.seed);
    std::uniform_int_distribution<Residue> dist(0, q - 1);
    for (std::uint64_t t = 0; t < search.random_trials; ++t) {
      std::vector<Residue> digits(entries);
      for (auto& d : digits) d = dist(rng);
      GeneratorMatrix g(f, FpMatrix(k, n, std::move(digits)));
      if (verify_mds(g)) return g;
    }
  }
  throw InfeasibleCode("no (" + std::to_string(n) + "," + std::to_string(k) + ") MDS generator over F_" +
                       std::to_string(q) + " within the search budget");
}

/// M messages, each an Ltilde x K matrix of symbols (segment t of message m is
/// row t). Message length L = Ltilde * K.
class MessageStore {
 public:
  MessageStore(PrimeField field, std::size_t messages, std::size_t segments, std::size_t k)
      : field_(field), m_(messages), segments_(segments), k_(k), data_(messages * segments * k, 0) {}

  static MessageStore random(PrimeField field, std::size_t messages, std::size_t segments,
                             std::size_t k, std::uint64_t seed) {
    MessageStore store(field, messages, segments, k);
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<Residue> dist(0, field.modulus() - 1);
    for (auto& x : store.data_) x = dist(rng);
    return store;
  }

  const PrimeField& field() const { return field_; }
  std::size_t messages() const { return m_; }
  std::size_t segments() const { return segments_; }
  std::size_t k() const { return k_; }
  std::size_t length() const { return segments_ * k_; }

  std::span<const Residue> segment(std::size_t m, std::size_t t) const {
    check(m, t);
    return {data_.data() + (m * segments_ + t) * k_, k_};
  }
  std::span<Residue> segment(std::size_t m, std::size_t t) {
    check(m, t);
    return {data_.data() + (m * segments_ + t) * k_, k_};
  }

 private:
  void check(std::size_t m, std::size_t t) const {
    if (m >= m_ || t >= segments_) throw std::out_of_range("MessageStore segment index out of range");
  }

  PrimeField field_;
  std::size_t m_, segments_, k_;
  std::vector<Residue> data_;
};

/// Coded symbols held by one database: an M x Ltilde grid with entry (m, t)
/// equal to g_n^T w_{m,t}. Column t is W[t].
class DatabaseShard {
 public:
  DatabaseShard(PrimeField field, std::size_t db_index, std::size_t n, std::size_t k,
                std::size_t messages, std::size_t segments, std::vector<Residue> grid)
      : field_(field), db_(db_index), n_(n), k_(k), m_(messages), segments_(segments),
        grid_(std::move(grid)) {
    if (grid_.size() != m_ * segments_) throw DimensionMismatch("shard grid size mismatch");
  }

  const PrimeField& field() const { return field_; }
  /// 0-based database index.
  std::size_t db_index() const { return db_; }
  std::size_t n() const { return n_; }
  std::size_t k() const { return k_; }
  std::size_t messages() const { return m_; }
  std::size_t segments() const { return segments_; }

  Residue at(std::size_t m, std::size_t t) const { return grid_[m * segments_ + t]; }
  std::span<const Residue> grid() const { return grid_; }

  bool operator==(const DatabaseShard& o) const {
    return field_ == o.field_ && db_ == o.db_ && n_ == o.n_ && k_ == o.k_ && m_ == o.m_ &&
           segments_ == o.segments_ && grid_ == o.grid_;
  }

 private:
  PrimeField field_;
  std::size_t db_, n_, k_, m_, segments_;
  std::vector<Residue> grid_;
};

inline std::vector<DatabaseShard> encode_shards(const MessageStore& store, const GeneratorMatrix& g) {
  if (store.k() != g.k()) {
    throw DimensionMismatch("message segments have " + std::to_string(store.k()) +
                            " symbols but the generator has K=" + std::to_string(g.k()));
  }
  if (!(store.field() == g.field())) throw DimensionMismatch("store and generator fields differ");
  const auto& f = g.field();
  std::vector<DatabaseShard> shards;
  shards.reserve(g.n());
  for (std::size_t n = 0; n < g.n(); ++n) {
    const auto col = g.column(n);
    std::vector<Residue> grid(store.messages() * store.segments());
    for (std::size_t m = 0; m < store.messages(); ++m) {
      for (std::size_t t = 0; t < store.segments(); ++t) {
        grid[m * store.segments() + t] = dot(f, col, store.segment(m, t));
      }
    }
    shards.emplace_back(f, n, g.n(), g.k(), store.messages(), store.segments(), std::move(grid));
  }
  return shards;
}

/// One coded observation g_db^T w of an unknown K-vector w.
struct Projection {
  std::size_t db;  // 0-based
  Residue value;
};

class SingularSystem : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Recovers the unique w with g_db^T w = value for K distinct databases.
inline std::vector<Residue> decode_segment(std::span<const Projection> projections, const GeneratorMatrix& g) {
  if (projections.size() != g.k()) {
    throw DimensionMismatch("decode_segment needs exactly K=" + std::to_string(g.k()) + " projections");
  }
  std::vector<std::size_t> dbs;
  std::vector<Residue> values;
  for (const auto& p : projections) {
    if (p.db >= g.n()) throw std::out_of_range("projection database index out of range");
    dbs.push_back(p.db);
    values.push_back(p.value);
  }
  auto sorted = dbs;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw std::invalid_argument("decode_segment needs K distinct databases");
  }
  const auto inv = inverse(g.field(), g.projection_matrix(dbs));
  if (!inv) throw SingularSystem("singular projection system; generator is not MDS or data is corrupt");
  return multiply(g.field(), *inv, values);
}

}  // namespace pfr
