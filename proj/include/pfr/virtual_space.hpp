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
#include <cstdint>
#include <numeric>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "pfr/field.hpp"
#include "pfr/mds.hpp"

namespace pfr {

/// Projective representative of a nonzero coefficient vector in F_q^M; its
/// first nonzero coefficient is 1.
struct CombinationVector {
  std::size_t index;  // 0-based position in the enumeration
  std::vector<Residue> coeffs;
};

/// All (q^M - 1)/(q - 1) combination vectors. The unit vectors e_1..e_M take
/// positions 0..M-1 (the basis set); the rest follow in lexicographic order.
inline std::vector<CombinationVector> enumerate_combinations(std::uint32_t q, std::size_t m) {
  const PrimeField f(q);
  if (m < 1) throw std::invalid_argument("need at least one message");
  std::vector<CombinationVector> out;
  for (std::size_t i = 0; i < m; ++i) {
    std::vector<Residue> e(m, 0);
    e[i] = 1;
    out.push_back({out.size(), std::move(e)});
  }
  std::vector<Residue> v(m, 0);
  while (true) {
    std::size_t i = m;
    while (i > 0 && v[i - 1] == q - 1) v[--i] = 0;
    if (i == 0) break;
    ++v[i - 1];
    const auto first = std::find_if(v.begin(), v.end(), [](Residue x) { return x != 0; });
    const auto nonzeros = std::count_if(v.begin(), v.end(), [](Residue x) { return x != 0; });
    if (*first == 1 && nonzeros > 1) out.push_back({out.size(), v});
  }
  return out;
}

/// The combination vectors of one (q, M) instance, indexed by nu in [0, V).
class CombinationSpace {
 public:
  CombinationSpace(std::uint32_t q, std::size_t messages)
      : field_(q), messages_(messages), vectors_(enumerate_combinations(q, messages)) {}

  const PrimeField& field() const { return field_; }
  std::size_t messages() const { return messages_; }
  std::size_t size() const { return vectors_.size(); }
  bool is_basis(std::size_t nu) const { return nu < messages_; }
  std::span<const Residue> coeffs(std::size_t nu) const { return vectors_.at(nu).coeffs; }
  const std::vector<CombinationVector>& vectors() const { return vectors_; }

 private:
  PrimeField field_;
  std::size_t messages_;
  std::vector<CombinationVector> vectors_;
};

/// sum_m v_nu(m) w_{m,t}: segment t of the virtual message for nu.
inline std::vector<Residue> virtual_symbol(const MessageStore& store, const CombinationSpace& space,
                                           std::size_t nu, std::size_t t) {
  if (nu >= space.size()) throw std::out_of_range("combination index out of range");
  if (t >= store.segments()) throw std::out_of_range("segment index out of range");
  const auto& f = store.field();
  const auto v = space.coeffs(nu);
  std::vector<Residue> out(store.k(), 0);
  for (std::size_t m = 0; m < store.messages(); ++m) {
    if (v[m] == 0) continue;
    const auto seg = store.segment(m, t);
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = f.add(out[j], f.mul(v[m], seg[j]));
  }
  return out;
}

/// The user's private slot permutation pi and per-slot signs sigma, shared by
/// every virtual message.
struct IndexAssignment {
  std::vector<std::size_t> permutation;  // slot t -> column pi(t)
  std::vector<int> signs;                // sigma_t in {+1, -1}
  std::uint64_t seed = 0;

  std::size_t size() const { return permutation.size(); }

  static IndexAssignment identity(std::size_t segments) {
    IndexAssignment a;
    a.permutation.resize(segments);
    std::iota(a.permutation.begin(), a.permutation.end(), std::size_t{0});
    a.signs.assign(segments, +1);
    return a;
  }

  bool operator==(const IndexAssignment&) const = default;
};

/// Fisher-Yates permutation and fair signs drawn from a seeded generator.
inline IndexAssignment make_index_assignment(std::uint64_t seed, std::size_t segments) {
  if (segments < 1) throw std::invalid_argument("index assignment needs at least one segment");
  IndexAssignment a = IndexAssignment::identity(segments);
  a.seed = seed;
  std::mt19937_64 rng(seed);
  for (std::size_t i = segments - 1; i > 0; --i) {
    std::uniform_int_distribution<std::size_t> pick(0, i);
    std::swap(a.permutation[i], a.permutation[pick(rng)]);
  }
  for (auto& s : a.signs) s = (rng() & 1U) != 0 ? -1 : +1;
  return a;
}

/// U_nu(t) = sigma_t * W~_nu(pi(t)).
inline std::vector<Residue> permuted_symbol(const MessageStore& store, const CombinationSpace& space,
                                            const IndexAssignment& a, std::size_t nu, std::size_t t) {
  if (t >= a.size()) throw std::out_of_range("slot index out of range");
  auto out = virtual_symbol(store, space, nu, a.permutation[t]);
  if (a.signs[t] < 0) {
    for (auto& x : out) x = store.field().neg(x);
  }
  return out;
}

}  // namespace pfr
