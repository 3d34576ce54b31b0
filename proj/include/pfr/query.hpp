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

// Symbolic query generation. A session is a QuerySet: for every database,
// round and block, a cell of signed v-sums over (combination, slot) pairs.
//
// Indices inside this file are 0-based (databases, combinations, slots,
// instances, side-information groups); blocks and rounds are 1-based.

#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "pfr/linalg.hpp"
#include "pfr/params.hpp"
#include "pfr/virtual_space.hpp"

namespace pfr {

/// Set of combination indices, bit i = combination i.
using TypeMask = std::uint64_t;

class SideInfoExhausted : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class SignAssignmentError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr TypeMask bit(std::size_t i) { return TypeMask{1} << i; }
inline std::size_t type_size(TypeMask t) { return static_cast<std::size_t>(std::popcount(t)); }

inline std::vector<std::size_t> type_members(TypeMask t) {
  std::vector<std::size_t> out;
  for (; t != 0; t &= t - 1) out.push_back(static_cast<std::size_t>(std::countr_zero(t)));
  return out;
}

/// Lexicographic order of the sorted member lists (equal sizes assumed).
inline bool type_lex_less(TypeMask a, TypeMask b) {
  const TypeMask d = a ^ b;
  return d != 0 && (a & (d & (~d + 1))) != 0;
}

/// All b-subsets of [0, v) in lexicographic order.
inline std::vector<TypeMask> types_of_size(std::size_t v, std::size_t b) {
  std::vector<TypeMask> out;
  for_each_subset(v, b, [&](std::span<const std::size_t> idx) {
    TypeMask t = 0;
    for (auto i : idx) t |= bit(i);
    out.push_back(t);
    return true;
  });
  return out;
}

/// Types of block b containing nu, ordered by the lexicographic order of their
/// complements. This is the order side information is laid out in.
inline std::vector<TypeMask> desired_types(std::size_t v, std::size_t b, std::size_t nu) {
  std::vector<TypeMask> out;
  for (auto t : types_of_size(v, b)) {
    if ((t & bit(nu)) != 0) out.push_back(t);
  }
  const TypeMask full = v == 64 ? ~TypeMask{0} : bit(v) - 1;
  std::stable_sort(out.begin(), out.end(), [&](TypeMask a, TypeMask c) { return type_lex_less(full ^ a, full ^ c); });
  return out;
}

inline std::vector<TypeMask> interference_types(std::size_t v, std::size_t b, std::size_t nu) {
  std::vector<TypeMask> out;
  for (auto t : types_of_size(v, b)) {
    if ((t & bit(nu)) == 0) out.push_back(t);
  }
  return out;
}

// Signs. An interference type S carries the boundary signs (-1)^rank(theta, S).
// A desired type T is the side-information sum (boundary signs of T \ nu)
// plus the nu term, all scaled by rho(T) = (-1)^#{x in T : x > nu}; the nu
// term gets rho(T) (-1)^(|T|-1). Up to a sign per column this is the plain
// boundary incidence of the type lattice, so what a database sees does not
// depend on nu.
inline int parity_sign(std::size_t count) { return (count & 1U) != 0 ? -1 : +1; }

inline int rank_sign(TypeMask type, std::size_t theta) { return parity_sign(type_size(type & (bit(theta) - 1))); }

inline int row_factor(TypeMask type, std::size_t nu) {
  if ((type & bit(nu)) == 0) return +1;
  return parity_sign(type_size(type >> (nu + 1)));
}

inline int term_sign(TypeMask type, std::size_t theta, std::size_t nu) {
  if ((type & bit(nu)) == 0) return rank_sign(type, theta);
  const int rho = row_factor(type, nu);
  if (theta == nu) return rho * parity_sign(type_size(type) - 1);
  return rho * rank_sign(type & ~bit(nu), theta);
}

enum class AtomKind : std::uint8_t { Desired, Interference };
enum class AtomStatus : std::uint8_t { Retained, Eliminated, Withheld };

struct Term {
  std::uint32_t combo = 0;
  std::uint64_t slot = 0;
  int sign = +1;

  bool operator==(const Term&) const = default;
};

/// One signed v-sum plus the bookkeeping the user keeps for decoding.
struct QueryAtom {
  std::vector<Term> terms;  // sorted by combination
  AtomKind kind = AtomKind::Desired;
  TypeMask type = 0;
  std::size_t block = 1;
  std::size_t round = 1;
  std::size_t si_group = 0;
  std::size_t db = 0;
  std::uint64_t instance = 0;
  std::size_t origin = 0;                // atom id of the first query of this content
  std::optional<std::size_t> side_info;  // desired atoms of block >= 2
  int si_factor = +1;                    // atom = si_factor * side_info + (nu term)
  AtomStatus status = AtomStatus::Retained;

  std::optional<Term> term_for(std::size_t combo) const {
    for (const auto& t : terms) {
      if (t.combo == combo) return t;
    }
    return std::nullopt;
  }
};

/// An eliminated type written over the retained types of the same block:
/// atom(eliminated) = sum coeff * atom(type), instance by instance.
struct RedundancyRelation {
  std::size_t block = 0;
  TypeMask eliminated = 0;
  std::vector<std::pair<TypeMask, Residue>> combination;
};

struct GenerationOptions {
  // When false, interference of blocks >= 2 is generated but withheld, so the
  // type census depends on nu. Negative control for the privacy audit only.
  bool message_symmetry = true;
};

class QuerySet {
 public:
  QuerySet(SchemeParams params, std::size_t nu) : params_(params), nu_(nu) {
    params_.require_materializable();
    if (nu >= params_.v) throw ParameterError("requested combination index out of range");
    cells_.resize(params_.n * params_.k * params_.v);
  }

  const SchemeParams& params() const { return params_; }
  std::size_t nu() const { return nu_; }
  const std::vector<QueryAtom>& atoms() const { return atoms_; }
  std::vector<QueryAtom>& atoms() { return atoms_; }
  const QueryAtom& atom(std::size_t id) const { return atoms_.at(id); }

  std::span<const std::size_t> cell(std::size_t db, std::size_t round, std::size_t block) const {
    return cells_.at(cell_index(db, round, block));
  }

  std::size_t add(QueryAtom a) {
    const std::size_t id = atoms_.size();
    if (a.round == 1 && a.origin == kSelf) a.origin = id;
    cells_.at(cell_index(a.db, a.round, a.block)).push_back(id);
    index_.emplace(key(a.db, a.round, a.block, a.type, a.instance), id);
    atoms_.push_back(std::move(a));
    return id;
  }

  std::optional<std::size_t> find(std::size_t db, std::size_t round, std::size_t block, TypeMask type,
                                  std::uint64_t instance) const {
    const auto it = index_.find(key(db, round, block, type, instance));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  const std::vector<RedundancyRelation>& relations() const { return relations_; }
  std::vector<RedundancyRelation>& relations() { return relations_; }

  /// Atom ids sent to database db, in generation order.
  std::vector<std::size_t> sent_to(std::size_t db) const {
    std::vector<std::size_t> out;
    for (std::size_t r = 1; r <= params_.k; ++r) {
      for (std::size_t b = 1; b <= params_.v; ++b) {
        for (auto id : cell(db, r, b)) {
          if (atoms_[id].status == AtomStatus::Retained) out.push_back(id);
        }
      }
    }
    return out;
  }

  std::vector<std::size_t> with_status(AtomStatus s) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
      if (atoms_[i].status == s) out.push_back(i);
    }
    return out;
  }

  static constexpr std::size_t kSelf = ~std::size_t{0};

 private:
  std::size_t cell_index(std::size_t db, std::size_t round, std::size_t block) const {
    if (db >= params_.n || round < 1 || round > params_.k || block < 1 || block > params_.v) {
      throw std::out_of_range("query cell out of range");
    }
    return (db * params_.k + (round - 1)) * params_.v + (block - 1);
  }

  struct Key {
    std::size_t db, round, block;
    TypeMask type;
    std::uint64_t instance;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const {
      std::uint64_t h = 0x9e3779b97f4a7c15ULL;
      for (std::uint64_t x : {std::uint64_t{k.db}, std::uint64_t{k.round}, std::uint64_t{k.block}, k.type, k.instance}) {
        h ^= x + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
      }
      return static_cast<std::size_t>(h);
    }
  };
  static Key key(std::size_t db, std::size_t round, std::size_t block, TypeMask type, std::uint64_t instance) {
    return {db, round, block, type, instance};
  }

  SchemeParams params_;
  std::size_t nu_;
  std::vector<QueryAtom> atoms_;
  std::vector<std::vector<std::size_t>> cells_;
  std::unordered_map<Key, std::size_t, KeyHash> index_;
  std::vector<RedundancyRelation> relations_;
};

/// The new(U_nu) counter. Every fresh desired slot comes from here, so no slot
/// is ever issued twice.
class FreshSlots {
 public:
  explicit FreshSlots(std::uint64_t limit) : limit_(limit) {}
  std::uint64_t issue() {
    if (next_ >= limit_) throw std::logic_error("fresh slot counter overflow");
    return next_++;
  }
  std::uint64_t issued() const { return next_; }

 private:
  std::uint64_t next_ = 0;
  std::uint64_t limit_;
};

/// Where desired instance k of block B at database n, round R, finds its side
/// information: neighbor db, side-information group and instance inside the
/// round-1 interference of block B-1.
struct SideInfoSource {
  std::size_t db = 0;
  std::size_t group = 0;
  std::uint64_t instance = 0;
};

inline SideInfoSource side_info_source(const SchemeParams& p, std::size_t n, std::size_t round, std::size_t block,
                                       std::uint64_t k) {
  const std::uint64_t group_size = p.repetitions(block - 1) / p.k;
  const std::uint64_t j = k / group_size;  // which neighbor
  const std::uint64_t o = k % group_size;
  if (j >= p.neighbors()) throw SideInfoExhausted("instance beyond the neighbors' side information");
  // Neighbor i+1 hands over group I_{Nb+R-1-i}; indices past K wrap around.
  const std::size_t g = static_cast<std::size_t>((p.neighbors() + round - 2 - j) % p.k);
  return {static_cast<std::size_t>((n + 1 + j) % p.n), g, g * group_size + o};
}

inline std::uint64_t nu_slot(const QueryAtom& a, std::size_t nu) {
  const auto t = a.term_for(nu);
  if (!t) throw std::logic_error("desired atom without the requested combination");
  return t->slot;
}

/// Block 1 of database n, round 1: fresh desired singletons and, at the same
/// slots, singletons of every other combination.
inline std::vector<QueryAtom> init_block1(const SchemeParams& p, std::size_t nu, std::size_t n, FreshSlots& slots) {
  const std::uint64_t reps = p.repetitions(1);
  // With V = 1 there is a single instance and no later block to feed.
  const std::uint64_t per_group = std::max<std::uint64_t>(reps / p.k, 1);
  auto group_of = [&](std::uint64_t k) { return static_cast<std::size_t>(std::min<std::uint64_t>(k / per_group, p.k - 1)); };
  std::vector<std::uint64_t> fresh(reps);
  std::vector<QueryAtom> out;
  for (std::uint64_t k = 0; k < reps; ++k) {
    fresh[k] = slots.issue();
    QueryAtom a;
    a.terms = {{static_cast<std::uint32_t>(nu), fresh[k], +1}};
    a.kind = AtomKind::Desired;
    a.type = bit(nu);
    a.si_group = group_of(k);
    a.db = n;
    a.instance = k;
    a.origin = QuerySet::kSelf;
    out.push_back(std::move(a));
  }
  for (auto type : interference_types(p.v, 1, nu)) {
    for (std::uint64_t k = 0; k < reps; ++k) {
      QueryAtom a;
      a.terms = {{static_cast<std::uint32_t>(std::countr_zero(type)), fresh[k], +1}};
      a.kind = AtomKind::Interference;
      a.type = type;
      a.si_group = group_of(k);
      a.db = n;
      a.instance = k;
      a.origin = QuerySet::kSelf;
      out.push_back(std::move(a));
    }
  }
  return out;
}

inline QueryAtom join_side_info(const QuerySet& qs, const QueryAtom& si, std::size_t si_id, TypeMask type,
                                std::uint64_t slot) {
  QueryAtom a;
  a.terms = si.terms;
  a.terms.push_back({static_cast<std::uint32_t>(qs.nu()), slot, +1});
  std::sort(a.terms.begin(), a.terms.end(), [](const Term& x, const Term& y) { return x.combo < y.combo; });
  a.kind = AtomKind::Desired;
  a.type = type;
  a.side_info = si_id;
  return a;
}

inline std::size_t lookup_side_info(const QuerySet& qs, const SideInfoSource& src, std::size_t block, TypeMask type) {
  const auto id = qs.find(src.db, 1, block - 1, type & ~bit(qs.nu()), src.instance);
  if (!id || qs.atom(*id).kind != AtomKind::Interference) {
    throw SideInfoExhausted("no side information at db " + std::to_string(src.db + 1) + ", block " +
                            std::to_string(block - 1));
  }
  return *id;
}

/// Desired B-sums of database n, round 1: a fresh nu slot on top of a
/// (B-1)-sum of interference the neighbors already answered.
inline std::vector<QueryAtom> exploit_si(const QuerySet& qs, std::size_t block, std::size_t n, FreshSlots& slots) {
  const auto& p = qs.params();
  if (block < 2) throw std::invalid_argument("exploit_si needs block >= 2");
  std::vector<QueryAtom> out;
  for (auto type : desired_types(p.v, block, qs.nu())) {
    for (std::uint64_t k = 0; k < p.repetitions(block); ++k) {
      const auto src = side_info_source(p, n, 1, block, k);
      const auto si_id = lookup_side_info(qs, src, block, type);
      QueryAtom a = join_side_info(qs, qs.atom(si_id), si_id, type, slots.issue());
      a.block = block;
      a.si_group = src.group;
      a.db = n;
      a.instance = k;
      a.origin = QuerySet::kSelf;
      out.push_back(std::move(a));
    }
  }
  return out;
}

/// Interference B-sums that make every B-subset appear R_B times. The member
/// theta of type S sits at the nu slot of desired atom ((S \ theta) + nu, k).
inline std::vector<QueryAtom> m_sym(const QuerySet& qs, std::span<const QueryAtom> desired, std::size_t block,
                                    std::size_t n, std::size_t round) {
  const auto& p = qs.params();
  const std::size_t nu = qs.nu();
  const std::uint64_t reps = p.repetitions(block);
  std::unordered_map<TypeMask, std::vector<std::uint64_t>> slot_of;
  for (const auto& d : desired) {
    auto& v = slot_of[d.type];
    if (v.size() <= d.instance) v.resize(d.instance + 1);
    v[d.instance] = nu_slot(d, nu);
  }
  const std::uint64_t per_group = std::max<std::uint64_t>(reps / p.k, 1);
  std::vector<QueryAtom> out;
  for (auto type : interference_types(p.v, block, nu)) {
    for (std::uint64_t k = 0; k < reps; ++k) {
      QueryAtom a;
      for (auto theta : type_members(type)) {
        const auto it = slot_of.find((type & ~bit(theta)) | bit(nu));
        if (it == slot_of.end() || it->second.size() <= k) {
          throw std::logic_error("message symmetry needs the desired atoms of the block");
        }
        a.terms.push_back({static_cast<std::uint32_t>(theta), it->second[k], +1});
      }
      a.kind = AtomKind::Interference;
      a.type = type;
      a.block = block;
      a.round = round;
      a.si_group = static_cast<std::size_t>(std::min<std::uint64_t>(k / per_group, p.k - 1));
      a.db = n;
      a.instance = k;
      a.origin = QuerySet::kSelf;
      out.push_back(std::move(a));
    }
  }
  return out;
}

/// Copies of a cell of database n-1, round R-1, moved to database n, round R.
inline std::vector<QueryAtom> rotate_cell(const QuerySet& qs, std::size_t round, std::size_t block, std::size_t n,
                                          bool interference_only) {
  const auto& p = qs.params();
  const std::size_t src_db = (n + p.n - 1) % p.n;
  std::vector<QueryAtom> out;
  for (auto id : qs.cell(src_db, round - 1, block)) {
    const auto& s = qs.atom(id);
    if (interference_only && s.kind != AtomKind::Interference) continue;
    QueryAtom a = s;
    a.db = n;
    a.round = round;
    out.push_back(std::move(a));
  }
  return out;
}

/// Block 1 at round R: database n repeats database n-1's round R-1 queries.
inline std::vector<QueryAtom> rotate_round(const QuerySet& qs, std::size_t round, std::size_t n) {
  if (round < 2 || round > qs.params().k) throw std::invalid_argument("rotate_round needs 2 <= R <= K");
  return rotate_cell(qs, round, 1, n, false);
}

/// Block B >= 2 at round R: interference rotates like block 1; each desired
/// nu slot rotates too but is paired with a fresh round-1 side-information
/// group of the new neighbors.
inline std::vector<QueryAtom> reuse_si(const QuerySet& qs, std::size_t round, std::size_t block, std::size_t n) {
  const auto& p = qs.params();
  if (round < 2 || round > p.k || block < 2) throw std::invalid_argument("reuse_si needs 2 <= R <= K and B >= 2");
  const std::size_t src_db = (n + p.n - 1) % p.n;
  std::vector<QueryAtom> out;
  for (auto id : qs.cell(src_db, round - 1, block)) {
    const auto& s = qs.atom(id);
    if (s.kind != AtomKind::Desired) continue;
    const auto src = side_info_source(p, n, round, block, s.instance);
    const auto si_id = lookup_side_info(qs, src, block, s.type);
    QueryAtom a = join_side_info(qs, qs.atom(si_id), si_id, s.type, nu_slot(s, qs.nu()));
    a.block = block;
    a.round = round;
    a.si_group = src.group;
    a.db = n;
    a.instance = s.instance;
    a.origin = s.origin;
    out.push_back(std::move(a));
  }
  auto rest = rotate_cell(qs, round, block, n, true);
  out.insert(out.end(), std::make_move_iterator(rest.begin()), std::make_move_iterator(rest.end()));
  return out;
}

inline void assign_signs(QuerySet& qs) {
  const std::size_t nu = qs.nu();
  for (auto& a : qs.atoms()) {
    for (auto& t : a.terms) t.sign = term_sign(a.type, t.combo, nu);
    a.si_factor = a.kind == AtomKind::Desired ? row_factor(a.type, nu) : +1;
  }
}

/// Signed incidence row of a type: column (type \ theta, m) holds
/// sign(theta) * v_theta(m).
inline std::vector<Residue> type_row(const CombinationSpace& space, TypeMask type, std::size_t nu,
                                     const std::unordered_map<TypeMask, std::size_t>& column_of) {
  const auto& f = space.field();
  const std::size_t m = space.messages();
  std::vector<Residue> row(column_of.size() * m, 0);
  for (auto theta : type_members(type)) {
    const std::size_t col = column_of.at(type & ~bit(theta));
    const Residue s = f.sign(term_sign(type, theta, nu));
    const auto v = space.coeffs(theta);
    for (std::size_t i = 0; i < m; ++i) row[col * m + i] = f.add(row[col * m + i], f.mul(s, v[i]));
  }
  return row;
}

/// Type-level relations of one block: every type disjoint from the basis
/// written over the retained types. Throws SignAssignmentError when the sign
/// pattern does not allow it.
inline std::vector<RedundancyRelation> block_relations(const CombinationSpace& space, std::size_t block,
                                                       std::size_t nu) {
  const std::size_t v = space.size();
  const TypeMask basis = bit(space.messages()) - 1;
  std::vector<TypeMask> retained, eliminated;
  for (auto t : types_of_size(v, block)) ((t & basis) != 0 ? retained : eliminated).push_back(t);
  if (eliminated.empty()) return {};
  std::unordered_map<TypeMask, std::size_t> column_of;
  if (block == 1) {
    column_of.emplace(0, 0);
  } else {
    for (auto t : types_of_size(v, block - 1)) column_of.emplace(t, column_of.size());
  }
  const std::size_t width = column_of.size() * space.messages();
  auto fill = [&](const std::vector<TypeMask>& types) {
    FpMatrix mat(types.size(), width);
    for (std::size_t i = 0; i < types.size(); ++i) {
      const auto row = type_row(space, types[i], nu, column_of);
      std::copy(row.begin(), row.end(), mat.row(i).begin());
    }
    return mat;
  };
  const auto coeffs = express_rows(space.field(), fill(retained), fill(eliminated));
  if (!coeffs) {
    throw SignAssignmentError("block " + std::to_string(block) + ": eliminated types are not spanned by retained ones");
  }
  std::vector<RedundancyRelation> out;
  for (std::size_t e = 0; e < eliminated.size(); ++e) {
    RedundancyRelation rel{block, eliminated[e], {}};
    for (std::size_t i = 0; i < retained.size(); ++i) {
      if ((*coeffs)[e][i] != 0) rel.combination.emplace_back(retained[i], (*coeffs)[e][i]);
    }
    out.push_back(std::move(rel));
  }
  return out;
}

/// Marks every atom whose type avoids the basis as eliminated and records how
/// the user regenerates it.
inline void eliminate_redundancy(QuerySet& qs) {
  const auto& p = qs.params();
  const CombinationSpace space(p.q, p.m);
  const TypeMask basis = bit(p.m) - 1;
  qs.relations().clear();
  for (std::size_t b = 1; b + p.m <= p.v; ++b) {
    auto rel = block_relations(space, b, qs.nu());
    qs.relations().insert(qs.relations().end(), rel.begin(), rel.end());
  }
  for (auto& a : qs.atoms()) {
    if ((a.type & basis) == 0) a.status = AtomStatus::Eliminated;
  }
}

/// Runs the whole generation pipeline for one requested combination.
inline QuerySet generate_query_set(const SchemeParams& p, std::size_t nu, GenerationOptions opts = {}) {
  QuerySet qs(p, nu);
  FreshSlots slots(p.segments());
  auto add_all = [&](std::vector<QueryAtom> atoms) {
    for (auto& a : atoms) qs.add(std::move(a));
  };
  for (std::size_t n = 0; n < p.n; ++n) add_all(init_block1(p, nu, n, slots));
  for (std::size_t b = 2; b <= p.v; ++b) {
    for (std::size_t n = 0; n < p.n; ++n) {
      auto desired = exploit_si(qs, b, n, slots);
      auto interference = m_sym(qs, desired, b, n, 1);
      add_all(std::move(desired));
      add_all(std::move(interference));
    }
  }
  if (slots.issued() != p.segments()) throw std::logic_error("fresh slots do not cover the segment range");
  for (std::size_t r = 2; r <= p.k; ++r) {
    for (std::size_t n = 0; n < p.n; ++n) add_all(rotate_round(qs, r, n));
    for (std::size_t b = 2; b <= p.v; ++b) {
      for (std::size_t n = 0; n < p.n; ++n) add_all(reuse_si(qs, r, b, n));
    }
  }
  assign_signs(qs);
  eliminate_redundancy(qs);
  if (!opts.message_symmetry) {
    for (auto& a : qs.atoms()) {
      if (a.kind == AtomKind::Interference && a.block >= 2) a.status = AtomStatus::Withheld;
    }
  }
  return qs;
}

/// Per-(db, round, block) counts of retained and eliminated atoms.
struct QueryCensus {
  std::size_t blocks = 0;
  std::vector<BigInt> retained_per_block;    // summed over dbs and rounds
  std::vector<BigInt> eliminated_per_block;
  std::vector<std::size_t> eliminated_types_per_block;
  BigInt downloaded = 0;
};

inline QueryCensus census(const QuerySet& qs) {
  const auto& p = qs.params();
  QueryCensus c;
  c.blocks = p.v;
  c.retained_per_block.assign(p.v, 0);
  c.eliminated_per_block.assign(p.v, 0);
  c.eliminated_types_per_block.assign(p.v, 0);
  for (const auto& a : qs.atoms()) {
    if (a.status == AtomStatus::Retained) c.retained_per_block[a.block - 1] += 1;
    if (a.status == AtomStatus::Eliminated) c.eliminated_per_block[a.block - 1] += 1;
  }
  for (const auto& r : qs.relations()) ++c.eliminated_types_per_block[r.block - 1];
  for (const auto& x : c.retained_per_block) c.downloaded += x;
  return c;
}

inline const char* to_string(AtomKind k) { return k == AtomKind::Desired ? "desired" : "interference"; }

inline const char* to_string(AtomStatus s) {
  switch (s) {
    case AtomStatus::Retained:
      return "retained";
    case AtomStatus::Eliminated:
      return "eliminated";
    case AtomStatus::Withheld:
      return "withheld";
  }
  return "?";
}

/// User-side debugging view of a session. Never sent to a database.
inline nlohmann::json query_set_to_json(const QuerySet& qs) {
  const auto& p = qs.params();
  nlohmann::json atoms = nlohmann::json::array();
  for (std::size_t id = 0; id < qs.atoms().size(); ++id) {
    const auto& a = qs.atom(id);
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& t : a.terms) terms.push_back({{"combo", t.combo + 1}, {"slot", t.slot + 1}, {"sign", t.sign}});
    nlohmann::json j = {{"id", id},
                        {"db", a.db + 1},
                        {"round", a.round},
                        {"block", a.block},
                        {"kind", to_string(a.kind)},
                        {"si_group", a.si_group + 1},
                        {"instance", a.instance},
                        {"origin", a.origin},
                        {"status", to_string(a.status)},
                        {"terms", std::move(terms)}};
    if (a.side_info) j["side_info"] = *a.side_info;
    atoms.push_back(std::move(j));
  }
  nlohmann::json relations = nlohmann::json::array();
  for (const auto& r : qs.relations()) {
    nlohmann::json comb = nlohmann::json::array();
    for (const auto& [t, c] : r.combination) {
      nlohmann::json members = nlohmann::json::array();
      for (auto i : type_members(t)) members.push_back(i + 1);
      comb.push_back({{"type", std::move(members)}, {"coeff", c}});
    }
    nlohmann::json members = nlohmann::json::array();
    for (auto i : type_members(r.eliminated)) members.push_back(i + 1);
    relations.push_back({{"block", r.block}, {"eliminated", std::move(members)}, {"from", std::move(comb)}});
  }
  return {{"N", p.n}, {"K", p.k},         {"M", p.m},         {"q", p.q},
          {"V", p.v}, {"nu", qs.nu() + 1}, {"atoms", std::move(atoms)}, {"relations", std::move(relations)}};
}

}  // namespace pfr
