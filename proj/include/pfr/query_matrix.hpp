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
#include <span>
#include <vector>

#include "pfr/mds.hpp"
#include "pfr/query.hpp"
#include "pfr/virtual_space.hpp"
#include "pfr/wire.hpp"

namespace pfr {

struct SparseEntry {
  std::uint64_t column = 0;  // m * Ltilde + tau
  Residue value = 0;
  bool operator==(const SparseEntry&) const = default;
};

using SparseRow = std::vector<SparseEntry>;  // increasing columns, no zeros

/// Lexicographic order of the dense rows the sparse rows stand for.
inline bool dense_less(const SparseRow& a, const SparseRow& b) {
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    const std::uint64_t ca = i < a.size() ? a[i].column : ~std::uint64_t{0};
    const std::uint64_t cb = j < b.size() ? b[j].column : ~std::uint64_t{0};
    if (ca == cb) {
      if (a[i].value != b[j].value) return a[i].value < b[j].value;
      ++i, ++j;
    } else {
      // The row with the earlier nonzero is larger at that column.
      return ca > cb;
    }
  }
  return false;
}

/// What one database receives: a coefficient matrix over its M x Ltilde grid.
class QueryMatrix {
 public:
  QueryMatrix() = default;
  QueryMatrix(std::uint32_t q, std::size_t messages, std::size_t segments)
      : q_(q), messages_(messages), segments_(segments) {}

  std::uint32_t q() const { return q_; }
  std::size_t messages() const { return messages_; }
  std::size_t segments() const { return segments_; }
  std::uint64_t width() const { return std::uint64_t{messages_} * segments_; }
  std::size_t rows() const { return rows_.size(); }
  const std::vector<SparseRow>& row_data() const { return rows_; }
  const SparseRow& row(std::size_t r) const { return rows_.at(r); }

  void add_row(SparseRow row) { rows_.push_back(std::move(row)); }

  std::vector<Residue> dense_row(std::size_t r) const {
    std::vector<Residue> out(width(), 0);
    for (const auto& e : rows_.at(r)) out[e.column] = e.value;
    return out;
  }

  bool operator==(const QueryMatrix&) const = default;

 private:
  std::uint32_t q_ = 0;
  std::size_t messages_ = 0;
  std::size_t segments_ = 0;
  std::vector<SparseRow> rows_;
};

enum class RowOrder : std::uint8_t {
  Canonical,   // sorted by row content
  Generation,  // order the atoms were generated in; leaks, for negative controls
};

/// A query matrix plus the user-side map from row to atom id.
struct LoweredQuery {
  std::size_t db = 0;
  QueryMatrix matrix;
  std::vector<std::size_t> atom_of_row;
};

inline SparseRow lower_atom(const QueryAtom& a, const CombinationSpace& space, const IndexAssignment& assignment) {
  const auto& f = space.field();
  const std::size_t segments = assignment.size();
  std::vector<std::pair<std::uint64_t, Residue>> acc;
  for (const auto& t : a.terms) {
    const Residue s = f.sign(t.sign * assignment.signs.at(t.slot));
    const std::uint64_t tau = assignment.permutation.at(t.slot);
    const auto v = space.coeffs(t.combo);
    for (std::size_t m = 0; m < v.size(); ++m) {
      if (v[m] != 0) acc.emplace_back(m * segments + tau, f.mul(s, v[m]));
    }
  }
  std::sort(acc.begin(), acc.end());
  SparseRow row;
  for (const auto& [col, val] : acc) {
    if (!row.empty() && row.back().column == col) {
      row.back().value = f.add(row.back().value, val);
      if (row.back().value == 0) row.pop_back();
    } else {
      row.push_back({col, val});
    }
  }
  return row;
}

inline LoweredQuery lower_to_matrix(const QuerySet& qs, std::size_t db, const IndexAssignment& assignment,
                                    RowOrder order = RowOrder::Canonical) {
  const auto& p = qs.params();
  if (assignment.size() != p.segments()) throw DimensionMismatch("index assignment does not cover Ltilde slots");
  const CombinationSpace space(p.q, p.m);
  const auto ids = qs.sent_to(db);
  std::vector<SparseRow> rows;
  rows.reserve(ids.size());
  for (auto id : ids) rows.push_back(lower_atom(qs.atom(id), space, assignment));
  std::vector<std::size_t> perm(ids.size());
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  if (order == RowOrder::Canonical) {
    std::stable_sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) { return dense_less(rows[a], rows[b]); });
  }
  LoweredQuery out{db, QueryMatrix(p.q, p.m, p.segments()), {}};
  for (auto i : perm) {
    out.matrix.add_row(std::move(rows[i]));
    out.atom_of_row.push_back(ids[i]);
  }
  return out;
}

/// Dense wire form: u32 LE header (q, M, Ltilde, rows), then every entry of
/// every row in element_width(q) LE bytes.
inline wire::Bytes encode_query_matrix(const QueryMatrix& qm) {
  wire::Writer w;
  const auto width = wire::element_width(qm.q());
  w.reserve(16 + qm.rows() * qm.width() * width);
  w.u32(qm.q());
  w.u32(static_cast<std::uint32_t>(qm.messages()));
  w.u32(static_cast<std::uint32_t>(qm.segments()));
  w.u32(static_cast<std::uint32_t>(qm.rows()));
  for (const auto& row : qm.row_data()) {
    std::uint64_t next = 0;
    for (const auto& e : row) {
      for (; next < e.column; ++next) w.put(0, width);
      w.put(e.value, width);
      ++next;
    }
    for (; next < qm.width(); ++next) w.put(0, width);
  }
  return w.take();
}

inline QueryMatrix decode_query_matrix(std::span<const std::uint8_t> bytes) {
  wire::Reader r(bytes);
  const PrimeField f(r.u32());
  const auto messages = r.u32();
  const auto segments = r.u32();
  const auto rows = r.u32();
  QueryMatrix qm(f.modulus(), messages, segments);
  const std::uint64_t width = qm.width();
  const std::uint64_t expected = 16 + std::uint64_t{rows} * width * wire::element_width(f.modulus());
  if (expected != bytes.size()) throw wire::DecodeError("query matrix size does not match its header");
  for (std::uint32_t i = 0; i < rows; ++i) {
    SparseRow row;
    for (std::uint64_t c = 0; c < width; ++c) {
      const auto v = r.element(f);
      if (v != 0) row.push_back({c, v});
    }
    qm.add_row(std::move(row));
  }
  r.expect_done();
  return qm;
}

/// A database's reply: one coded symbol per query row.
struct AnswerString {
  std::uint32_t q = 0;
  std::size_t db = 0;  // 0-based
  std::vector<Residue> values;
  bool operator==(const AnswerString&) const = default;
};

/// Wire form: u32 LE header (q, db index 1-based, count), then the values in
/// element_width(q) LE bytes.
inline wire::Bytes encode_answer(const AnswerString& a) {
  wire::Writer w;
  const auto width = wire::element_width(a.q);
  w.u32(a.q);
  w.u32(static_cast<std::uint32_t>(a.db + 1));
  w.u32(static_cast<std::uint32_t>(a.values.size()));
  for (auto v : a.values) w.put(v, width);
  return w.take();
}

inline AnswerString decode_answer(std::span<const std::uint8_t> bytes) {
  wire::Reader r(bytes);
  const PrimeField f(r.u32());
  const auto db = r.u32();
  if (db < 1) throw wire::DecodeError("database index must be 1-based");
  const auto count = r.u32();
  if (12 + std::uint64_t{count} * wire::element_width(f.modulus()) != bytes.size()) {
    throw wire::DecodeError("answer size does not match its header");
  }
  AnswerString a{f.modulus(), db - 1, std::vector<Residue>(count)};
  for (auto& v : a.values) v = r.element(f);
  r.expect_done();
  return a;
}

/// Database-side evaluation of every row against the stored shard.
inline AnswerString evaluate_answers(const DatabaseShard& shard, const QueryMatrix& qm) {
  if (qm.q() != shard.field().modulus() || qm.messages() != shard.messages() || qm.segments() != shard.segments()) {
    throw DimensionMismatch("query matrix does not fit shard " + std::to_string(shard.db_index() + 1));
  }
  const auto& f = shard.field();
  const auto grid = shard.grid();
  AnswerString out{f.modulus(), shard.db_index(), {}};
  out.values.reserve(qm.rows());
  for (const auto& row : qm.row_data()) {
    Residue acc = 0;
    for (const auto& e : row) acc = f.add(acc, f.mul(e.value, grid[e.column]));
    out.values.push_back(acc);
  }
  return out;
}

}  // namespace pfr
