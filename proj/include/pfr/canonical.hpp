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

// Canonical form of a query matrix up to what the user randomizes: the order
// of the rows, a relabeling of the Ltilde slots (all M columns of a slot move
// together) and a sign flip per slot.
//
// The matrix is read as a bipartite graph between rows and slots; the edge
// (row, slot) carries the M-vector of coefficients the row puts on that slot.
// Each connected component is canonized on its own by colour refinement plus
// individualization, keeping the smallest encoding over all leaves.

#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "pfr/query_matrix.hpp"

namespace pfr {

class CanonicalBudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

using LabelCode = std::uint64_t;

/// Edge labels as integers, with negation and the sign-free class.
class LabelCodec {
 public:
  LabelCodec(std::uint32_t q, std::size_t m) : f_(q), m_(m) {}

  LabelCode encode(const std::vector<Residue>& e) const {
    LabelCode c = 0;
    for (std::size_t i = m_; i-- > 0;) c = c * f_.modulus() + e[i];
    return c;
  }
  LabelCode negate(LabelCode c) const {
    LabelCode out = 0, scale = 1;
    for (std::size_t i = 0; i < m_; ++i) {
      out += scale * f_.neg(static_cast<Residue>(c % f_.modulus()));
      c /= f_.modulus();
      scale *= f_.modulus();
    }
    return out;
  }
  LabelCode unsigned_class(LabelCode c) const { return std::min(c, negate(c)); }

 private:
  PrimeField f_;
  std::size_t m_;
};

struct Component {
  // rows[r] = (local slot, label), sorted by slot
  std::vector<std::vector<std::pair<std::size_t, LabelCode>>> rows;
  std::size_t slots = 0;
};

class ComponentCanonizer {
 public:
  ComponentCanonizer(const Component& c, const LabelCodec& codec, std::size_t leaf_budget)
      : c_(c), codec_(codec), budget_(leaf_budget) {
    const std::size_t r = c.rows.size();
    adj_.resize(r + c.slots);
    for (std::size_t i = 0; i < r; ++i) {
      for (const auto& [s, label] : c.rows[i]) {
        const LabelCode u = codec.unsigned_class(label);
        adj_[i].push_back({r + s, u});
        adj_[r + s].push_back({i, u});
      }
    }
  }

  std::string run() {
    std::vector<std::uint64_t> colors(adj_.size(), 0);
    for (std::size_t i = c_.rows.size(); i < colors.size(); ++i) colors[i] = 1;
    refine(colors);
    search(colors);
    return best_;
  }

 private:
  struct Edge {
    std::size_t to;
    LabelCode label;
  };

  // Splits colour classes until every vertex of a class sees the same
  // multiset of (neighbour colour, edge class). Colours are ranks of sorted
  // signatures, so the result does not depend on vertex numbering.
  void refine(std::vector<std::uint64_t>& colors) const {
    const std::size_t n = colors.size();
    std::size_t classes = count_classes(colors);
    std::vector<std::vector<std::uint64_t>> sig(n);
    std::vector<std::size_t> order(n);
    while (true) {
      for (std::size_t v = 0; v < n; ++v) {
        std::vector<std::pair<std::uint64_t, LabelCode>> nb;
        nb.reserve(adj_[v].size());
        for (const auto& e : adj_[v]) nb.emplace_back(colors[e.to], e.label);
        std::sort(nb.begin(), nb.end());
        auto& s = sig[v];
        s.assign(1, colors[v]);
        for (const auto& [col, lab] : nb) {
          s.push_back(col);
          s.push_back(lab);
        }
      }
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return sig[a] < sig[b]; });
      std::uint64_t rank = 0;
      for (std::size_t i = 0; i < n; ++i) {
        if (i > 0 && sig[order[i]] != sig[order[i - 1]]) ++rank;
        colors[order[i]] = rank;
      }
      const std::size_t now = static_cast<std::size_t>(rank + 1);
      if (now == classes) return;
      classes = now;
    }
  }

  static std::size_t count_classes(const std::vector<std::uint64_t>& colors) {
    auto c = colors;
    std::sort(c.begin(), c.end());
    return static_cast<std::size_t>(std::unique(c.begin(), c.end()) - c.begin());
  }

  void search(const std::vector<std::uint64_t>& colors) {
    // First non-singleton class in colour order.
    std::map<std::uint64_t, std::vector<std::size_t>> cells;
    for (std::size_t v = 0; v < colors.size(); ++v) cells[colors[v]].push_back(v);
    const std::vector<std::size_t>* target = nullptr;
    std::uint64_t target_color = 0;
    for (const auto& [col, members] : cells) {
      if (members.size() > 1) {
        target = &members;
        target_color = col;
        break;
      }
    }
    if (target == nullptr) {
      leaf(colors);
      return;
    }
    for (auto v : *target) {
      std::vector<std::uint64_t> next(colors.size());
      for (std::size_t x = 0; x < colors.size(); ++x) next[x] = 2 * colors[x] + 1;
      next[v] = 2 * target_color;
      refine(next);
      search(next);
    }
  }

  void leaf(const std::vector<std::uint64_t>& colors) {
    if (++leaves_ > budget_) throw CanonicalBudgetExceeded("canonical form search exceeded its leaf budget");
    const std::size_t r = c_.rows.size();
    std::vector<std::size_t> row_rank(r), slot_rank(c_.slots);
    {
      std::vector<std::size_t> rows(r), slots(c_.slots);
      std::iota(rows.begin(), rows.end(), std::size_t{0});
      std::iota(slots.begin(), slots.end(), std::size_t{0});
      std::sort(rows.begin(), rows.end(), [&](auto a, auto b) { return colors[a] < colors[b]; });
      std::sort(slots.begin(), slots.end(), [&](auto a, auto b) { return colors[r + a] < colors[r + b]; });
      for (std::size_t i = 0; i < r; ++i) row_rank[rows[i]] = i;
      for (std::size_t i = 0; i < c_.slots; ++i) slot_rank[slots[i]] = i;
    }
    // Each slot's sign is fixed by its first row in canonical order.
    std::vector<int> flip(c_.slots, 0);
    std::vector<std::size_t> first_row(c_.slots, r);
    std::vector<LabelCode> first_label(c_.slots, 0);
    for (std::size_t i = 0; i < r; ++i) {
      for (const auto& [s, label] : c_.rows[i]) {
        if (row_rank[i] < first_row[s]) {
          first_row[s] = row_rank[i];
          first_label[s] = label;
        }
      }
    }
    for (std::size_t s = 0; s < c_.slots; ++s) flip[s] = codec_.unsigned_class(first_label[s]) != first_label[s];
    std::vector<std::vector<std::pair<std::size_t, LabelCode>>> rows(r);
    for (std::size_t i = 0; i < r; ++i) {
      auto& out = rows[row_rank[i]];
      for (const auto& [s, label] : c_.rows[i]) out.emplace_back(slot_rank[s], flip[s] ? codec_.negate(label) : label);
      std::sort(out.begin(), out.end());
    }
    std::string enc;
    for (const auto& row : rows) {
      enc += '[';
      for (const auto& [s, label] : row) enc += std::to_string(s) + ':' + std::to_string(label) + ',';
      enc += ']';
    }
    if (best_.empty() || enc < best_) best_ = std::move(enc);
  }

  const Component& c_;
  const LabelCodec& codec_;
  std::size_t budget_;
  std::size_t leaves_ = 0;
  std::vector<std::vector<Edge>> adj_;
  std::string best_;
};

}  // namespace detail

/// Splits a query matrix into connected components of the row-slot graph.
inline std::vector<detail::Component> split_components(const QueryMatrix& qm) {
  const std::size_t segments = qm.segments();
  const detail::LabelCodec codec(qm.q(), qm.messages());
  // Per row: slot -> coefficient vector.
  std::vector<std::vector<std::pair<std::size_t, detail::LabelCode>>> rows(qm.rows());
  for (std::size_t r = 0; r < qm.rows(); ++r) {
    std::map<std::size_t, std::vector<Residue>> by_slot;
    for (const auto& e : qm.row(r)) {
      auto& v = by_slot[e.column % segments];
      if (v.empty()) v.assign(qm.messages(), 0);
      v[e.column / segments] = e.value;
    }
    for (const auto& [s, v] : by_slot) rows[r].emplace_back(s, codec.encode(v));
  }
  // Union-find over rows through shared slots.
  std::vector<std::size_t> parent(qm.rows());
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::unordered_map<std::size_t, std::size_t> owner;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (const auto& [s, label] : rows[r]) {
      const auto [it, fresh] = owner.emplace(s, r);
      if (!fresh) parent[find(r)] = find(it->second);
    }
  }
  std::map<std::size_t, std::size_t> component_of_root;
  std::vector<detail::Component> out;
  std::vector<std::unordered_map<std::size_t, std::size_t>> local_slot;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto root = find(r);
    auto [it, fresh] = component_of_root.emplace(root, out.size());
    if (fresh) {
      out.emplace_back();
      local_slot.emplace_back();
    }
    auto& comp = out[it->second];
    auto& slots = local_slot[it->second];
    std::vector<std::pair<std::size_t, detail::LabelCode>> row;
    for (const auto& [s, label] : rows[r]) {
      const auto [sit, added] = slots.emplace(s, comp.slots);
      if (added) ++comp.slots;
      row.emplace_back(sit->second, label);
    }
    std::sort(row.begin(), row.end());
    comp.rows.push_back(std::move(row));
  }
  return out;
}

/// Canonical text of a query matrix; equal strings iff the matrices agree up
/// to row order, slot relabeling and per-slot signs. Memoizes components by
/// their raw layout, which repeats heavily inside one session.
class Canonicalizer {
 public:
  explicit Canonicalizer(std::size_t leaf_budget = 200000) : budget_(leaf_budget) {}

  std::string canonical_form(const QueryMatrix& qm) {
    const detail::LabelCodec codec(qm.q(), qm.messages());
    std::vector<std::string> parts;
    for (const auto& comp : split_components(qm)) {
      const std::string raw = raw_key(comp);
      auto it = memo_.find(raw);
      if (it == memo_.end()) {
        it = memo_.emplace(raw, detail::ComponentCanonizer(comp, codec, budget_).run()).first;
      }
      parts.push_back(it->second);
    }
    std::sort(parts.begin(), parts.end());
    std::string out = "q" + std::to_string(qm.q()) + "m" + std::to_string(qm.messages()) + "L" +
                      std::to_string(qm.segments()) + "|";
    for (const auto& p : parts) out += "{" + p + "}";
    return out;
  }

  std::size_t memo_size() const { return memo_.size(); }

 private:
  static std::string raw_key(const detail::Component& c) {
    std::string k;
    for (const auto& row : c.rows) {
      for (const auto& [s, label] : row) k += std::to_string(s) + ':' + std::to_string(label) + ',';
      k += ';';
    }
    return k;
  }

  std::size_t budget_;
  std::unordered_map<std::string, std::string> memo_;
};

/// 64-bit FNV-1a of a canonical form, for compact reports.
inline std::uint64_t fingerprint(const std::string& canonical) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : canonical) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace pfr
