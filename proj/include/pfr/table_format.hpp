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

// Compact text rendering of query cells, e.g. "b_{5:6}-c_{13:14}". Letters
// a, b, c, ... name combinations; slots are printed 1-based.

#pragma once

#include <string>
#include <vector>

#include "pfr/query.hpp"

namespace pfr {

inline std::string combo_name(std::size_t combo) {
  if (combo < 26) return std::string(1, static_cast<char>('a' + combo));
  return "u" + std::to_string(combo + 1);
}

namespace detail {

inline bool continues_run(const QueryAtom& prev, const QueryAtom& next) {
  if (prev.type != next.type || prev.terms.size() != next.terms.size()) return false;
  for (std::size_t i = 0; i < prev.terms.size(); ++i) {
    if (prev.terms[i].sign != next.terms[i].sign || next.terms[i].slot != prev.terms[i].slot + 1) return false;
  }
  return true;
}

inline std::string render_run(const QueryAtom& first, const QueryAtom& last) {
  std::string out;
  for (std::size_t i = 0; i < first.terms.size(); ++i) {
    const auto& t = first.terms[i];
    if (t.sign < 0) {
      out += "-";
    } else if (i > 0) {
      out += "+";
    }
    out += combo_name(t.combo) + "_{" + std::to_string(t.slot + 1);
    if (last.terms[i].slot != t.slot) out += ":" + std::to_string(last.terms[i].slot + 1);
    out += "}";
  }
  return out;
}

}  // namespace detail

/// Runs of consecutive atoms with consecutive slots, one string per run.
/// Eliminated atoms are skipped unless asked for.
inline std::vector<std::string> format_cell(const QuerySet& qs, std::size_t db, std::size_t round, std::size_t block,
                                            bool include_eliminated = false) {
  std::vector<const QueryAtom*> atoms;
  for (auto id : qs.cell(db, round, block)) {
    const auto& a = qs.atom(id);
    if (a.status == AtomStatus::Retained || include_eliminated) atoms.push_back(&a);
  }
  std::vector<std::string> out;
  for (std::size_t i = 0; i < atoms.size();) {
    std::size_t j = i;
    while (j + 1 < atoms.size() && detail::continues_run(*atoms[j], *atoms[j + 1])) ++j;
    out.push_back(detail::render_run(*atoms[i], *atoms[j]));
    i = j + 1;
  }
  return out;
}

/// The whole session as a (round, block) x database grid of text.
inline std::string format_table(const QuerySet& qs, bool include_eliminated = false) {
  const auto& p = qs.params();
  std::string out = "(R,B)";
  for (std::size_t n = 0; n < p.n; ++n) out += " | DB" + std::to_string(n + 1);
  out += "\n";
  for (std::size_t r = 1; r <= p.k; ++r) {
    for (std::size_t b = 1; b <= p.v; ++b) {
      out += "(" + std::to_string(r) + "," + std::to_string(b) + ")";
      for (std::size_t n = 0; n < p.n; ++n) {
        out += " | ";
        const auto runs = format_cell(qs, n, r, b, include_eliminated);
        for (std::size_t i = 0; i < runs.size(); ++i) out += (i ? ", " : "") + runs[i];
      }
      out += "\n";
    }
  }
  return out;
}

}  // namespace pfr
