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

// User-side decoding. Every atom's content is queried at K distinct
// databases; once side information is stripped, the K coded projections of
// the same content are inverted with decode_segment. Blocks are peeled in
// increasing order because block B strips values resolved in block B-1.

#pragma once

#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "pfr/mds.hpp"
#include "pfr/query.hpp"
#include "pfr/query_matrix.hpp"
#include "pfr/virtual_space.hpp"

namespace pfr {

class DecodeFailure : public std::runtime_error {
 public:
  enum class Kind { MissingProjection, InconsistentProjections, Unresolved, AnswerMismatch };
  DecodeFailure(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

struct DecodeState {
  // Coded value g_db^T (atom) for every answered or regenerated atom id.
  std::unordered_map<std::size_t, Residue> projection;
  // Atom content (a K-vector) per origin atom id, once K projections agree.
  std::unordered_map<std::size_t, std::vector<Residue>> resolved;
  std::unordered_map<std::size_t, Residue> regenerated;
};

/// Attaches one database's answers to the atoms behind its query rows.
inline void absorb_answers(DecodeState& state, const LoweredQuery& query, const AnswerString& answer) {
  if (answer.db != query.db) {
    throw DecodeFailure(DecodeFailure::Kind::AnswerMismatch, "answer from db " + std::to_string(answer.db + 1) +
                                                                 " filed for db " + std::to_string(query.db + 1));
  }
  if (answer.values.size() != query.atom_of_row.size()) {
    throw DecodeFailure(DecodeFailure::Kind::AnswerMismatch,
                        "db " + std::to_string(answer.db + 1) + " sent " + std::to_string(answer.values.size()) +
                            " symbols for " + std::to_string(query.atom_of_row.size()) + " query rows");
  }
  for (std::size_t r = 0; r < answer.values.size(); ++r) state.projection[query.atom_of_row[r]] = answer.values[r];
}

/// Coded values of the eliminated atoms, each a fixed combination of answered
/// atoms of the same cell and instance.
inline const std::unordered_map<std::size_t, Residue>& regenerate_redundant(DecodeState& state, const QuerySet& qs) {
  const PrimeField f(qs.params().q);
  std::map<std::pair<std::size_t, TypeMask>, const RedundancyRelation*> relation_of;
  for (const auto& r : qs.relations()) relation_of[{r.block, r.eliminated}] = &r;
  for (auto id : qs.with_status(AtomStatus::Eliminated)) {
    const auto& a = qs.atom(id);
    const auto rel = relation_of.find({a.block, a.type});
    if (rel == relation_of.end()) {
      throw DecodeFailure(DecodeFailure::Kind::Unresolved, "no relation for an eliminated atom type");
    }
    Residue value = 0;
    for (const auto& [type, coeff] : rel->second->combination) {
      const auto src = qs.find(a.db, a.round, a.block, type, a.instance);
      const auto it = src ? state.projection.find(*src) : state.projection.end();
      if (it == state.projection.end()) {
        throw DecodeFailure(DecodeFailure::Kind::MissingProjection, "eliminated atom depends on an unanswered atom");
      }
      value = f.add(value, f.mul(coeff, it->second));
    }
    state.regenerated[id] = value;
    state.projection[id] = value;
  }
  return state.regenerated;
}

/// Resolves every atom content block by block and returns the L symbols of
/// the requested virtual message, segment tau at positions tau*K .. tau*K+K-1.
inline std::vector<Residue> peel_decode(DecodeState& state, const QuerySet& qs, const GeneratorMatrix& g,
                                        const IndexAssignment& assignment) {
  const auto& p = qs.params();
  const auto& f = g.field();
  const std::size_t nu = qs.nu();
  if (g.n() != p.n || g.k() != p.k) throw DimensionMismatch("generator does not match the scheme parameters");
  std::vector<Residue> out(p.length(), 0);
  std::vector<bool> filled(p.segments(), false);

  for (std::size_t block = 1; block <= p.v; ++block) {
    std::map<std::size_t, std::vector<Projection>> groups;  // origin -> projections
    for (std::size_t id = 0; id < qs.atoms().size(); ++id) {
      const auto& a = qs.atom(id);
      if (a.block != block || a.status == AtomStatus::Withheld) continue;
      const auto it = state.projection.find(id);
      if (it == state.projection.end()) {
        throw DecodeFailure(DecodeFailure::Kind::MissingProjection, "atom " + std::to_string(id) + " has no answer");
      }
      Residue value = it->second;
      if (a.side_info) {
        const auto si = state.resolved.find(qs.atom(*a.side_info).origin);
        if (si == state.resolved.end()) {
          throw DecodeFailure(DecodeFailure::Kind::Unresolved, "side information of atom " + std::to_string(id) +
                                                                   " is not resolved yet");
        }
        const Residue known = dot(f, g.column(a.db), si->second);
        value = f.sub(value, f.mul(f.sign(a.si_factor), known));
      }
      groups[a.origin].push_back({a.db, value});
    }
    for (auto& [origin, projections] : groups) {
      if (projections.size() < p.k) {
        throw DecodeFailure(DecodeFailure::Kind::MissingProjection,
                            "atom " + std::to_string(origin) + " seen at " + std::to_string(projections.size()) +
                                " databases, need " + std::to_string(p.k));
      }
      const auto content = decode_segment(std::span(projections).first(p.k), g);
      for (std::size_t i = p.k; i < projections.size(); ++i) {
        if (dot(f, g.column(projections[i].db), content) != projections[i].value) {
          throw DecodeFailure(DecodeFailure::Kind::InconsistentProjections,
                              "projections of atom " + std::to_string(origin) + " disagree");
        }
      }
      const auto& a = qs.atom(origin);
      if (a.kind == AtomKind::Desired) {
        // What is left is s * U_nu(d) with U_nu(d) = sigma_d * W~_nu(pi(d)).
        const auto term = a.term_for(nu);
        const std::uint64_t d = term->slot;
        const Residue undo = f.sign(term->sign * assignment.signs.at(d));
        const std::size_t tau = assignment.permutation.at(d);
        if (filled[tau]) {
          throw DecodeFailure(DecodeFailure::Kind::InconsistentProjections, "segment decoded twice");
        }
        for (std::size_t j = 0; j < p.k; ++j) out[tau * p.k + j] = f.mul(undo, content[j]);
        filled[tau] = true;
      }
      if (!state.resolved.emplace(origin, content).second) {
        throw DecodeFailure(DecodeFailure::Kind::InconsistentProjections, "atom content resolved twice");
      }
    }
  }
  for (std::size_t tau = 0; tau < filled.size(); ++tau) {
    if (!filled[tau]) throw DecodeFailure(DecodeFailure::Kind::Unresolved, "segment " + std::to_string(tau + 1) + " not decoded");
  }
  return out;
}

/// The plaintext answer v_nu . [W_1 .. W_M], laid out like peel_decode's output.
inline std::vector<Residue> plaintext_target(const MessageStore& store, const CombinationSpace& space, std::size_t nu) {
  std::vector<Residue> out;
  out.reserve(store.length());
  for (std::size_t t = 0; t < store.segments(); ++t) {
    const auto seg = virtual_symbol(store, space, nu, t);
    out.insert(out.end(), seg.begin(), seg.end());
  }
  return out;
}

}  // namespace pfr
