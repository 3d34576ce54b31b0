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

#include <cstdint>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "pfr/mds.hpp"
#include "pfr/wire.hpp"

namespace pfr {

/// "PFRS" read as a little-endian u32.
inline constexpr std::uint32_t kShardMagic = 0x53524650;

/// Binary shard layout, all header words little-endian u32:
///   magic, q, N, K, M, Ltilde, db_index (1-based)
/// followed by the M x Ltilde grid, message-major, each element stored in
/// element_width(q) little-endian bytes.
inline wire::Bytes encode_shard(const DatabaseShard& s) {
  wire::Writer w;
  const auto width = wire::element_width(s.field().modulus());
  w.reserve(28 + s.grid().size() * width);
  w.u32(kShardMagic);
  w.u32(s.field().modulus());
  w.u32(static_cast<std::uint32_t>(s.n()));
  w.u32(static_cast<std::uint32_t>(s.k()));
  w.u32(static_cast<std::uint32_t>(s.messages()));
  w.u32(static_cast<std::uint32_t>(s.segments()));
  w.u32(static_cast<std::uint32_t>(s.db_index() + 1));
  for (auto v : s.grid()) w.put(v, width);
  return w.take();
}

inline DatabaseShard decode_shard(std::span<const std::uint8_t> bytes) {
  wire::Reader r(bytes);
  if (r.u32() != kShardMagic) throw wire::DecodeError("bad shard magic");
  const PrimeField f(r.u32());
  const auto n = r.u32();
  const auto k = r.u32();
  const auto m = r.u32();
  const auto segments = r.u32();
  const auto db = r.u32();
  if (db < 1 || db > n || k < 1 || k >= n) throw wire::DecodeError("inconsistent shard header");
  std::vector<Residue> grid(std::size_t{m} * segments);
  for (auto& v : grid) v = r.element(f);
  r.expect_done();
  return {f, db - 1, n, k, m, segments, std::move(grid)};
}

/// Debug view; not a wire format.
inline nlohmann::json shard_to_json(const DatabaseShard& s) {
  nlohmann::json grid = nlohmann::json::array();
  for (std::size_t m = 0; m < s.messages(); ++m) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t t = 0; t < s.segments(); ++t) row.push_back(s.at(m, t));
    grid.push_back(std::move(row));
  }
  return {{"q", s.field().modulus()}, {"N", s.n()},        {"K", s.k()},   {"M", s.messages()},
          {"Ltilde", s.segments()},   {"db_index", s.db_index() + 1}, {"grid", std::move(grid)}};
}

inline nlohmann::json generator_to_json(const GeneratorMatrix& g) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t r = 0; r < g.k(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t c = 0; c < g.n(); ++c) row.push_back(g.matrix()(r, c));
    rows.push_back(std::move(row));
  }
  return {{"q", g.field().modulus()}, {"N", g.n()}, {"K", g.k()}, {"G", std::move(rows)}};
}

}  // namespace pfr
