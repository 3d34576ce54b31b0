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
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pfr/canonical.hpp"
#include "pfr/params.hpp"
#include "pfr/query.hpp"
#include "pfr/query_matrix.hpp"

namespace pfr {

/// (1 - R_c) / (1 - R_c^M) with R_c = K/N.
inline Rational scheme_rate(std::size_t n, std::size_t k, std::size_t m) {
  const Rational rc{BigInt(k), BigInt(n)};
  Rational rc_m = 1;
  for (std::size_t i = 0; i < m; ++i) rc_m *= rc;
  return (1 - rc) / (1 - rc_m);
}

inline Rational scheme_rate(const SchemeParams& p) { return scheme_rate(p.n, p.k, p.m); }

/// Coded PIR over all V virtual messages: (1 - R_c) / (1 - R_c^V).
inline Rational virtual_pir_rate(const SchemeParams& p) { return scheme_rate(p.n, p.k, p.v); }

struct ChainLine {
  std::string label;
  Rational value;
};

struct RateReport {
  SchemeParams params;
  BigInt length = 0;      // L
  BigInt downloaded = 0;  // D as counted
  Rational achieved;      // L / D
  Rational closed_form;   // (1 - R_c)/(1 - R_c^M)
  std::vector<BigInt> retained_per_block;
  std::vector<BigInt> eliminated_per_block;
  std::vector<std::size_t> eliminated_types_per_block;
  std::vector<ChainLine> chain;  // each line must equal L / D
  std::vector<ChainLine> decoded_chain;  // each line must equal L
  std::optional<std::string> first_violation;

  bool consistent() const { return !first_violation.has_value(); }

  nlohmann::json to_json() const {
    nlohmann::json chain_json = nlohmann::json::array();
    for (const auto& c : chain) chain_json.push_back({{"line", c.label}, {"value", to_string(c.value)}});
    nlohmann::json blocks = nlohmann::json::array();
    for (std::size_t b = 0; b < retained_per_block.size(); ++b) {
      blocks.push_back({{"block", b + 1},
                        {"retained", retained_per_block[b].str()},
                        {"eliminated", eliminated_per_block[b].str()},
                        {"eliminated_types", eliminated_types_per_block[b]}});
    }
    nlohmann::json j = {{"N", params.n},
                        {"K", params.k},
                        {"M", params.m},
                        {"q", params.q},
                        {"V", params.v},
                        {"L", length.str()},
                        {"D", downloaded.str()},
                        {"rate", to_string(achieved)},
                        {"closed_form", to_string(closed_form)},
                        {"consistent", consistent()},
                        {"blocks", std::move(blocks)},
                        {"chain", std::move(chain_json)}};
    if (first_violation) j["first_violation"] = *first_violation;
    return j;
  }
};

namespace detail {

// sum_{v=lo}^{hi} C(a, v) K^(V-v) (N-K)^(v + shift)
inline BigInt binomial_sum(std::size_t a, std::size_t lo, std::size_t hi, std::size_t v_total, std::size_t n,
                           std::size_t k, int shift, std::size_t k_offset = 0) {
  BigInt s = 0;
  for (std::size_t v = lo; v <= hi; ++v) {
    if (v > a) break;
    s += binomial(a, v) * big_pow(k, v_total - v - k_offset) * big_pow(n - k, v + shift);
  }
  return s;
}

}  // namespace detail

/// Checks a counted download against every line of the closed-form rate
/// derivation, all as exact rationals.
inline RateReport rate_report(const SchemeParams& p, const QueryCensus& c) {
  RateReport r;
  r.params = p;
  r.length = p.length_big();
  r.downloaded = c.downloaded;
  r.retained_per_block = c.retained_per_block;
  r.eliminated_per_block = c.eliminated_per_block;
  r.eliminated_types_per_block = c.eliminated_types_per_block;
  if (r.downloaded == 0) {
    r.first_violation = "nothing was downloaded";
    return r;
  }
  r.achieved = Rational(r.length, r.downloaded);
  r.closed_form = scheme_rate(p);

  const std::size_t n = p.n, k = p.k, m = p.m, v = p.v;
  const BigInt nv = big_pow(n, v), kv = big_pow(k, v), km = big_pow(k, m);
  const Rational head = Rational(nv) * Rational(BigInt(n - k), BigInt(n));

  BigInt per_db_round = 0;
  for (std::size_t b = 1; b <= v; ++b) {
    per_db_round += (binomial(v, b) - binomial(v - m, b)) * big_pow(k, v - b) * big_pow(n - k, b - 1);
  }
  const BigInt d_sum = BigInt(k) * n * per_db_round;
  const BigInt d_closed_num = BigInt(n) * k * (nv - km * big_pow(n, v - m));

  BigInt split = 0;
  for (std::size_t b = 1; b <= v; ++b) {
    split += binomial(v, b) * big_pow(k, v - b) * big_pow(n - k, b) -
             binomial(v - m, b) * big_pow(k, v - b) * big_pow(n - k, b);
  }
  const BigInt truncated = detail::binomial_sum(v - m, 1, v - m, v, n, k, 0);
  const BigInt factored = km * detail::binomial_sum(v - m, 1, v - m, v, n, k, 0, m);

  r.chain = {
      {"L / D counted", r.achieved},
      {"K N^V / (K N sum_v (C(V,v) - C(V-M,v)) K^(V-v) (N-K)^(v-1))", Rational(r.length, d_sum)},
      {"K N^V (N-K) / (N K (N^V - K^M N^(V-M)))", Rational(r.length * (n - k), d_closed_num)},
      {"N^V (N-K)/N / sum_v (C(V,v) - C(V-M,v)) K^(V-v) (N-K)^v", head / Rational(split)},
      {"N^V (N-K)/N / ((N^V - K^V) - sum_{v<=V-M} C(V-M,v) K^(V-v) (N-K)^v)", head / Rational(nv - kv - truncated)},
      {"N^V (N-K)/N / ((N^V - K^V) - K^M sum_{v<=V-M} C(V-M,v) K^(V-M-v) (N-K)^v)",
       head / Rational(nv - kv - factored)},
      {"N^V (1-K/N) / ((N^V - K^V) - K^M (N^(V-M) - K^(V-M)))",
       head / Rational(nv - kv - km * (big_pow(n, v - m) - big_pow(k, v - m)))},
      {"N^V (1-K/N) / ((N^V - K^V) - K^M N^(V-M) + K^V)", head / Rational(nv - kv - km * big_pow(n, v - m) + kv)},
      {"N^V (1-K/N) / (N^V - K^M N^(V-M))", head / Rational(nv - km * big_pow(n, v - m))},
      {"(1 - R_c) / (1 - R_c^M)", r.closed_form},
  };
  for (const auto& line : r.chain) {
    if (line.value != r.achieved) {
      r.first_violation = line.label + " = " + to_string(line.value) + " but L/D = " + to_string(r.achieved);
      break;
    }
  }

  // Desired symbols recovered by the decoder, block by block.
  BigInt recovered = 0;
  for (std::size_t b = 1; b <= v; ++b) {
    recovered += BigInt(k) * n * (binomial(v, b) - binomial(v - 1, b)) * big_pow(k, v - b) * big_pow(n - k, b - 1);
  }
  r.decoded_chain = {
      {"K N sum_v (C(V,v) - C(V-1,v)) K^(V-v) (N-K)^(v-1)", Rational(recovered)},
      {"K N/(N-K) (N^V - K N^(V-1))", Rational(BigInt(k) * n * (nv - BigInt(k) * big_pow(n, v - 1)), BigInt(n - k))},
      {"K N^V", Rational(r.length)},
  };
  if (!r.first_violation) {
    for (const auto& line : r.decoded_chain) {
      if (line.value != Rational(r.length)) {
        r.first_violation = line.label + " = " + to_string(line.value) + " but L = " + r.length.str();
        break;
      }
    }
  }
  return r;
}

inline RateReport rate_report(const QuerySet& qs) { return rate_report(qs.params(), census(qs)); }

struct BaselineComparison {
  Rational scheme;
  Rational baseline;
  Rational ratio;  // scheme / baseline
  bool equal = false;
};

inline BaselineComparison baseline_rates(const SchemeParams& p) {
  BaselineComparison b;
  b.scheme = scheme_rate(p);
  b.baseline = virtual_pir_rate(p);
  b.ratio = b.scheme / b.baseline;
  b.equal = b.scheme == b.baseline;
  return b;
}

/// Outer bound for two combinations with entropies H1 = H(w1) and
/// H12 = H(w1, w2), in q-ary units: N H1 / (K H12 + H1 (N - K)).
inline Rational outer_bound_v2(const Rational& h1, const Rational& h12, std::size_t n, std::size_t k) {
  if (!(h1 > 0) || h12 < h1 || h12 > 2 * h1) throw ParameterError("need 0 < H1 <= H12 <= 2 H1");
  if (k < 1 || k >= n) throw ParameterError("need 1 <= K < N");
  return Rational(BigInt(n)) * h1 / (Rational(BigInt(k)) * h12 + h1 * Rational(BigInt(n - k)));
}

struct PrivacyReport {
  SchemeParams params;
  // fingerprints[db][nu], 64-bit digests of the canonical forms
  std::vector<std::vector<std::uint64_t>> fingerprints;
  bool structural_private = false;
  std::optional<std::string> first_difference;

  nlohmann::json to_json() const {
    nlohmann::json dbs = nlohmann::json::array();
    for (std::size_t db = 0; db < fingerprints.size(); ++db) {
      nlohmann::json row = nlohmann::json::array();
      for (auto f : fingerprints[db]) {
        char buf[17];
        std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(f));
        row.push_back(buf);
      }
      dbs.push_back({{"db", db + 1}, {"fingerprints", std::move(row)}});
    }
    nlohmann::json j = {{"N", params.n}, {"K", params.k}, {"M", params.m}, {"q", params.q},
                        {"V", params.v}, {"structural_private", structural_private}, {"databases", std::move(dbs)}};
    if (first_difference) j["first_difference"] = *first_difference;
    return j;
  }
};

/// Generates every nu under the identity assignment and compares what each
/// database receives, up to row order, slot relabeling and per-slot signs.
inline PrivacyReport privacy_audit_structural(const SchemeParams& p, GenerationOptions opts = {}) {
  PrivacyReport r;
  r.params = p;
  r.fingerprints.assign(p.n, {});
  const auto identity = IndexAssignment::identity(p.segments());
  Canonicalizer canon;
  std::vector<std::string> reference(p.n);
  r.structural_private = true;
  for (std::size_t nu = 0; nu < p.v; ++nu) {
    const auto qs = generate_query_set(p, nu, opts);
    for (std::size_t db = 0; db < p.n; ++db) {
      const auto form = canon.canonical_form(lower_to_matrix(qs, db, identity).matrix);
      r.fingerprints[db].push_back(fingerprint(form));
      if (nu == 0) {
        reference[db] = form;
      } else if (form != reference[db] && r.structural_private) {
        r.structural_private = false;
        r.first_difference = "db " + std::to_string(db + 1) + ": nu=" + std::to_string(nu + 1) + " differs from nu=1";
      }
    }
  }
  return r;
}

/// Observation recorded per sampled query matrix: its canonical form plus the
/// sign-free coefficient classes of the first row as received. The second part
/// is what row ordering could leak.
inline std::string observed_feature(const QueryMatrix& qm, Canonicalizer& canon) {
  std::string f = std::to_string(fingerprint(canon.canonical_form(qm)));
  if (qm.rows() == 0) return f;
  const detail::LabelCodec codec(qm.q(), qm.messages());
  std::map<std::size_t, std::vector<Residue>> by_slot;
  for (const auto& e : qm.row(0)) {
    auto& v = by_slot[e.column % qm.segments()];
    if (v.empty()) v.assign(qm.messages(), 0);
    v[e.column / qm.segments()] = e.value;
  }
  std::vector<detail::LabelCode> classes;
  for (const auto& [s, v] : by_slot) classes.push_back(codec.unsigned_class(codec.encode(v)));
  std::sort(classes.begin(), classes.end());
  f += "|";
  for (auto c : classes) f += std::to_string(c) + ",";
  return f;
}

struct StatisticalReport {
  std::size_t nu_a = 0, nu_b = 0;
  std::size_t samples = 0;
  std::vector<double> tv_per_db;
  double max_tv = 0;
};

/// Monte-Carlo total variation between the per-database observation
/// distributions for two requested combinations.
inline StatisticalReport privacy_audit_statistical(const SchemeParams& p, std::size_t nu_a, std::size_t nu_b,
                                                   std::size_t samples, std::uint64_t seed = 1,
                                                   RowOrder order = RowOrder::Canonical) {
  if (samples < 100) throw ParameterError("statistical audit needs at least 100 samples");
  StatisticalReport r{nu_a, nu_b, samples, std::vector<double>(p.n, 0.0), 0.0};
  const QuerySet qa = generate_query_set(p, nu_a);
  const QuerySet qb = generate_query_set(p, nu_b);
  std::vector<std::map<std::string, long>> diff(p.n);
  Canonicalizer canon;
  std::mt19937_64 seeds(seed);
  for (std::size_t s = 0; s < samples; ++s) {
    const auto sa = make_index_assignment(seeds(), p.segments());
    const auto sb = make_index_assignment(seeds(), p.segments());
    for (std::size_t db = 0; db < p.n; ++db) {
      ++diff[db][observed_feature(lower_to_matrix(qa, db, sa, order).matrix, canon)];
      --diff[db][observed_feature(lower_to_matrix(qb, db, sb, order).matrix, canon)];
    }
  }
  for (std::size_t db = 0; db < p.n; ++db) {
    long total = 0;
    for (const auto& [feature, d] : diff[db]) total += d < 0 ? -d : d;
    r.tv_per_db[db] = 0.5 * static_cast<double>(total) / static_cast<double>(samples);
    r.max_tv = std::max(r.max_tv, r.tv_per_db[db]);
  }
  return r;
}

}  // namespace pfr
