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

// Little-endian byte helpers shared by the shard, query and answer encodings.

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pfr/field.hpp"

namespace pfr::wire {

using Bytes = std::vector<std::uint8_t>;

class DecodeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Smallest byte width that holds every residue of F_q.
constexpr std::size_t element_width(std::uint32_t q) {
  const std::uint64_t max = q - 1;
  if (max <= 0xffU) return 1;
  if (max <= 0xffffU) return 2;
  return 4;
}

class Writer {
 public:
  void u32(std::uint32_t v) { put(v, 4); }
  void put(std::uint64_t v, std::size_t width) {
    for (std::size_t i = 0; i < width; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  Bytes take() { return std::move(out_); }
  void reserve(std::size_t n) { out_.reserve(n); }

 private:
  Bytes out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}

  std::uint32_t u32() { return static_cast<std::uint32_t>(get(4)); }
  std::uint64_t get(std::size_t width) {
    if (pos_ + width > in_.size()) throw DecodeError("truncated payload");
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < width; ++i) v |= std::uint64_t{in_[pos_ + i]} << (8 * i);
    pos_ += width;
    return v;
  }
  Residue element(const PrimeField& f) {
    const auto v = get(element_width(f.modulus()));
    if (v >= f.modulus()) throw DecodeError("field element " + std::to_string(v) + " out of range");
    return static_cast<Residue>(v);
  }
  bool done() const { return pos_ == in_.size(); }
  void expect_done() const {
    if (!done()) throw DecodeError("trailing bytes in payload");
  }

 private:
  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

}  // namespace pfr::wire
