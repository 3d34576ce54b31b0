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

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "pfr/field.hpp"

namespace pfr {

/// Row-major dense matrix of residues. Small sizes only (minors, K x K solves).
class FpMatrix {
 public:
  FpMatrix() = default;
  FpMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0) {}
  FpMatrix(std::size_t rows, std::size_t cols, std::vector<Residue> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) throw std::invalid_argument("FpMatrix: data size mismatch");
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  Residue& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  Residue operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<const Residue> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
  std::span<Residue> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }

  FpMatrix select_columns(std::span<const std::size_t> columns) const {
    FpMatrix out(rows_, columns.size());
    for (std::size_t r = 0; r < rows_; ++r) {
      for (std::size_t j = 0; j < columns.size(); ++j) out(r, j) = (*this)(r, columns[j]);
    }
    return out;
  }

  FpMatrix transposed() const {
    FpMatrix out(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r) {
      for (std::size_t c = 0; c < cols_; ++c) out(c, r) = (*this)(r, c);
    }
    return out;
  }

  bool operator==(const FpMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Residue> data_;
};

namespace detail {

// In-place Gauss-Jordan; returns rank and the determinant factor of the
// swaps/pivots taken over the first min(rows, cols) columns.
inline std::size_t row_reduce(const PrimeField& f, FpMatrix& m, Residue* det_out = nullptr) {
  std::size_t rank = 0;
  Residue det = 1 % f.modulus();
  for (std::size_t c = 0; c < m.cols() && rank < m.rows(); ++c) {
    std::size_t pivot = rank;
    while (pivot < m.rows() && m(pivot, c) == 0) ++pivot;
    if (pivot == m.rows()) {
      det = 0;
      continue;
    }
    if (pivot != rank) {
      for (std::size_t j = 0; j < m.cols(); ++j) std::swap(m(pivot, j), m(rank, j));
      det = f.neg(det);
    }
    const Residue p = m(rank, c);
    det = f.mul(det, p);
    const Residue pinv = f.inv(p);
    for (std::size_t j = 0; j < m.cols(); ++j) m(rank, j) = f.mul(m(rank, j), pinv);
    for (std::size_t r = 0; r < m.rows(); ++r) {
      if (r == rank || m(r, c) == 0) continue;
      const Residue factor = m(r, c);
      for (std::size_t j = 0; j < m.cols(); ++j) {
        m(r, j) = f.sub(m(r, j), f.mul(factor, m(rank, j)));
      }
    }
    ++rank;
  }
  if (det_out != nullptr) *det_out = (rank == m.rows() && m.rows() == m.cols()) ? det : 0;
  return rank;
}

}  // namespace detail

inline std::size_t rank(const PrimeField& f, FpMatrix m) { return detail::row_reduce(f, m); }

inline Residue determinant(const PrimeField& f, FpMatrix m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("determinant of non-square matrix");
  Residue det = 0;
  detail::row_reduce(f, m, &det);
  return det;
}

/// Inverse of a square matrix, or nullopt when singular.
inline std::optional<FpMatrix> inverse(const PrimeField& f, const FpMatrix& m) {
  const std::size_t n = m.rows();
  if (n != m.cols()) throw std::invalid_argument("inverse of non-square matrix");
  FpMatrix aug(n, 2 * n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) aug(r, c) = m(r, c);
    aug(r, n + r) = 1 % f.modulus();
  }
  detail::row_reduce(f, aug);
  for (std::size_t r = 0; r < n; ++r) {
    if (aug(r, r) != 1 % f.modulus()) return std::nullopt;
  }
  FpMatrix out(n, n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) out(r, c) = aug(r, n + c);
  }
  return out;
}

inline std::vector<Residue> multiply(const PrimeField& f, const FpMatrix& m, std::span<const Residue> x) {
  if (x.size() != m.cols()) throw std::invalid_argument("matrix-vector dimension mismatch");
  std::vector<Residue> y(m.rows(), 0);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    Residue acc = 0;
    for (std::size_t c = 0; c < m.cols(); ++c) acc = f.add(acc, f.mul(m(r, c), x[c]));
    y[r] = acc;
  }
  return y;
}

inline Residue dot(const PrimeField& f, std::span<const Residue> a, std::span<const Residue> b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot product dimension mismatch");
  Residue acc = 0;
  for (std::size_t i = 0; i < a.size(); ++i) acc = f.add(acc, f.mul(a[i], b[i]));
  return acc;
}

/// Expresses `target` as a combination of the rows of `basis`: returns c with
/// sum_i c_i * basis.row(i) == target, or nullopt if target is outside the row
/// space. When the rows are dependent one particular solution is returned.
inline std::optional<std::vector<Residue>> express_in_rows(const PrimeField& f, const FpMatrix& basis,
                                                           std::span<const Residue> target) {
  const std::size_t n = basis.rows();
  const std::size_t width = basis.cols();
  if (target.size() != width) throw std::invalid_argument("express_in_rows: width mismatch");
  // Solve basis^T c = target via the augmented system [basis^T | target].
  FpMatrix aug(width, n + 1);
  for (std::size_t r = 0; r < width; ++r) {
    for (std::size_t i = 0; i < n; ++i) aug(r, i) = basis(i, r);
    aug(r, n) = target[r];
  }
  detail::row_reduce(f, aug);
  std::vector<Residue> coeff(n, 0);
  for (std::size_t r = 0; r < width; ++r) {
    std::size_t lead = 0;
    while (lead <= n && aug(r, lead) == 0) ++lead;
    if (lead == n) return std::nullopt;  // 0 = nonzero
    if (lead > n) break;                 // zero row, and all later rows too
    coeff[lead] = aug(r, n);
  }
  return coeff;
}

/// Multi-target form of express_in_rows: row i of the result expresses
/// targets.row(i) in the rows of `basis`. One reduction serves every target.
inline std::optional<std::vector<std::vector<Residue>>> express_rows(const PrimeField& f, const FpMatrix& basis,
                                                                      const FpMatrix& targets) {
  const std::size_t n = basis.rows();
  const std::size_t width = basis.cols();
  const std::size_t e = targets.rows();
  if (targets.cols() != width) throw std::invalid_argument("express_rows: width mismatch");
  FpMatrix aug(width, n + e);
  for (std::size_t r = 0; r < width; ++r) {
    for (std::size_t i = 0; i < n; ++i) aug(r, i) = basis(i, r);
    for (std::size_t i = 0; i < e; ++i) aug(r, n + i) = targets(i, r);
  }
  // Reduce only over the basis columns; the targets ride along.
  std::size_t rank = 0;
  std::vector<std::size_t> pivot_col;
  for (std::size_t c = 0; c < n && rank < width; ++c) {
    std::size_t p = rank;
    while (p < width && aug(p, c) == 0) ++p;
    if (p == width) continue;
    if (p != rank) {
      for (std::size_t j = 0; j < aug.cols(); ++j) std::swap(aug(p, j), aug(rank, j));
    }
    const Residue pinv = f.inv(aug(rank, c));
    for (std::size_t j = 0; j < aug.cols(); ++j) aug(rank, j) = f.mul(aug(rank, j), pinv);
    for (std::size_t r = 0; r < width; ++r) {
      if (r == rank || aug(r, c) == 0) continue;
      const Residue factor = aug(r, c);
      for (std::size_t j = 0; j < aug.cols(); ++j) aug(r, j) = f.sub(aug(r, j), f.mul(factor, aug(rank, j)));
    }
    pivot_col.push_back(c);
    ++rank;
  }
  for (std::size_t r = rank; r < width; ++r) {
    for (std::size_t i = 0; i < e; ++i) {
      if (aug(r, n + i) != 0) return std::nullopt;
    }
  }
  std::vector<std::vector<Residue>> out(e, std::vector<Residue>(n, 0));
  for (std::size_t r = 0; r < rank; ++r) {
    for (std::size_t i = 0; i < e; ++i) out[i][pivot_col[r]] = aug(r, n + i);
  }
  return out;
}

}  // namespace pfr
