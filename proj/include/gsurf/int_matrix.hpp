// Copyright 2026 The gsurf Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <utility>
#include <vector>

#include "gsurf/count.hpp"

namespace gsurf {

/// Dense matrix of exact 64-bit integers; every product is overflow
/// checked.
class IntMatrix {
 public:
  IntMatrix() = default;
  IntMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, 0) {}

  static IntMatrix identity(std::size_t n) {
    IntMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  std::int64_t& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  std::int64_t operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::size_t nnz() const {
    std::size_t n = 0;
    for (auto x : data_) n += x != 0;
    return n;
  }

  bool is_upper_triangular() const {
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < std::min(i, cols_); ++j)
        if ((*this)(i, j) != 0) return false;
    return true;
  }

  bool has_unit_diagonal() const {
    for (std::size_t i = 0; i < std::min(rows_, cols_); ++i)
      if ((*this)(i, i) != 1) return false;
    return true;
  }

  bool same_pattern(const IntMatrix& other) const {
    if (rows_ != other.rows_ || cols_ != other.cols_) return false;
    for (std::size_t k = 0; k < data_.size(); ++k)
      if ((data_[k] != 0) != (other.data_[k] != 0)) return false;
    return true;
  }

  /// Copy with row `row` and column `col` removed.
  IntMatrix without(std::size_t row, std::size_t col) const {
    if (row >= rows_ || col >= cols_) throw std::out_of_range("IntMatrix::without");
    IntMatrix m(rows_ - 1, cols_ - 1);
    for (std::size_t i = 0, r = 0; i < rows_; ++i) {
      if (i == row) continue;
      for (std::size_t j = 0, c = 0; j < cols_; ++j) {
        if (j == col) continue;
        m(r, c++) = (*this)(i, j);
      }
      ++r;
    }
    return m;
  }

  /// Submatrix [r0, r0+nr) x [c0, c0+nc).
  IntMatrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
    IntMatrix m(nr, nc);
    for (std::size_t i = 0; i < nr; ++i)
      for (std::size_t j = 0; j < nc; ++j) m(i, j) = (*this)(r0 + i, c0 + j);
    return m;
  }

  friend IntMatrix operator*(const IntMatrix& a, const IntMatrix& b) {
    if (a.cols_ != b.rows_) throw std::invalid_argument("IntMatrix product shape mismatch");
    IntMatrix c(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i) {
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const std::int64_t x = a(i, k);
        if (x == 0) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) {
          if (b(k, j) == 0) continue;
          c(i, j) = checked_add(c(i, j), checked_mul(x, b(k, j)));
        }
      }
    }
    return c;
  }

  friend bool operator==(const IntMatrix&, const IntMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::int64_t> data_;
};

/// Exact determinant by fraction-free (Bareiss) elimination.
inline BigCount determinant(const IntMatrix& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("determinant of non-square matrix");
  const std::size_t n = m.rows();
  if (n == 0) return 1;
  std::vector<std::vector<BigCount>> a(n, std::vector<BigCount>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a[i][j] = m(i, j);
  BigCount previous = 1;
  int sign = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (a[k][k] == 0) {
      std::size_t swap_row = k + 1;
      while (swap_row < n && a[swap_row][k] == 0) ++swap_row;
      if (swap_row == n) return 0;
      std::swap(a[k], a[swap_row]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) {
        a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / previous;
      }
    }
    previous = a[k][k];
  }
  return sign * a[n - 1][n - 1];
}

}  // namespace gsurf
