// SPDX-FileCopyrightText: 2026 The cellperm authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <complex>
#include <span>
#include <stdexcept>
#include <type_traits>
#include <vector>

#include "cellperm/simd.hpp"

namespace cellperm {

using cplx = std::complex<double>;
using CVec = std::vector<cplx>;

template <class T>
struct Triplet {
  int row;
  int col;
  T value;
};

/// Compressed-row sparse matrix with sorted, unique column indices per row.
template <class T>
class CsrMatrix {
 public:
  CsrMatrix() = default;
  CsrMatrix(int rows, int cols) : rows_(rows), cols_(cols), row_ptr_(rows + 1, 0) {}

  /// Duplicates are summed. Entries are kept even if they sum to zero so the
  /// pattern only depends on the connectivity.
  static CsrMatrix from_triplets(int rows, int cols, std::vector<Triplet<T>> trips) {
    for (const auto& t : trips) {
      if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols)
        throw std::out_of_range("triplet outside matrix bounds");
    }
    std::sort(trips.begin(), trips.end(), [](const Triplet<T>& a, const Triplet<T>& b) {
      return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    CsrMatrix m(rows, cols);
    m.col_.reserve(trips.size());
    m.val_.reserve(trips.size());
    int last_row = -1, last_col = -1;
    for (const auto& t : trips) {
      if (t.row == last_row && t.col == last_col) {
        m.val_.back() += t.value;
        continue;
      }
      m.col_.push_back(t.col);
      m.val_.push_back(t.value);
      ++m.row_ptr_[t.row + 1];
      last_row = t.row;
      last_col = t.col;
    }
    for (int r = 0; r < rows; ++r) m.row_ptr_[r + 1] += m.row_ptr_[r];
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int nnz() const { return static_cast<int>(val_.size()); }
  const std::vector<int>& row_ptr() const { return row_ptr_; }
  const std::vector<int>& col_index() const { return col_; }
  const std::vector<T>& values() const { return val_; }
  std::vector<T>& values() { return val_; }

  T at(int r, int c) const {
    const auto b = col_.begin() + row_ptr_[r];
    const auto e = col_.begin() + row_ptr_[r + 1];
    const auto it = std::lower_bound(b, e, c);
    return (it != e && *it == c) ? val_[it - col_.begin()] : T{};
  }

  /// Rows with no stored entries (a structurally singular system has one).
  int empty_rows() const {
    int n = 0;
    for (int r = 0; r < rows_; ++r) n += row_ptr_[r] == row_ptr_[r + 1];
    return n;
  }

  /// y = A x
  void multiply(std::span<const cplx> x, std::span<cplx> y) const {
    if (static_cast<int>(x.size()) != cols_ || static_cast<int>(y.size()) != rows_)
      throw std::invalid_argument("spmv: dimension mismatch");
    if constexpr (std::is_same_v<T, double>) {
      simd::active().spmv_real(rows_, row_ptr_.data(), col_.data(), val_.data(), x.data(),
                               y.data());
    } else {
      simd::active().spmv_complex(rows_, row_ptr_.data(), col_.data(), val_.data(), x.data(),
                                  y.data());
    }
  }

  CVec operator*(std::span<const cplx> x) const {
    CVec y(rows_);
    multiply(x, y);
    return y;
  }

  /// Block A[rows, cols] given index lists into this matrix.
  CsrMatrix submatrix(std::span<const int> rows, std::span<const int> cols) const {
    std::vector<int> cmap(cols_, -1);
    for (std::size_t k = 0; k < cols.size(); ++k) cmap[cols[k]] = static_cast<int>(k);
    CsrMatrix m(static_cast<int>(rows.size()), static_cast<int>(cols.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const int r = rows[i];
      std::vector<std::pair<int, T>> row;
      for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
        if (cmap[col_[k]] >= 0) row.emplace_back(cmap[col_[k]], val_[k]);
      }
      std::sort(row.begin(), row.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
      for (const auto& [c, v] : row) {
        m.col_.push_back(c);
        m.val_.push_back(v);
      }
      m.row_ptr_[i + 1] = static_cast<int>(m.col_.size());
    }
    return m;
  }

  CsrMatrix transpose() const {
    std::vector<Triplet<T>> t;
    t.reserve(val_.size());
    for (int r = 0; r < rows_; ++r)
      for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) t.push_back({col_[k], r, val_[k]});
    return from_triplets(cols_, rows_, std::move(t));
  }

  /// Appends entries (shifted by an offset) to a triplet list.
  template <class U>
  void append_to(std::vector<Triplet<U>>& out, int row_off, int col_off, U scale = U(1)) const {
    for (int r = 0; r < rows_; ++r)
      for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
        out.push_back({r + row_off, col_[k] + col_off, scale * U(val_[k])});
  }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<int> row_ptr_{0};
  std::vector<int> col_;
  std::vector<T> val_;
};

using RealCsr = CsrMatrix<double>;
using ComplexCsr = CsrMatrix<cplx>;

/// scale * A as a complex matrix.
ComplexCsr to_complex(const RealCsr& a, double scale = 1.0);

/// a * A + b * B on the union pattern.
ComplexCsr combine(const RealCsr& a_mat, cplx a, const RealCsr& b_mat, cplx b);

/// x^H A y for real A.
cplx bilinear_conj(const RealCsr& a, std::span<const cplx> x, std::span<const cplx> y);

}  // namespace cellperm
