#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sneed/errors.hpp"
#include "sneed/field.hpp"

namespace sneed {

/// Dense row-major matrix over one GF(2^m). Entries are stored as raw
/// values; the checked FieldElement accessors enforce the shared field.
class FieldMatrix {
public:
  FieldMatrix(std::size_t rows, std::size_t cols, FieldSpec spec)
      : rows_(rows), cols_(cols), spec_(std::move(spec)), v_(rows * cols, 0) {}

  static FieldMatrix identity(std::size_t n, FieldSpec spec) {
    FieldMatrix a(n, n, std::move(spec));
    for (std::size_t i = 0; i < n; ++i) a.set_raw(i, i, 1);
    return a;
  }

  static FieldMatrix from_rows(FieldSpec spec,
                               const std::vector<std::vector<uint16_t>>& rows) {
    const std::size_t r = rows.size();
    const std::size_t c = r == 0 ? 0 : rows.front().size();
    FieldMatrix a(r, c, std::move(spec));
    for (std::size_t i = 0; i < r; ++i) {
      if (rows[i].size() != c)
        throw DimensionError("ragged row list");
      for (std::size_t j = 0; j < c; ++j) a.set_raw(i, j, rows[i][j]);
    }
    return a;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  const FieldSpec& spec() const { return spec_; }

  uint16_t raw(std::size_t r, std::size_t c) const { return v_[r * cols_ + c]; }

  void set_raw(std::size_t r, std::size_t c, uint16_t value) {
    if (value >= spec_.order())
      throw FieldRangeError("entry value " + std::to_string(value) +
                            " outside field");
    v_[r * cols_ + c] = value;
  }

  FieldElement at(std::size_t r, std::size_t c) const {
    return FieldElement(raw(r, c), spec_);
  }

  void set(std::size_t r, std::size_t c, const FieldElement& x) {
    if (x.spec() != spec_)
      throw FieldMismatchError("entry from a different field");
    v_[r * cols_ + c] = x.value();
  }

  /// New matrix keeping the given columns, in the given order.
  FieldMatrix select_columns(std::span<const std::size_t> cols) const {
    FieldMatrix out(rows_, cols.size(), spec_);
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t j = 0; j < cols.size(); ++j) {
        if (cols[j] >= cols_) throw DimensionError("column index out of range");
        out.v_[r * cols.size() + j] = raw(r, cols[j]);
      }
    return out;
  }

  bool operator==(const FieldMatrix& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && spec_ == o.spec_ &&
           v_ == o.v_;
  }

private:
  std::size_t rows_, cols_;
  FieldSpec spec_;
  std::vector<uint16_t> v_;
};

namespace detail {

/// In-place forward elimination on an augmented row-major array of
/// `rows` x `cols` raw values, eliminating the first `elim_cols` columns.
/// Pivot choice is deterministic: lowest column first, first nonzero row.
/// Returns the pivot (row, column) pairs in elimination order.
inline std::vector<std::pair<std::size_t, std::size_t>> eliminate(
    std::vector<uint16_t>& a, std::size_t rows, std::size_t cols,
    std::size_t elim_cols, const FieldSpec& f) {
  std::vector<std::pair<std::size_t, std::size_t>> pivots;
  std::size_t next_row = 0;
  for (std::size_t c = 0; c < elim_cols && next_row < rows; ++c) {
    std::size_t p = next_row;
    while (p < rows && a[p * cols + c] == 0) ++p;
    if (p == rows) continue;
    if (p != next_row)
      for (std::size_t j = 0; j < cols; ++j)
        std::swap(a[p * cols + j], a[next_row * cols + j]);
    const uint16_t piv_inv = f.inv(a[next_row * cols + c]);
    for (std::size_t j = c; j < cols; ++j)
      a[next_row * cols + j] = f.mul(a[next_row * cols + j], piv_inv);
    for (std::size_t r = 0; r < rows; ++r) {
      if (r == next_row) continue;
      const uint16_t factor = a[r * cols + c];
      if (factor == 0) continue;
      for (std::size_t j = c; j < cols; ++j)
        a[r * cols + j] =
            f.add(a[r * cols + j], f.mul(factor, a[next_row * cols + j]));
    }
    pivots.emplace_back(next_row, c);
    ++next_row;
  }
  return pivots;
}

}  // namespace detail

inline std::size_t rank(const FieldMatrix& a) {
  std::vector<uint16_t> w(a.rows() * a.cols());
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < a.cols(); ++c) w[r * a.cols() + c] = a.raw(r, c);
  return detail::eliminate(w, a.rows(), a.cols(), a.cols(), a.spec()).size();
}

/// Solve A x = b for square A by Gauss-Jordan elimination on [A | b].
inline std::vector<uint16_t> gaussian_solve_raw(const FieldMatrix& a,
                                                std::span<const uint16_t> b) {
  const std::size_t n = a.rows();
  if (a.cols() != n) throw DimensionError("coefficient matrix is not square");
  if (b.size() != n) throw DimensionError("right-hand side length mismatch");
  const std::size_t cols = n + 1;
  std::vector<uint16_t> w(n * cols);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) w[r * cols + c] = a.raw(r, c);
    w[r * cols + n] = b[r];
  }
  const auto pivots = detail::eliminate(w, n, cols, n, a.spec());
  if (pivots.size() < n)
    throw SingularMatrixError("coefficient matrix is singular");
  std::vector<uint16_t> x(n);
  for (std::size_t r = 0; r < n; ++r) x[r] = w[r * cols + n];
  return x;
}

inline std::vector<FieldElement> gaussian_solve(
    const FieldMatrix& a, const std::vector<FieldElement>& b) {
  std::vector<uint16_t> raw;
  raw.reserve(b.size());
  for (const auto& e : b) {
    if (e.spec() != a.spec())
      throw FieldMismatchError("right-hand side from a different field");
    raw.push_back(e.value());
  }
  auto x = gaussian_solve_raw(a, raw);
  std::vector<FieldElement> out;
  out.reserve(x.size());
  for (uint16_t v : x) out.emplace_back(v, a.spec());
  return out;
}

inline FieldMatrix invert(const FieldMatrix& a) {
  const std::size_t n = a.rows();
  if (a.cols() != n) throw DimensionError("cannot invert a non-square matrix");
  const std::size_t cols = 2 * n;
  std::vector<uint16_t> w(n * cols, 0);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) w[r * cols + c] = a.raw(r, c);
    w[r * cols + n + r] = 1;
  }
  const auto pivots = detail::eliminate(w, n, cols, n, a.spec());
  if (pivots.size() < n) throw SingularMatrixError("matrix is singular");
  FieldMatrix out(n, n, a.spec());
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) out.set_raw(r, c, w[r * cols + n + c]);
  return out;
}

inline FieldMatrix mat_mul(const FieldMatrix& a, const FieldMatrix& b) {
  if (a.spec() != b.spec()) throw FieldMismatchError("matrix field mismatch");
  if (a.cols() != b.rows()) throw DimensionError("inner dimension mismatch");
  const FieldSpec& f = a.spec();
  FieldMatrix out(a.rows(), b.cols(), f);
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const uint16_t arc = a.raw(r, k);
      if (arc == 0) continue;
      for (std::size_t c = 0; c < b.cols(); ++c)
        out.set_raw(r, c, f.add(out.raw(r, c), f.mul(arc, b.raw(k, c))));
    }
  return out;
}

/// k x n generator whose column j holds the powers a^(i*j) of the field
/// generator a, i = 1..k. Any k columns are independent because the column
/// evaluation points a^j are distinct and nonzero, which needs n <= q-1.
inline FieldMatrix build_vandermonde(std::size_t k, std::size_t n,
                                     const FieldSpec& spec) {
  if (k < 1 || k > n) throw DimensionError("need 1 <= k <= n");
  if (n > spec.order() - 1)
    throw FieldTooSmallError("code length " + std::to_string(n) +
                             " exceeds q-1 = " +
                             std::to_string(spec.order() - 1));
  FieldMatrix g(k, n, spec);
  for (std::size_t j = 0; j < n; ++j) {
    const uint16_t point = spec.pow(spec.generator(), j);
    uint16_t cell = 1;
    for (std::size_t i = 0; i < k; ++i) {
      cell = spec.mul(cell, point);  // cell = point^(i+1)
      g.set_raw(i, j, cell);
    }
  }
  return g;
}

}  // namespace sneed
