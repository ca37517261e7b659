#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <vector>

#include "ddw/rational.hpp"
#include "ddw/variable.hpp"

namespace ddw {

struct NoSolution : Error {
  using Error::Error;
};

namespace linalg {

/// Dense row-major rational matrix.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<Rational> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c) {}
  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
  }

  Rational& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  const Rational& operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

  Matrix transpose() const {
    Matrix t(cols, rows);
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < cols; ++j) t(j, i) = (*this)(i, j);
    return t;
  }
  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    Matrix r(a.rows, b.cols);
    for (std::size_t i = 0; i < a.rows; ++i)
      for (std::size_t k = 0; k < a.cols; ++k) {
        const Rational& x = a(i, k);
        if (x.is_zero()) continue;
        for (std::size_t j = 0; j < b.cols; ++j)
          if (!b(k, j).is_zero()) r(i, j) += x * b(k, j);
      }
    return r;
  }
  friend Matrix operator-(const Matrix& a, const Matrix& b) {
    Matrix r = a;
    for (std::size_t i = 0; i < r.data.size(); ++i) r.data[i] -= b.data[i];
    return r;
  }
  bool is_zero() const {
    for (const auto& x : data)
      if (!x.is_zero()) return false;
    return true;
  }
  friend bool operator==(const Matrix&, const Matrix&) = default;
};

/// Reduced row echelon form in place; returns pivot columns in row order.
inline std::vector<std::size_t> rref(Matrix& m) {
  std::vector<std::size_t> pivots;
  std::size_t row = 0;
  for (std::size_t col = 0; col < m.cols && row < m.rows; ++col) {
    std::size_t p = row;
    while (p < m.rows && m(p, col).is_zero()) ++p;
    if (p == m.rows) continue;
    if (p != row)
      for (std::size_t j = 0; j < m.cols; ++j) std::swap(m(p, j), m(row, j));
    Rational inv = Rational(1) / m(row, col);
    for (std::size_t j = 0; j < m.cols; ++j) m(row, j) *= inv;
    for (std::size_t i = 0; i < m.rows; ++i) {
      if (i == row || m(i, col).is_zero()) continue;
      Rational f = m(i, col);
      for (std::size_t j = 0; j < m.cols; ++j)
        if (!m(row, j).is_zero()) m(i, j) -= f * m(row, j);
    }
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

inline std::size_t rank(Matrix m) { return rref(m).size(); }

/// Basis of {x : m x = 0}, one column vector per entry.
inline std::vector<std::vector<Rational>> nullspace(Matrix m) {
  auto piv = rref(m);
  std::vector<bool> is_pivot(m.cols, false);
  for (auto c : piv) is_pivot[c] = true;
  std::vector<std::vector<Rational>> basis;
  for (std::size_t free = 0; free < m.cols; ++free) {
    if (is_pivot[free]) continue;
    std::vector<Rational> v(m.cols);
    v[free] = 1;
    for (std::size_t r = 0; r < piv.size(); ++r) v[piv[r]] = -m(r, free);
    basis.push_back(std::move(v));
  }
  return basis;
}

/// Solve the square nonsingular system a x = b.
inline std::vector<Rational> solve_square(Matrix a, std::vector<Rational> b) {
  const std::size_t n = a.rows;
  Matrix aug(n, n + 1);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) aug(i, j) = a(i, j);
    aug(i, n) = b[i];
  }
  auto piv = rref(aug);
  if (piv.size() != n || piv.back() != n - 1) throw NoSolution("singular linear system");
  std::vector<Rational> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = aug(i, n);
  return x;
}

/// Moore-Penrose pseudoinverse through a full-rank factorization m = F G.
inline Matrix pseudo_inverse(const Matrix& m) {
  Matrix r = m;
  auto piv = rref(r);
  const std::size_t k = piv.size();
  if (k == 0) return Matrix(m.cols, m.rows);
  Matrix g(k, m.cols);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < m.cols; ++j) g(i, j) = r(i, j);
  Matrix f(m.rows, k);
  for (std::size_t i = 0; i < m.rows; ++i)
    for (std::size_t j = 0; j < k; ++j) f(i, j) = m(i, piv[j]);
  auto inverse = [](const Matrix& s) {
    Matrix inv(s.rows, s.rows);
    for (std::size_t c = 0; c < s.rows; ++c) {
      std::vector<Rational> e(s.rows);
      e[c] = 1;
      auto x = solve_square(s, e);
      for (std::size_t i = 0; i < s.rows; ++i) inv(i, c) = x[i];
    }
    return inv;
  };
  Matrix gt = g.transpose();
  Matrix ft = f.transpose();
  return gt * inverse(g * gt) * inverse(ft * f) * ft;
}

/// Sparse row: column -> coefficient.
using SparseRow = std::map<std::size_t, Rational>;

/// Minimal Euclidean-norm solution of rows * x = rhs over the rationals.
/// Throws NoSolution when the system is inconsistent.
inline std::vector<Rational> min_norm_solution(std::vector<SparseRow> rows, std::vector<Rational> rhs,
                                               std::size_t ncols) {
  // sparse Gauss-Jordan elimination
  std::vector<std::size_t> pivot_of_row;
  std::vector<bool> used(rows.size(), false);
  std::vector<std::size_t> basis_rows;
  for (std::size_t col = 0; col < ncols; ++col) {
    std::size_t p = rows.size();
    for (std::size_t i = 0; i < rows.size(); ++i)
      if (!used[i] && rows[i].count(col)) {
        if (p == rows.size() || rows[i].size() < rows[p].size()) p = i;
      }
    if (p == rows.size()) continue;
    used[p] = true;
    Rational inv = Rational(1) / rows[p].at(col);
    for (auto& [c, v] : rows[p]) v *= inv;
    rhs[p] *= inv;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i == p) continue;
      auto it = rows[i].find(col);
      if (it == rows[i].end()) continue;
      Rational f = it->second;
      for (const auto& [c, v] : rows[p]) {
        Rational nv = rows[i][c] - f * v;
        if (nv.is_zero())
          rows[i].erase(c);
        else
          rows[i][c] = nv;
      }
      rhs[i] -= f * rhs[p];
    }
    basis_rows.push_back(p);
  }
  for (std::size_t i = 0; i < rows.size(); ++i)
    if (!used[i] && !rhs[i].is_zero()) throw NoSolution("inconsistent linear system");

  // x = R^T (R R^T)^{-1} b on the independent rows
  const std::size_t r = basis_rows.size();
  std::vector<Rational> x(ncols);
  if (r == 0) return x;
  Matrix gram(r, r);
  std::vector<Rational> b(r);
  for (std::size_t i = 0; i < r; ++i) {
    b[i] = rhs[basis_rows[i]];
    for (std::size_t j = i; j < r; ++j) {
      Rational s;
      const auto& ri = rows[basis_rows[i]];
      const auto& rj = rows[basis_rows[j]];
      for (const auto& [c, v] : ri) {
        auto it = rj.find(c);
        if (it != rj.end()) s += v * it->second;
      }
      gram(i, j) = s;
      gram(j, i) = s;
    }
  }
  auto y = solve_square(gram, b);
  for (std::size_t i = 0; i < r; ++i)
    for (const auto& [c, v] : rows[basis_rows[i]]) x[c] += v * y[i];
  return x;
}

}  // namespace linalg
}  // namespace ddw
