#pragma once

// Small dense exact linear algebra over Q.

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "ntheta/errors.hpp"
#include "ntheta/rational.hpp"

namespace ntheta::linalg {

using Vector = std::vector<Rational>;
using Matrix = std::vector<Vector>;  // row-major

inline Matrix zeros(std::size_t rows, std::size_t cols) {
  return Matrix(rows, Vector(cols, Rational(0)));
}

inline std::size_t columns(const Matrix& m, std::size_t fallback = 0) {
  return m.empty() ? fallback : m.front().size();
}

/// Reduced row echelon form, in place. Returns the pivot columns.
inline std::vector<std::size_t> rref(Matrix& m) {
  std::vector<std::size_t> pivots;
  const std::size_t rows = m.size();
  const std::size_t cols = columns(m);
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t p = r;
    while (p < rows && m[p][c] == 0) ++p;
    if (p == rows) continue;
    std::swap(m[r], m[p]);
    const Rational inv = 1 / m[r][c];
    for (auto& x : m[r]) x *= inv;
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == r || m[i][c] == 0) continue;
      const Rational k = m[i][c];
      for (std::size_t j = c; j < cols; ++j) m[i][j] -= k * m[r][j];
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

/// Fraction-free (Bareiss) rank: rows are scaled to integers and every
/// elimination step stays in Z.
inline std::size_t rank(const Matrix& m) {
  const std::size_t rows = m.size();
  const std::size_t cols = columns(m);
  std::vector<std::vector<Integer>> a(rows, std::vector<Integer>(cols));
  for (std::size_t i = 0; i < rows; ++i) {
    Integer lcm_den = 1;
    for (const auto& x : m[i]) mpz_lcm(lcm_den.get_mpz_t(), lcm_den.get_mpz_t(), x.get_den_mpz_t());
    for (std::size_t j = 0; j < cols; ++j) a[i][j] = m[i][j].get_num() * (lcm_den / m[i][j].get_den());
  }
  Integer prev = 1;
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t p = r;
    while (p < rows && a[p][c] == 0) ++p;
    if (p == rows) continue;
    std::swap(a[r], a[p]);
    for (std::size_t i = r + 1; i < rows; ++i) {
      for (std::size_t j = c + 1; j < cols; ++j) {
        a[i][j] = a[r][c] * a[i][j] - a[i][c] * a[r][j];
        mpz_divexact(a[i][j].get_mpz_t(), a[i][j].get_mpz_t(), prev.get_mpz_t());
      }
      a[i][c] = 0;
    }
    prev = a[r][c];
    ++r;
  }
  return r;
}

/// Basis of {x : m x = 0}; `cols` is used when m has no rows.
inline std::vector<Vector> nullspace(Matrix m, std::size_t cols) {
  if (!m.empty()) cols = columns(m);
  const auto pivots = rref(m);
  std::vector<bool> is_pivot(cols, false);
  for (auto p : pivots) is_pivot[p] = true;
  std::vector<Vector> basis;
  for (std::size_t free = 0; free < cols; ++free) {
    if (is_pivot[free]) continue;
    Vector v(cols, Rational(0));
    v[free] = 1;
    for (std::size_t r = 0; r < pivots.size(); ++r) v[pivots[r]] = -m[r][free];
    basis.push_back(std::move(v));
  }
  return basis;
}

/// Solves m x = y for surjective m using a fixed right inverse (free
/// variables set to zero). Built once, applied many times.
class RightInverse {
public:
  explicit RightInverse(const Matrix& m) : rows_(m.size()), cols_(columns(m)) {
    // Row-reduce [m | I] to track the row operations.
    Matrix aug(rows_, Vector(cols_ + rows_, Rational(0)));
    for (std::size_t i = 0; i < rows_; ++i) {
      for (std::size_t j = 0; j < cols_; ++j) aug[i][j] = m[i][j];
      aug[i][cols_ + i] = 1;
    }
    std::vector<std::size_t> pivots;
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols_ && r < rows_; ++c) {
      std::size_t p = r;
      while (p < rows_ && aug[p][c] == 0) ++p;
      if (p == rows_) continue;
      std::swap(aug[r], aug[p]);
      const Rational inv = 1 / aug[r][c];
      for (auto& x : aug[r]) x *= inv;
      for (std::size_t i = 0; i < rows_; ++i) {
        if (i == r || aug[i][c] == 0) continue;
        const Rational k = aug[i][c];
        for (std::size_t j = 0; j < aug[i].size(); ++j) aug[i][j] -= k * aug[r][j];
      }
      pivots.push_back(c);
      ++r;
    }
    detail::require(pivots.size() == rows_, "not-surjective", "matrix does not have full row rank");
    pivots_ = std::move(pivots);
    transform_.resize(rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      transform_[i] = Vector(aug[i].begin() + static_cast<std::ptrdiff_t>(cols_), aug[i].end());
  }

  Vector apply(const Vector& y) const {
    Vector x(cols_, Rational(0));
    for (std::size_t r = 0; r < rows_; ++r) {
      Rational v = 0;
      for (std::size_t k = 0; k < rows_; ++k) v += transform_[r][k] * y[k];
      x[pivots_[r]] = v;
    }
    return x;
  }

private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<std::size_t> pivots_;
  Matrix transform_;
};

inline Vector multiply(const Matrix& m, const Vector& x) {
  Vector out(m.size(), Rational(0));
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < x.size(); ++j) out[i] += m[i][j] * x[j];
  return out;
}

} // namespace ntheta::linalg
