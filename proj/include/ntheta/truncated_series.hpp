#pragma once

// Dense univariate series in k[[t]]/(t^(N+1)) and Smith reduction of square
// matrices over that ring.

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ntheta/errors.hpp"
#include "ntheta/power_series.hpp"
#include "ntheta/rational.hpp"

namespace ntheta {

class TruncatedSeries {
public:
  TruncatedSeries() : TruncatedSeries(0) {}

  /// The zero series modulo t^(precision+1).
  explicit TruncatedSeries(int precision) : coeffs_(static_cast<std::size_t>(precision) + 1) {
    detail::require(precision >= 0, "negative-truncation", "series precision must be >= 0");
  }

  TruncatedSeries(std::vector<Rational> coefficients, int precision) : TruncatedSeries(precision) {
    for (std::size_t k = 0; k < coefficients.size() && k < coeffs_.size(); ++k) coeffs_[k] = coefficients[k];
  }

  static TruncatedSeries constant(const Rational& c, int precision) {
    TruncatedSeries s(precision);
    s.coeffs_[0] = c;
    return s;
  }

  /// a + b t
  static TruncatedSeries linear(const Rational& a, const Rational& b, int precision) {
    return TruncatedSeries({a, b}, precision);
  }

  int precision() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }
  const Rational& operator[](std::size_t k) const { return coeffs_[k]; }
  Rational& operator[](std::size_t k) { return coeffs_[k]; }
  const std::vector<Rational>& coefficients() const noexcept { return coeffs_; }

  bool is_zero() const {
    return std::all_of(coeffs_.begin(), coeffs_.end(), [](const Rational& c) { return c == 0; });
  }

  Order order() const {
    for (std::size_t k = 0; k < coeffs_.size(); ++k)
      if (coeffs_[k] != 0) return static_cast<int>(k);
    return std::nullopt;
  }

  bool is_unit() const { return coeffs_[0] != 0; }

  TruncatedSeries with_precision(int precision) const { return TruncatedSeries(coeffs_, precision); }

  /// Multiplicative inverse of a unit.
  TruncatedSeries inverse() const {
    detail::require(is_unit(), "not-a-unit", "series with zero constant term has no inverse");
    const std::size_t n = coeffs_.size();
    TruncatedSeries out(precision());
    const Rational inv0 = 1 / coeffs_[0];
    out.coeffs_[0] = inv0;
    for (std::size_t k = 1; k < n; ++k) {
      Rational acc = 0;
      for (std::size_t i = 1; i <= k; ++i)
        if (coeffs_[i] != 0) acc += coeffs_[i] * out.coeffs_[k - i];
      out.coeffs_[k] = -acc * inv0;
    }
    return out;
  }

  /// Drops the first `k` coefficients (division by t^k); the top k
  /// coefficients of the result are unknown and set to zero.
  TruncatedSeries shifted_down(std::size_t k) const {
    TruncatedSeries out(precision());
    for (std::size_t i = k; i < coeffs_.size(); ++i) out.coeffs_[i - k] = coeffs_[i];
    return out;
  }

  TruncatedSeries operator-() const {
    TruncatedSeries out = *this;
    for (auto& c : out.coeffs_) c = -c;
    return out;
  }

  friend TruncatedSeries operator+(const TruncatedSeries& a, const TruncatedSeries& b) {
    TruncatedSeries out(std::min(a.precision(), b.precision()));
    for (std::size_t k = 0; k < out.coeffs_.size(); ++k) out.coeffs_[k] = a.coeffs_[k] + b.coeffs_[k];
    return out;
  }

  friend TruncatedSeries operator-(const TruncatedSeries& a, const TruncatedSeries& b) { return a + (-b); }

  friend TruncatedSeries operator*(const TruncatedSeries& a, const TruncatedSeries& b) {
    const int p = std::min(a.precision(), b.precision());
    return TruncatedSeries(detail::dense_mul(a.coeffs_, b.coeffs_, p), p);
  }

  friend TruncatedSeries operator*(const Rational& k, const TruncatedSeries& a) {
    TruncatedSeries out = a;
    for (auto& c : out.coeffs_) c *= k;
    return out;
  }

  friend bool operator==(const TruncatedSeries& a, const TruncatedSeries& b) = default;

  PowerSeries to_power_series(std::string name = "t") const {
    return PowerSeries::univariate(coeffs_, precision(), std::move(name));
  }

  std::vector<std::string> to_strings() const {
    std::vector<std::string> out;
    for (const auto& c : coeffs_) out.push_back(ntheta::to_string(c));
    return out;
  }

private:
  std::vector<Rational> coeffs_;
};

using SeriesMatrix = std::vector<std::vector<TruncatedSeries>>;

/// Elementary divisor exponents of a square matrix over k[[t]]/(t^(N+1)).
/// Each entry is the t-order of a diagonal entry after Smith reduction;
/// nullopt marks a diagonal entry that is zero modulo t^(N+1).
inline std::vector<Order> smith_exponents(SeriesMatrix m) {
  const std::size_t n = m.size();
  for (const auto& row : m)
    detail::require(row.size() == n, "not-square", "Smith reduction expects a square matrix");
  std::vector<Order> exps;
  for (std::size_t k = 0; k < n; ++k) {
    // Pivot on an entry of minimal t-order in the trailing block.
    std::size_t pr = k, pc = k;
    Order best;
    for (std::size_t i = k; i < n; ++i)
      for (std::size_t j = k; j < n; ++j) {
        const Order o = m[i][j].order();
        if (o && (!best || *o < *best)) {
          best = o;
          pr = i;
          pc = j;
        }
      }
    if (!best) {
      for (std::size_t r = k; r < n; ++r) exps.push_back(std::nullopt);
      break;
    }
    std::swap(m[k], m[pr]);
    for (auto& row : m) std::swap(row[k], row[pc]);
    const auto v = static_cast<std::size_t>(*best);
    // pivot = t^v * unit; every other entry in the block is divisible by t^v.
    const TruncatedSeries unit_inv = m[k][k].shifted_down(v).inverse();
    for (std::size_t i = k + 1; i < n; ++i) {
      if (m[i][k].is_zero()) continue;
      const TruncatedSeries q = m[i][k].shifted_down(v) * unit_inv;
      for (std::size_t j = k; j < n; ++j) m[i][j] = m[i][j] - q * m[k][j];
    }
    // Column operations would clear row k without touching the block below.
    exps.push_back(best);
  }
  std::sort(exps.begin(), exps.end(), [](const Order& a, const Order& b) {
    if (!a) return false;
    if (!b) return true;
    return *a < *b;
  });
  return exps;
}

} // namespace ntheta
