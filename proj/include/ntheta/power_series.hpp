#pragma once

// Truncated multivariate formal power series over Q.
//
// A PowerSeries carries its own truncation T: every term of total degree > T
// is unknown. Binary operations take the minimum truncation of their inputs,
// so a result never claims more precision than its operands had.

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ntheta/errors.hpp"
#include "ntheta/rational.hpp"

namespace ntheta {

inline constexpr std::size_t kMaxVariables = 12;

/// Dense exponent vector; slots past the series' arity are always zero.
using Exponent = std::array<std::uint16_t, kMaxVariables>;

inline int total_degree(const Exponent& e) {
  return std::accumulate(e.begin(), e.end(), 0);
}

/// Order of a truncated series. nullopt means "zero to truncation", i.e. the
/// true order is at least T + 1; it is not a certified infinity.
using Order = std::optional<int>;

inline std::string to_string(const Order& o) { return o ? std::to_string(*o) : "infinite"; }

enum class ArithOp { add, sub, mul };

class PowerSeries {
public:
  using Terms = std::map<Exponent, Rational>;

  PowerSeries() = default;

  PowerSeries(std::vector<std::string> variables, int truncation)
      : variables_(std::move(variables)), truncation_(truncation) {
    detail::require(variables_.size() <= kMaxVariables, "too-many-variables",
                    "at most " + std::to_string(kMaxVariables) + " variables are supported");
    detail::require(truncation_ >= 0, "negative-truncation", "truncation must be >= 0");
    for (std::size_t i = 0; i < variables_.size(); ++i)
      for (std::size_t j = i + 1; j < variables_.size(); ++j)
        detail::require(variables_[i] != variables_[j], "duplicate-variable",
                        "variable '" + variables_[i] + "' listed twice");
  }

  static PowerSeries constant(std::vector<std::string> variables, int truncation,
                              const Rational& c) {
    PowerSeries s(std::move(variables), truncation);
    s.add_term(Exponent{}, c);
    return s;
  }

  static PowerSeries variable(std::vector<std::string> variables, int truncation,
                              std::size_t index) {
    detail::require(index < variables.size(), "unknown-variable", "variable index out of range");
    PowerSeries s(std::move(variables), truncation);
    Exponent e{};
    e[index] = 1;
    s.add_term(e, Rational(1));
    return s;
  }

  /// Univariate series in `name` from a dense coefficient list c[0] + c[1] t + ...
  static PowerSeries univariate(const std::vector<Rational>& coefficients, int truncation,
                                std::string name = "t") {
    PowerSeries s({std::move(name)}, truncation);
    for (std::size_t k = 0; k < coefficients.size(); ++k) {
      Exponent e{};
      e[0] = static_cast<std::uint16_t>(k);
      s.add_term(e, coefficients[k]);
    }
    return s;
  }

  const std::vector<std::string>& variables() const noexcept { return variables_; }
  std::size_t arity() const noexcept { return variables_.size(); }
  int truncation() const noexcept { return truncation_; }
  const Terms& terms() const noexcept { return terms_; }
  bool is_zero() const noexcept { return terms_.empty(); }

  std::optional<std::size_t> index_of(const std::string& name) const {
    auto it = std::find(variables_.begin(), variables_.end(), name);
    if (it == variables_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - variables_.begin());
  }

  Rational coefficient(const Exponent& e) const {
    auto it = terms_.find(e);
    return it == terms_.end() ? Rational(0) : it->second;
  }

  Rational constant_term() const { return coefficient(Exponent{}); }

  /// Adds c * monomial(e); silently drops terms beyond the truncation.
  void add_term(const Exponent& e, const Rational& c) {
    if (c == 0 || total_degree(e) > truncation_) return;
    auto [it, inserted] = terms_.try_emplace(e, c);
    if (!inserted) {
      it->second += c;
      if (it->second == 0) terms_.erase(it);
    }
  }

  PowerSeries truncated(int truncation) const {
    PowerSeries out(variables_, std::min(truncation, truncation_));
    for (const auto& [e, c] : terms_) out.add_term(e, c);
    return out;
  }

  PowerSeries homogeneous_part(int degree) const {
    PowerSeries out(variables_, truncation_);
    for (const auto& [e, c] : terms_)
      if (total_degree(e) == degree) out.terms_.emplace(e, c);
    return out;
  }

  /// Substitutes 0 for every variable whose mask entry is true.
  PowerSeries with_zeroed(const std::vector<bool>& mask) const {
    PowerSeries out(variables_, truncation_);
    for (const auto& [e, c] : terms_) {
      bool killed = false;
      for (std::size_t i = 0; i < arity() && !killed; ++i) killed = mask[i] && e[i] > 0;
      if (!killed) out.terms_.emplace(e, c);
    }
    return out;
  }

  /// Value of the stored (polynomial) part at a point.
  Rational evaluate(std::span<const Rational> point) const {
    detail::require(point.size() == arity(), "arity-mismatch", "point has wrong dimension");
    Rational sum = 0;
    for (const auto& [e, c] : terms_) {
      Rational term = c;
      for (std::size_t i = 0; i < arity(); ++i)
        for (int k = 0; k < e[i]; ++k) term *= point[i];
      sum += term;
    }
    return sum;
  }

  PowerSeries operator-() const {
    PowerSeries out = *this;
    for (auto& [e, c] : out.terms_) c = -c;
    return out;
  }

  PowerSeries scaled(const Rational& k) const {
    PowerSeries out(variables_, truncation_);
    if (k == 0) return out;
    for (const auto& [e, c] : terms_) out.terms_.emplace(e, c * k);
    return out;
  }

  PowerSeries pow(unsigned exponent) const {
    PowerSeries result = constant(variables_, truncation_, Rational(1));
    PowerSeries base = *this;
    while (exponent > 0) {
      if (exponent & 1U) result = result * base;
      exponent >>= 1U;
      if (exponent > 0) base = base * base;
    }
    return result;
  }

  friend PowerSeries operator+(const PowerSeries& a, const PowerSeries& b) {
    check_compatible(a, b);
    PowerSeries out(a.variables_, std::min(a.truncation_, b.truncation_));
    for (const auto& [e, c] : a.terms_) out.add_term(e, c);
    for (const auto& [e, c] : b.terms_) out.add_term(e, c);
    return out;
  }

  friend PowerSeries operator-(const PowerSeries& a, const PowerSeries& b) { return a + (-b); }

  friend PowerSeries operator*(const PowerSeries& a, const PowerSeries& b) {
    check_compatible(a, b);
    PowerSeries out(a.variables_, std::min(a.truncation_, b.truncation_));
    for (const auto& [ea, ca] : a.terms_) {
      const int da = total_degree(ea);
      if (da > out.truncation_) continue;
      for (const auto& [eb, cb] : b.terms_) {
        if (da + total_degree(eb) > out.truncation_) continue;
        Exponent e;
        for (std::size_t i = 0; i < kMaxVariables; ++i)
          e[i] = static_cast<std::uint16_t>(ea[i] + eb[i]);
        out.add_term(e, ca * cb);
      }
    }
    return out;
  }

  friend bool operator==(const PowerSeries& a, const PowerSeries& b) {
    return a.variables_ == b.variables_ && a.truncation_ == b.truncation_ && a.terms_ == b.terms_;
  }

  /// Human-readable form, lowest degree first: "v1 - u1^2", "3/2*x*y^2".
  std::string to_string() const {
    if (terms_.empty()) return "0";
    std::vector<std::pair<Exponent, Rational>> ordered(terms_.begin(), terms_.end());
    std::stable_sort(ordered.begin(), ordered.end(), [](const auto& l, const auto& r) {
      const int dl = total_degree(l.first), dr = total_degree(r.first);
      if (dl != dr) return dl < dr;
      return l.first > r.first;
    });
    std::string out;
    bool first = true;
    for (const auto& [e, c] : ordered) {
      Rational magnitude = abs(c);
      if (first) {
        if (c < 0) out += "-";
      } else {
        out += c < 0 ? " - " : " + ";
      }
      first = false;
      std::string monomial;
      for (std::size_t i = 0; i < arity(); ++i) {
        if (e[i] == 0) continue;
        if (!monomial.empty()) monomial += "*";
        monomial += variables_[i];
        if (e[i] > 1) monomial += "^" + std::to_string(e[i]);
      }
      if (monomial.empty()) {
        out += ntheta::to_string(magnitude);
      } else if (magnitude == 1) {
        out += monomial;
      } else {
        out += ntheta::to_string(magnitude) + "*" + monomial;
      }
    }
    return out;
  }

private:
  static void check_compatible(const PowerSeries& a, const PowerSeries& b) {
    detail::require(a.variables_ == b.variables_, "variable-mismatch",
                    "series are over different variable lists");
  }

  std::vector<std::string> variables_;
  int truncation_ = 0;
  Terms terms_;
};

inline PowerSeries arith(const PowerSeries& a, const PowerSeries& b, ArithOp op) {
  switch (op) {
    case ArithOp::add: return a + b;
    case ArithOp::sub: return a - b;
    case ArithOp::mul: return a * b;
  }
  return a;
}

/// Minimal total degree of a stored term.
inline Order order(const PowerSeries& f) {
  Order best;
  for (const auto& [e, c] : f.terms()) {
    const int d = total_degree(e);
    if (!best || d < *best) best = d;
  }
  return best;
}

struct LeadingForm {
  int degree = 0;
  PowerSeries form;
};

/// The lowest-degree homogeneous part f* of a nonzero series.
inline LeadingForm leading_form(const PowerSeries& f) {
  const Order nu = order(f);
  detail::require(nu.has_value(), "zero-series", "leading form of a series that is zero to truncation");
  return {*nu, f.homogeneous_part(*nu)};
}

namespace detail {

/// Dense truncated product of univariate coefficient vectors, length n + 1.
inline std::vector<Rational> dense_mul(const std::vector<Rational>& a,
                                       const std::vector<Rational>& b, int n) {
  std::vector<Rational> out(static_cast<std::size_t>(n) + 1);
  for (std::size_t i = 0; i < a.size() && i <= static_cast<std::size_t>(n); ++i) {
    if (a[i] == 0) continue;
    for (std::size_t j = 0; j < b.size() && i + j <= static_cast<std::size_t>(n); ++j)
      if (b[j] != 0) out[i + j] += a[i] * b[j];
  }
  return out;
}

inline std::vector<Rational> dense_coefficients(const PowerSeries& u, int n) {
  std::vector<Rational> out(static_cast<std::size_t>(n) + 1);
  for (const auto& [e, c] : u.terms())
    if (e[0] <= n) out[e[0]] = c;
  return out;
}

} // namespace detail

/// Replaces each variable of f by a univariate series in t with zero constant
/// term. The result is exact modulo t^(N'+1), N' = min(N, T_f, T_images).
inline PowerSeries substitute(const PowerSeries& f, const std::vector<PowerSeries>& images, int n) {
  detail::require(images.size() == f.arity(), "arity-mismatch",
                  "need one image per variable (" + std::to_string(f.arity()) + ")");
  detail::require(n >= 0, "negative-truncation", "arc truncation must be >= 0");
  std::string tname = "t";
  int precision = std::min(n, f.truncation());
  for (const auto& img : images) {
    detail::require(img.arity() == 1, "image-not-univariate", "arc images must be univariate");
    detail::require(img.constant_term() == 0, "nonzero-constant-term",
                    "arc image " + img.to_string() + " does not send the closed point to the origin");
    precision = std::min(precision, img.truncation());
    tname = img.variables()[0];
  }
  // powers[i][k] = images[i]^k, dense.
  std::vector<std::vector<std::vector<Rational>>> powers(f.arity());
  for (std::size_t i = 0; i < f.arity(); ++i) {
    int max_exp = 0;
    for (const auto& [e, c] : f.terms()) max_exp = std::max<int>(max_exp, e[i]);
    max_exp = std::min(max_exp, precision);
    auto base = detail::dense_coefficients(images[i], precision);
    powers[i].push_back(detail::dense_coefficients(PowerSeries::constant({tname}, precision, 1), precision));
    for (int k = 1; k <= max_exp; ++k) powers[i].push_back(detail::dense_mul(powers[i].back(), base, precision));
  }
  std::vector<Rational> acc(static_cast<std::size_t>(precision) + 1);
  for (const auto& [e, c] : f.terms()) {
    if (total_degree(e) > precision) continue;  // maps into t^(deg) and beyond
    std::vector<Rational> term(static_cast<std::size_t>(precision) + 1);
    term[0] = c;
    for (std::size_t i = 0; i < f.arity(); ++i)
      if (e[i] > 0) term = detail::dense_mul(term, powers[i][e[i]], precision);
    for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += term[k];
  }
  return PowerSeries::univariate(acc, precision, tname);
}

} // namespace ntheta
