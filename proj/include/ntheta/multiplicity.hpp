#pragma once

// Order of vanishing and multiplicity on the standard nodal model, plus the
// Hilbert-Samuel oracle for arbitrary quotients of a power series ring.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ntheta/errors.hpp"
#include "ntheta/local_model.hpp"
#include "ntheta/power_series.hpp"
#include "ntheta/sparse_echelon.hpp"

namespace ntheta {

/// ps order of the normal form; nullopt when f is zero in O_std to truncation.
inline Order ord_at_origin(const ModelElement& f) { return order(f.series()); }

struct BranchSum {
  int total = 0;
  std::vector<BranchOrder> per_branch;
};

/// Multiplicity of the divisor f = 0 as a sum over the 2^n normalization
/// branches; on each branch (a power series ring) multiplicity is the order.
inline BranchSum mult_divisor_branchsum(const ModelElement& f) {
  detail::require(!f.is_zero(), "zero-element", "divisor equation is zero to truncation");
  detail::require(f.series().constant_term() == 0, "unit-equation",
                  "divisor equation is a unit; the origin is not on the divisor");
  BranchOrders orders = branch_orders(f);
  if (orders.any_vanishing) {
    std::string which;
    for (const auto& b : orders.entries)
      if (b.vanishes()) which += (which.empty() ? "" : " ") + b.branch.to_string();
    throw PreconditionError("divisor-contains-branch",
                            "equation vanishes identically (to truncation) on branch " + which);
  }
  BranchSum sum;
  for (const auto& b : orders.entries) sum.total += *b.order;
  sum.per_branch = std::move(orders.entries);
  return sum;
}

/// Multiplicity of O_std itself.
inline std::int64_t mult_model(const LocalModel& model) { return std::int64_t{1} << model.nodes(); }

/// Quotient O = k[[vars]] / (relations), with an optional divisor equation.
struct RingSpec {
  std::vector<std::string> variables;
  std::vector<PowerSeries> relations;
  std::optional<PowerSeries> divisor;

  std::vector<PowerSeries> ideal() const {
    auto gens = relations;
    if (divisor) gens.push_back(*divisor);
    return gens;
  }
};

/// O_std as a RingSpec; n = m = 0 gives the point Spec k.
inline RingSpec standard_ring_spec(int nodes, int smooth, int truncation) {
  RingSpec spec;
  for (int i = 1; i <= nodes; ++i) spec.variables.push_back("u" + std::to_string(i));
  for (int i = 1; i <= nodes; ++i) spec.variables.push_back("v" + std::to_string(i));
  for (int j = 1; j <= smooth; ++j) spec.variables.push_back("w" + std::to_string(j));
  for (int i = 0; i < nodes; ++i) {
    const auto u = PowerSeries::variable(spec.variables, truncation, static_cast<std::size_t>(i));
    const auto v = PowerSeries::variable(spec.variables, truncation, static_cast<std::size_t>(nodes + i));
    spec.relations.push_back(u * v);
  }
  return spec;
}

/// The model relations together with f as divisor.
inline RingSpec ring_spec(const ModelElement& f) {
  const LocalModel& model = f.model();
  RingSpec spec = standard_ring_spec(model.nodes(), model.smooth(), f.series().truncation());
  spec.divisor = f.series();
  return spec;
}

struct HilbertSamuelTable {
  std::vector<std::int64_t> values;                   // H(0..t_max)
  std::vector<std::vector<std::int64_t>> differences; // differences[d][i] is the d-th difference at t = i + d
  int dimension = -1;
  std::int64_t multiplicity = 0;
  bool stabilized = false;
  int window_start = -1;  // first t from which the detected row is constant
};

namespace detail {

inline void for_each_monomial(std::size_t vars, int max_degree, const auto& visit) {
  Exponent e{};
  auto rec = [&](auto&& self, std::size_t i, int budget) -> void {
    if (i == vars) {
      visit(e);
      return;
    }
    for (int k = 0; k <= budget; ++k) {
      e[i] = static_cast<std::uint16_t>(k);
      self(self, i + 1, budget - k);
    }
    e[i] = 0;
  };
  rec(rec, 0, max_degree);
}

inline std::int64_t binomial(std::int64_t n, std::int64_t k) {
  if (k < 0 || k > n) return 0;
  std::int64_t r = 1;
  for (std::int64_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

/// Span of { g*h truncated at degree t : h in gens, g a monomial }.
inline linalg::SparseEchelon<Exponent> macaulay_span(const std::vector<PowerSeries>& gens,
                                                     std::size_t vars, int t) {
  linalg::SparseEchelon<Exponent> basis;
  for (const auto& h : gens) {
    const Order oh = order(h);
    if (!oh || *oh > t) continue;
    for_each_monomial(vars, t - *oh, [&](const Exponent& g) {
      const int dg = total_degree(g);
      std::vector<std::pair<Exponent, Rational>> row;
      for (const auto& [e, c] : h.terms()) {
        if (dg + total_degree(e) > t) continue;
        Exponent key;
        for (std::size_t i = 0; i < kMaxVariables; ++i) key[i] = static_cast<std::uint16_t>(e[i] + g[i]);
        row.emplace_back(key, c);
      }
      basis.insert(linalg::SparseEchelon<Exponent>::from_rational(std::move(row)));
    });
  }
  return basis;
}

inline void check_generators(const std::vector<std::string>& variables, const std::vector<PowerSeries>& gens) {
  for (const auto& h : gens) {
    detail::require(h.variables() == variables, "variable-mismatch", "generator over wrong variables");
    detail::require(!h.is_zero(), "zero-generator", "ideal generators must be nonzero");
    detail::require(h.constant_term() == 0, "unit-ideal",
                    "generator " + h.to_string() + " is a unit; the quotient ring is zero");
  }
}

} // namespace detail

/// Hilbert-Samuel function H(t) = dim_k O/(I + m^(t+1)) for t <= t_max, with
/// dimension and multiplicity read off the first row of iterated differences
/// that is a nonzero constant over its last three entries.
inline HilbertSamuelTable hilbert_samuel(const RingSpec& spec, int t_max) {
  detail::require(t_max >= 3, "t-max-too-small", "t_max must be >= 3");
  const auto gens = spec.ideal();
  detail::check_generators(spec.variables, gens);
  for (const auto& h : gens)
    detail::require(h.truncation() >= t_max, "truncation-too-small",
                    "generator known only to degree " + std::to_string(h.truncation()) +
                        " < t_max = " + std::to_string(t_max));
  const auto vars = spec.variables.size();
  HilbertSamuelTable table;
  for (int t = 0; t <= t_max; ++t) {
    const auto monomials = detail::binomial(t + static_cast<std::int64_t>(vars), static_cast<std::int64_t>(vars));
    const auto span = detail::macaulay_span(gens, vars, t);
    table.values.push_back(monomials - static_cast<std::int64_t>(span.rank()));
  }
  table.differences.push_back(table.values);
  for (int d = 1; d <= t_max; ++d) {
    const auto& prev = table.differences.back();
    std::vector<std::int64_t> row;
    for (std::size_t i = 0; i + 1 < prev.size(); ++i) row.push_back(prev[i + 1] - prev[i]);
    table.differences.push_back(std::move(row));
  }
  for (int d = 0; d < static_cast<int>(table.differences.size()); ++d) {
    const auto& row = table.differences[static_cast<std::size_t>(d)];
    if (row.size() < 3) break;
    const auto last = row.back();
    if (last == 0 || row[row.size() - 2] != last || row[row.size() - 3] != last) continue;
    std::size_t start = row.size() - 3;
    while (start > 0 && row[start - 1] == last) --start;
    table.dimension = d;
    table.multiplicity = last;
    table.stabilized = true;
    table.window_start = static_cast<int>(start) + d;
    break;
  }
  return table;
}

/// Largest nu with f in I + m^nu, checked up to f's truncation. nullopt when f
/// lies in I + m^(T+1), i.e. is zero in O to the working precision.
inline Order order_in_quotient(const std::vector<std::string>& variables,
                               const std::vector<PowerSeries>& relations, const PowerSeries& f) {
  detail::check_generators(variables, relations);
  detail::require(f.variables() == variables, "variable-mismatch", "element over wrong variables");
  int bound = f.truncation();
  for (const auto& h : relations) bound = std::min(bound, h.truncation());
  for (int nu = 0; nu <= bound; ++nu) {
    // Is f in I + m^(nu+1)?  Compare the parts of degree <= nu.
    const auto span = detail::macaulay_span(relations, variables.size(), nu);
    std::vector<std::pair<Exponent, Rational>> row;
    for (const auto& [e, c] : f.terms())
      if (total_degree(e) <= nu) row.emplace_back(e, c);
    if (!span.contains(linalg::SparseEchelon<Exponent>::from_rational(std::move(row)))) return nu;
  }
  return std::nullopt;
}

struct EqnmatCheck {
  int mult_d = 0;
  std::int64_t mult_v = 0;
  int ord_d = 0;
  bool holds = false;
  bool equality = false;
};

/// mult D >= mult V * ord D on the standard model.
inline EqnmatCheck check_eqnmat(const ModelElement& f) {
  const BranchSum sum = mult_divisor_branchsum(f);
  EqnmatCheck out;
  out.mult_d = sum.total;
  out.mult_v = mult_model(f.model());
  out.ord_d = *ord_at_origin(f);
  out.holds = out.mult_d >= out.mult_v * out.ord_d;
  out.equality = out.mult_d == out.mult_v * out.ord_d;
  if (!out.holds)
    throw AssertionFailure("mult D < mult V * ord D for " + f.series().to_string());
  return out;
}

} // namespace ntheta
