#pragma once

// One-parameter locally trivial families of sheaves over k[[t]]/(t^(N+1)) and
// the order of theta along them.
//
// For a family I over the arc we pick an auxiliary divisor E of e smooth
// points with H1(I_0(E)) = 0. Then
//
//   0 -> I -> I(E) -> I(E)|_E -> 0
//
// gives a two-term complex Phi : H0(I(E)) -> k[[t]]^e of free modules whose
// kernel and cokernel are H0 and H1 of the family. The order of theta along
// the arc is ord_t det Phi, the sum of the elementary divisor exponents.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ntheta/curve.hpp"
#include "ntheta/dense_linalg.hpp"
#include "ntheta/errors.hpp"
#include "ntheta/rational.hpp"
#include "ntheta/truncated_series.hpp"

namespace ntheta {

/// A smooth point moving along p(t), p(0) = base.
struct MovingPoint {
  Rational base;
  TruncatedSeries trajectory;
};

/// I = I'(D_t - D): the constant family of `base` with gluing constants
/// deformed to `glue_series`, twisted by moving points minus their rest
/// positions. Every such family is locally trivial.
struct SheafFamily {
  TFSheaf base;
  int precision = 16;
  std::map<int, TruncatedSeries> glue_series;
  std::vector<MovingPoint> moving;
};

inline void validate(const RationalNodalCurve& curve, const SheafFamily& family) {
  validate(curve, family.base);
  detail::require(family.precision >= 1, "family-truncation", "family truncation N must be >= 1");
  for (const auto& [j, lambda] : family.base.glue) {
    auto it = family.glue_series.find(j);
    detail::require(it != family.glue_series.end(), "missing-gluing",
                    "no gluing series for node " + std::to_string(j));
    detail::require(it->second[0] == lambda, "gluing-series-base",
                    "gluing series at node " + std::to_string(j) + " does not start at the base constant");
  }
  detail::require(family.glue_series.size() == family.base.glue.size(), "glue-at-nonfree-node",
                  "gluing series given for a nonfree node");
  std::vector<Rational> seen;
  for (const auto& mp : family.moving) {
    detail::require(mp.trajectory[0] == mp.base, "trajectory-base", "trajectory must start at its base point");
    detail::require(!curve.is_node_point(mp.base), "point-at-node",
                    "moving point " + to_string(mp.base) + " lies over a node");
    detail::require(std::find(seen.begin(), seen.end(), mp.base) == seen.end(), "coincident-moving-points",
                    "moving points must be distinct");
    seen.push_back(mp.base);
  }
}

inline SheafFamily constant_family(const RationalNodalCurve& curve, const TFSheaf& sheaf, int precision) {
  SheafFamily f{sheaf, precision, {}, {}};
  for (const auto& [j, lambda] : sheaf.glue) f.glue_series.emplace(j, TruncatedSeries::constant(lambda, precision));
  validate(curve, f);
  return f;
}

/// Gluing units of the family after absorbing the moving twist: sections of
/// I'(D_t - D) are R * s with R(z) = prod (z - p_k) / (z - p_k(t)), so the
/// gluing at node j picks up R(q_j) / R(p_j).
inline std::map<int, TruncatedSeries> effective_gluing(const RationalNodalCurve& curve, const SheafFamily& family) {
  const int n = family.precision;
  std::map<int, TruncatedSeries> out;
  for (const auto& [j, lambda] : family.glue_series) {
    TruncatedSeries acc = lambda.with_precision(n);
    for (const auto& mp : family.moving) {
      const auto traj = mp.trajectory.with_precision(n);
      const TruncatedSeries p_minus = TruncatedSeries::constant(curve.p(j), n) - traj;
      const TruncatedSeries q_minus = TruncatedSeries::constant(curve.q(j), n) - traj;
      const Rational ratio = (curve.q(j) - mp.base) / (curve.p(j) - mp.base);
      acc = ratio * (acc * p_minus * q_minus.inverse());
    }
    out.emplace(j, std::move(acc));
  }
  return out;
}

struct FamilyCohomology {
  int h0_rank = 0;                      // corank of Phi(0) = h0 of the central fiber
  std::vector<Order> exponents;         // elementary divisors of Phi, sorted
  Order theta_order;                    // ord_t det Phi; nullopt: indeterminate at truncation
  std::vector<Rational> auxiliary;      // the points of E
  SeriesMatrix phi;

  bool indeterminate() const noexcept { return !theta_order.has_value(); }
};

namespace detail {

/// Sections of the family twisted by E: a basis of the free k[[t]]-module
/// ker B(t), lifted degree by degree from a basis of ker B(0). Returns
/// nullopt if B(0) is not surjective (H1 of the central fiber of I(E) != 0).
inline std::optional<std::vector<std::vector<TruncatedSeries>>> lift_sections(
    const RationalNodalCurve& curve, int line_degree, const std::map<int, TruncatedSeries>& gluing, int n) {
  const int d = line_degree;
  if (d < -1) return std::nullopt;
  if (d < 0) return std::vector<std::vector<TruncatedSeries>>{};
  const auto cols = static_cast<std::size_t>(d) + 1;
  linalg::Matrix b0;
  std::vector<int> nodes;
  for (const auto& [j, lambda] : gluing) {
    linalg::Vector row;
    for (int k = 0; k <= d; ++k) row.push_back(power(curve.p(j), k) - lambda[0] * power(curve.q(j), k));
    b0.push_back(std::move(row));
    nodes.push_back(j);
  }
  if (linalg::rank(b0) != b0.size()) return std::nullopt;
  const auto kernel = linalg::nullspace(b0, cols);
  std::optional<linalg::RightInverse> right;
  if (!b0.empty()) right.emplace(b0);

  std::vector<std::vector<TruncatedSeries>> basis;
  for (const auto& v0 : kernel) {
    std::vector<linalg::Vector> layers{v0};  // layers[k][l] = coeff of t^k z^l
    for (int k = 1; k <= n; ++k) {
      // B0 x_k = -sum_{i>=1} B_i x_{k-i}, where (B_i x)_j = -Lambda_j[i] * x(q_j).
      linalg::Vector rhs(nodes.size(), Rational(0));
      for (std::size_t r = 0; r < nodes.size(); ++r) {
        const auto& lambda = gluing.at(nodes[r]);
        for (int i = 1; i <= k; ++i) {
          if (lambda[static_cast<std::size_t>(i)] == 0) continue;
          Rational value_at_q = 0;
          const auto& x = layers[static_cast<std::size_t>(k - i)];
          for (std::size_t l = 0; l < cols; ++l) value_at_q += x[l] * power(curve.q(nodes[r]), static_cast<int>(l));
          rhs[r] += lambda[static_cast<std::size_t>(i)] * value_at_q;
        }
      }
      layers.push_back(right ? right->apply(rhs) : linalg::Vector(cols, Rational(0)));
    }
    std::vector<TruncatedSeries> section(cols, TruncatedSeries(n));
    for (std::size_t l = 0; l < cols; ++l)
      for (int k = 0; k <= n; ++k) section[l][static_cast<std::size_t>(k)] = layers[static_cast<std::size_t>(k)][l];
    basis.push_back(std::move(section));
  }
  return basis;
}

inline std::map<int, TruncatedSeries> twist_gluing(const RationalNodalCurve& curve,
                                                   std::map<int, TruncatedSeries> gluing,
                                                   const std::vector<Rational>& points) {
  for (auto& [j, lambda] : gluing) {
    Rational factor = 1;
    for (const auto& e : points) factor *= (curve.p(j) - e) / (curve.q(j) - e);
    lambda = factor * lambda;
  }
  return gluing;
}

/// Phi for a given E, or nullopt if E is degenerate for this family.
inline std::optional<FamilyCohomology> phi_for(const RationalNodalCurve& curve, const SheafFamily& family,
                                               const std::map<int, TruncatedSeries>& gluing,
                                               const std::vector<Rational>& points) {
  const int n = family.precision;
  const int e = static_cast<int>(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (curve.is_node_point(points[i])) return std::nullopt;
    for (const auto& mp : family.moving)
      if (mp.base == points[i]) return std::nullopt;
    for (std::size_t k = i + 1; k < points.size(); ++k)
      if (points[i] == points[k]) return std::nullopt;
  }
  const int d = family.base.line_degree + e;
  auto basis = lift_sections(curve, d, twist_gluing(curve, gluing, points), n);
  if (!basis) return std::nullopt;
  // Square exactly when deg I = g - 1: rank H0(I(E)) = chi(I) + e.
  detail::require(static_cast<int>(basis->size()) == e, "degree-mismatch",
                  "family fibers must have degree g - 1 for a square presentation");
  FamilyCohomology out;
  out.auxiliary = points;
  out.phi.assign(static_cast<std::size_t>(e), std::vector<TruncatedSeries>(static_cast<std::size_t>(e), TruncatedSeries(n)));
  for (int i = 0; i < e; ++i)
    for (int k = 0; k < e; ++k) {
      TruncatedSeries value(n);
      const auto& s = (*basis)[static_cast<std::size_t>(k)];
      for (std::size_t l = 0; l < s.size(); ++l)
        value = value + power(points[static_cast<std::size_t>(i)], static_cast<int>(l)) * s[l];
      out.phi[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] = std::move(value);
    }
  linalg::Matrix phi0(static_cast<std::size_t>(e), linalg::Vector(static_cast<std::size_t>(e)));
  for (int i = 0; i < e; ++i)
    for (int k = 0; k < e; ++k) phi0[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] = out.phi[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)][0];
  out.h0_rank = e - static_cast<int>(linalg::rank(phi0));
  out.exponents = smith_exponents(out.phi);
  int sum = 0;
  bool finite = true;
  for (const auto& x : out.exponents) {
    if (!x) finite = false;
    else sum += *x;
  }
  if (finite && sum <= n) out.theta_order = sum;
  return out;
}

} // namespace detail

/// H1 length of the family along the arc via the E-presentation. E is drawn
/// from the seed (g points) unless given explicitly.
inline FamilyCohomology family_cohomology(const RationalNodalCurve& curve, const SheafFamily& family,
                                          std::uint64_t seed = 0,
                                          const std::optional<std::vector<Rational>>& auxiliary = std::nullopt) {
  validate(curve, family);
  require_theta_degree(curve, family.base);
  const auto gluing = effective_gluing(curve, family);
  if (auxiliary) {
    auto out = detail::phi_for(curve, family, gluing, *auxiliary);
    detail::require(out.has_value(), "degenerate-auxiliary-divisor",
                    "E meets a node or moving point, or H1(I(E)) does not vanish");
    return std::move(*out);
  }
  Rng rng(seed);
  for (int attempt = 0; attempt < 100; ++attempt) {
    std::vector<Rational> points;
    for (int i = 0; i < curve.genus(); ++i) points.push_back(random_smooth_point(curve, rng, points));
    if (auto out = detail::phi_for(curve, family, gluing, points)) return std::move(*out);
  }
  throw PreconditionError("degenerate-auxiliary-divisor", "no auxiliary divisor with H1(I(E)) = 0 found");
}

/// h0 and h1 of a single sheaf of any degree from the E-presentation: the
/// kernel and cokernel of evaluation H0(I(E)) -> k^e at t = 0.
inline Cohomology cohomology_via_resolution(const RationalNodalCurve& curve, const TFSheaf& sheaf,
                                            std::uint64_t seed = 0) {
  validate(curve, sheaf);
  Rng rng(seed);
  const int glued = static_cast<int>(sheaf.glue.size());
  int e = std::max(curve.genus(), glued - sheaf.line_degree);
  for (int attempt = 0; attempt < 100; ++attempt, ++e) {
    std::vector<Rational> points;
    for (int i = 0; i < e; ++i) points.push_back(random_smooth_point(curve, rng, points));
    const TFSheaf twisted = twist_by_points(curve, sheaf, points, 1);
    if (twisted.line_degree < -1 || (twisted.line_degree == -1 && glued > 0)) continue;
    if (twisted.line_degree >= 0 && linalg::rank(detail::gluing_matrix(curve, twisted)) != twisted.glue.size())
      continue;
    const auto basis = sections(curve, twisted);
    linalg::Matrix eval(points.size(), linalg::Vector(basis.size()));
    for (std::size_t i = 0; i < points.size(); ++i)
      for (std::size_t k = 0; k < basis.size(); ++k) {
        Rational v = 0;
        for (std::size_t l = 0; l < basis[k].size(); ++l) v += basis[k][l] * detail::power(points[i], static_cast<int>(l));
        eval[i][k] = v;
      }
    const int r = eval.empty() || basis.empty() ? 0 : static_cast<int>(linalg::rank(eval));
    return {static_cast<int>(basis.size()) - r, e - r};
  }
  throw PreconditionError("degenerate-auxiliary-divisor", "no auxiliary divisor with H1(I(E)) = 0 found");
}

/// A family attaining the lower bound: D = h0 general points with
/// h0(I(-D)) = 0 and h0(I(D)) = h0(I), each moving with nonzero velocity.
inline SheafFamily make_minimal_family(const RationalNodalCurve& curve, const TFSheaf& sheaf, int precision,
                                       std::uint64_t seed) {
  require_theta_degree(curve, sheaf);
  const int sections_count = h0(curve, sheaf);
  SheafFamily family = constant_family(curve, sheaf, precision);
  if (sections_count == 0) return family;
  Rng rng(seed);
  for (int attempt = 0; attempt < 200; ++attempt) {
    std::vector<Rational> points;
    for (int k = 0; k < sections_count; ++k) points.push_back(random_smooth_point(curve, rng, points));
    if (h0(curve, twist_by_points(curve, sheaf, points, -1)) != 0) continue;
    if (h0(curve, twist_by_points(curve, sheaf, points, 1)) != sections_count) continue;
    for (const auto& p : points)
      family.moving.push_back({p, TruncatedSeries::linear(p, Rational(rng.nonzero(-9, 9)), precision)});
    validate(curve, family);
    return family;
  }
  throw PreconditionError("genericity-budget-exhausted",
                          "no divisor D with h0(I(-D)) = 0 and h0(I(D)) = h0(I) among 200 draws");
}

/// Random locally trivial deformation: every gluing constant gets random
/// higher-order terms.
inline SheafFamily random_gluing_family(const RationalNodalCurve& curve, const TFSheaf& sheaf, int precision,
                                        Rng& rng) {
  SheafFamily family = constant_family(curve, sheaf, precision);
  for (auto& [j, lambda] : family.glue_series)
    for (int k = 1; k <= precision; ++k) lambda[static_cast<std::size_t>(k)] = rng.uniform(-9, 9);
  return family;
}

/// Computes ord_x Theta two ways (h0 by linear algebra, and the order of theta
/// along a minimal family) and checks that random families never beat h0.
/// Any mismatch throws AssertionFailure.
inline ThetaReport verify_theorem_A(const RationalNodalCurve& curve, const TFSheaf& sheaf, int precision,
                                    std::uint64_t seed, int random_families = 3) {
  require_theta_degree(curve, sheaf);
  ThetaReport report = theta_invariants(curve, sheaf);
  detail::require(report.h0 >= 1, "not-on-theta", "sheaf has no sections; the point is not on theta");
  detail::require(precision >= report.h0, "truncation-too-small", "family truncation N must be >= h0");
  Rng rng(seed);
  const auto family_seed = static_cast<std::uint64_t>(rng.uniform(0, 1LL << 62));
  const SheafFamily minimal = make_minimal_family(curve, sheaf, precision, family_seed);
  const FamilyCohomology fc = family_cohomology(curve, minimal, static_cast<std::uint64_t>(rng.uniform(0, 1LL << 62)));
  if (fc.indeterminate())
    throw AssertionFailure("minimal family is indeterminate at truncation " + std::to_string(precision));
  if (*fc.theta_order != report.h0)
    throw AssertionFailure("theta order along the minimal family is " + std::to_string(*fc.theta_order) +
                           ", expected h0 = " + std::to_string(report.h0));
  if (fc.h0_rank != report.h0)
    throw AssertionFailure("corank of Phi(0) disagrees with h0");
  std::vector<int> exps;
  for (const auto& x : fc.exponents) exps.push_back(*x);
  report.exponents = exps;
  for (int k = 0; k < random_families; ++k) {
    Rng shard = rng.split(static_cast<std::uint64_t>(k) + 1);
    const SheafFamily fam = random_gluing_family(curve, sheaf, precision, shard);
    const FamilyCohomology rc = family_cohomology(curve, fam, static_cast<std::uint64_t>(shard.uniform(0, 1LL << 62)));
    if (!rc.indeterminate() && *rc.theta_order < report.h1)
      throw AssertionFailure("random family has theta order " + std::to_string(*rc.theta_order) + " < h1 = " +
                             std::to_string(report.h1));
    report.random_family_orders.push_back(rc.theta_order);
  }
  if (report.singular != (report.mult_theta >= 2))
    throw AssertionFailure("singular flag disagrees with mult_x Theta >= 2");
  return report;
}

} // namespace ntheta
