#pragma once

// Integral rational nodal curves given by gluing pairs of points of P^1, and
// rank-1 torsion-free sheaves on them.
//
// A sheaf is the pushforward of a line bundle L from the partial normalization
// at the nonfree nodes S. We fix the trivialization in which sections of L are
// polynomials s(z) of degree <= d_L, glued by s(p_j) = lambda_j * s(q_j) at
// every node j outside S. Degrees follow deg I = d_L + |S|, which makes
// Riemann-Roch read h0 - h1 = deg I - g + 1 for every sheaf.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "ntheta/dense_linalg.hpp"
#include "ntheta/errors.hpp"
#include "ntheta/rational.hpp"

namespace ntheta {

struct ProjectivePoint {
  bool infinite = false;
  Rational value = 0;

  static ProjectivePoint at(const Rational& q) { return {false, q}; }
  static ProjectivePoint infinity() { return {true, 0}; }

  std::string to_string() const { return infinite ? "inf" : ntheta::to_string(value); }

  friend bool operator==(const ProjectivePoint& a, const ProjectivePoint& b) {
    return a.infinite == b.infinite && (a.infinite || a.value == b.value);
  }
};

class RationalNodalCurve {
public:
  using Node = std::pair<ProjectivePoint, ProjectivePoint>;

  explicit RationalNodalCurve(std::vector<Node> nodes) : nodes_(std::move(nodes)) {
    detail::require(!nodes_.empty(), "genus-zero", "a curve needs at least one node (g >= 1)");
    std::vector<ProjectivePoint> all;
    for (const auto& [p, q] : nodes_) {
      all.push_back(p);
      all.push_back(q);
    }
    for (std::size_t i = 0; i < all.size(); ++i)
      for (std::size_t j = i + 1; j < all.size(); ++j)
        detail::require(!(all[i] == all[j]), "coincident-node-points",
                        "point " + all[i].to_string() + " is used twice in the gluing data");
  }

  /// Convenience constructor for finite node points.
  static RationalNodalCurve from_pairs(const std::vector<std::pair<Rational, Rational>>& pairs) {
    std::vector<Node> nodes;
    for (const auto& [p, q] : pairs) nodes.emplace_back(ProjectivePoint::at(p), ProjectivePoint::at(q));
    return RationalNodalCurve(std::move(nodes));
  }

  int genus() const noexcept { return static_cast<int>(nodes_.size()); }
  const std::vector<Node>& nodes() const noexcept { return nodes_; }

  bool has_infinite_point() const {
    return std::any_of(nodes_.begin(), nodes_.end(),
                       [](const Node& n) { return n.first.infinite || n.second.infinite; });
  }

  const Rational& p(int j) const { return nodes_[static_cast<std::size_t>(j)].first.value; }
  const Rational& q(int j) const { return nodes_[static_cast<std::size_t>(j)].second.value; }

  bool is_node_point(const Rational& z) const {
    for (const auto& [a, b] : nodes_)
      if ((!a.infinite && a.value == z) || (!b.infinite && b.value == z)) return true;
    return false;
  }

private:
  std::vector<Node> nodes_;
};

struct TFSheaf {
  std::vector<int> nonfree;          // S, sorted
  int line_degree = 0;               // d_L
  std::map<int, Rational> glue;      // lambda_j for j not in S

  int total_degree() const noexcept { return line_degree + static_cast<int>(nonfree.size()); }
  int n() const noexcept { return static_cast<int>(nonfree.size()); }
  bool is_nonfree(int j) const { return std::binary_search(nonfree.begin(), nonfree.end(), j); }
};

/// Checks the sheaf against the curve: valid node indices, a nonzero gluing
/// constant exactly at the locally free nodes, finite node coordinates.
inline void validate(const RationalNodalCurve& curve, const TFSheaf& sheaf) {
  detail::require(!curve.has_infinite_point(), "infinite-node-point",
                  "normalize coordinates so no node uses the point at infinity");
  detail::require(std::is_sorted(sheaf.nonfree.begin(), sheaf.nonfree.end()) &&
                      std::adjacent_find(sheaf.nonfree.begin(), sheaf.nonfree.end()) == sheaf.nonfree.end(),
                  "nonfree-not-a-set", "nonfree node list must be sorted and duplicate-free");
  for (int j : sheaf.nonfree)
    detail::require(j >= 0 && j < curve.genus(), "node-index", "nonfree node " + std::to_string(j) + " out of range");
  for (const auto& [j, lambda] : sheaf.glue) {
    detail::require(j >= 0 && j < curve.genus(), "node-index", "glued node " + std::to_string(j) + " out of range");
    detail::require(!sheaf.is_nonfree(j), "glue-at-nonfree-node",
                    "node " + std::to_string(j) + " is nonfree and takes no gluing constant");
    detail::require(lambda != 0, "zero-gluing", "gluing constant at node " + std::to_string(j) + " is zero");
  }
  for (int j = 0; j < curve.genus(); ++j)
    if (!sheaf.is_nonfree(j))
      detail::require(sheaf.glue.count(j) == 1, "missing-gluing",
                      "locally free node " + std::to_string(j) + " needs a gluing constant");
}

inline TFSheaf make_sheaf(const RationalNodalCurve& curve, std::vector<int> nonfree, int line_degree,
                          std::map<int, Rational> glue) {
  std::sort(nonfree.begin(), nonfree.end());
  TFSheaf s{std::move(nonfree), line_degree, std::move(glue)};
  validate(curve, s);
  return s;
}

namespace detail {

inline Rational power(const Rational& x, int k) {
  Rational r = 1;
  for (int i = 0; i < k; ++i) r *= x;
  return r;
}

/// Rows s(p_j) - lambda_j s(q_j) over the monomial basis 1, z, ..., z^d.
inline linalg::Matrix gluing_matrix(const RationalNodalCurve& curve, const TFSheaf& sheaf) {
  linalg::Matrix m;
  const int d = sheaf.line_degree;
  for (const auto& [j, lambda] : sheaf.glue) {
    linalg::Vector row;
    for (int k = 0; k <= d; ++k) row.push_back(power(curve.p(j), k) - lambda * power(curve.q(j), k));
    m.push_back(std::move(row));
  }
  return m;
}

inline linalg::Vector evaluation_row(const Rational& z, int d) {
  linalg::Vector row;
  for (int k = 0; k <= d; ++k) row.push_back(power(z, k));
  return row;
}

} // namespace detail

struct Cohomology {
  int h0 = 0;
  int h1 = 0;
};

/// h0 as the kernel of the gluing conditions on polynomials of degree <= d_L;
/// h1 as their cokernel plus h1(P^1, O(d_L)).
inline Cohomology cohomology(const RationalNodalCurve& curve, const TFSheaf& sheaf) {
  validate(curve, sheaf);
  const int d = sheaf.line_degree;
  const int glued = static_cast<int>(sheaf.glue.size());
  if (d < 0) return {0, glued + std::max(0, -d - 1)};
  const auto r = static_cast<int>(linalg::rank(detail::gluing_matrix(curve, sheaf)));
  return {d + 1 - r, glued - r};
}

inline int h0(const RationalNodalCurve& curve, const TFSheaf& sheaf) { return cohomology(curve, sheaf).h0; }

/// Basis of global sections as coefficient vectors of s(z).
inline std::vector<linalg::Vector> sections(const RationalNodalCurve& curve, const TFSheaf& sheaf) {
  validate(curve, sheaf);
  if (sheaf.line_degree < 0) return {};
  return linalg::nullspace(detail::gluing_matrix(curve, sheaf), static_cast<std::size_t>(sheaf.line_degree) + 1);
}

/// dim { s in H0(I) : s(z) = 0 for every z in points }, computed directly
/// from the gluing conditions plus vanishing conditions.
inline int h0_vanishing_at(const RationalNodalCurve& curve, const TFSheaf& sheaf, const std::vector<Rational>& points) {
  validate(curve, sheaf);
  const int d = sheaf.line_degree;
  if (d < 0) return 0;
  auto m = detail::gluing_matrix(curve, sheaf);
  for (const auto& z : points) m.push_back(detail::evaluation_row(z, d));
  return d + 1 - static_cast<int>(linalg::rank(m));
}

/// I(sign * p) for a smooth point p. Multiplying sections by (z - p)^(-sign)
/// rescales each gluing constant by a ratio of distances to p.
inline TFSheaf twist_by_point(const RationalNodalCurve& curve, const TFSheaf& sheaf, const Rational& p, int sign) {
  validate(curve, sheaf);
  detail::require(sign == 1 || sign == -1, "twist-sign", "sign must be +1 or -1");
  detail::require(!curve.is_node_point(p), "point-at-node", "twist point " + to_string(p) + " lies over a node");
  TFSheaf out = sheaf;
  out.line_degree += sign;
  for (auto& [j, lambda] : out.glue) {
    const Rational dp = curve.p(j) - p;
    const Rational dq = curve.q(j) - p;
    lambda *= sign < 0 ? dq / dp : dp / dq;
  }
  return out;
}

inline TFSheaf twist_by_points(const RationalNodalCurve& curve, TFSheaf sheaf, const std::vector<Rational>& points,
                               int sign) {
  for (const auto& p : points) sheaf = twist_by_point(curve, sheaf, p, sign);
  return sheaf;
}

/// Random rational a/b off the node points and off `avoid`.
inline Rational random_smooth_point(const RationalNodalCurve& curve, Rng& rng, const std::vector<Rational>& avoid = {}) {
  for (;;) {
    Rational z(rng.uniform(-40, 40), rng.uniform(1, 6));
    z.canonicalize();
    if (curve.is_node_point(z)) continue;
    if (std::find(avoid.begin(), avoid.end(), z) != avoid.end()) continue;
    return z;
  }
}

struct DropReport {
  int h0 = 0;
  int h1 = 0;
  int trials = 0;
  int h0_drops = 0;          // trials where a point among <= 5 dropped h0 by one
  int h1_drops = 0;          // same for h1 under I(+p); counted only if h1 >= 1
  int resamples = 0;         // extra points drawn beyond the first per trial
  std::vector<int> chain;    // h0 after twisting down by 0, 1, ..., h0 general points
  bool passed = false;
};

/// Samples general points and checks h0(I(-p)) = h0(I) - 1 and
/// h1(I(p)) = h1(I) - 1, then walks h0 down to zero one point at a time.
inline DropReport general_drop_check(const RationalNodalCurve& curve, const TFSheaf& sheaf, int trials,
                                     std::uint64_t seed) {
  constexpr int kBudget = 5;
  const Cohomology base = cohomology(curve, sheaf);
  detail::require(base.h0 >= 1, "no-sections", "general drop check needs h0 >= 1");
  Rng rng(seed);
  DropReport report;
  report.h0 = base.h0;
  report.h1 = base.h1;
  report.trials = trials;
  for (int trial = 0; trial < trials; ++trial) {
    for (int attempt = 0; attempt < kBudget; ++attempt) {
      if (attempt > 0) ++report.resamples;
      const Rational p = random_smooth_point(curve, rng);
      if (h0(curve, twist_by_point(curve, sheaf, p, -1)) == base.h0 - 1) {
        ++report.h0_drops;
        break;
      }
    }
    if (base.h1 >= 1) {
      for (int attempt = 0; attempt < kBudget; ++attempt) {
        if (attempt > 0) ++report.resamples;
        const Rational p = random_smooth_point(curve, rng);
        if (cohomology(curve, twist_by_point(curve, sheaf, p, 1)).h1 == base.h1 - 1) {
          ++report.h1_drops;
          break;
        }
      }
    }
  }
  // d = h0 successive general points.
  TFSheaf current = sheaf;
  std::vector<Rational> used;
  report.chain.push_back(base.h0);
  for (int step = 0; step < base.h0; ++step) {
    const int before = report.chain.back();
    int after = before;
    for (int attempt = 0; attempt < kBudget && after != before - 1; ++attempt) {
      const Rational p = random_smooth_point(curve, rng, used);
      const TFSheaf next = twist_by_point(curve, current, p, -1);
      after = h0(curve, next);
      if (after == before - 1) {
        current = next;
        used.push_back(p);
      }
    }
    report.chain.push_back(after);
    if (after != before - 1) break;
  }
  report.passed = report.h0_drops == trials && (base.h1 == 0 || report.h1_drops == trials) &&
                  report.chain.back() == 0 && static_cast<int>(report.chain.size()) == base.h0 + 1;
  return report;
}

struct ThetaReport {
  int n = 0;
  int h0 = 0;
  int h1 = 0;
  int ord = 0;
  std::int64_t mult_j = 1;
  std::int64_t mult_theta = 0;
  bool on_theta = false;
  bool singular = false;
  std::optional<std::vector<int>> exponents;    // elementary divisors of a minimal family
  std::vector<std::optional<int>> random_family_orders;
};

struct ThetaClass {
  bool on_theta = false;
  bool in_w1 = false;
  bool in_boundary = false;
  bool singular = false;
};

inline void require_theta_degree(const RationalNodalCurve& curve, const TFSheaf& sheaf) {
  detail::require(sheaf.total_degree() == curve.genus() - 1, "degree-mismatch",
                  "sheaf has degree " + std::to_string(sheaf.total_degree()) + ", theta lives in degree g - 1 = " +
                      std::to_string(curve.genus() - 1));
}

/// Singular points of theta are W^1 (h0 >= 2) together with the boundary.
inline ThetaClass classify_theta_point(const RationalNodalCurve& curve, const TFSheaf& sheaf) {
  require_theta_degree(curve, sheaf);
  const int sections_count = h0(curve, sheaf);
  ThetaClass c;
  c.on_theta = sections_count >= 1;
  c.in_w1 = sections_count >= 2;
  c.in_boundary = c.on_theta && sheaf.n() > 0;
  c.singular = c.on_theta && (c.in_w1 || c.in_boundary);
  return c;
}

/// mult_x Theta = 2^n * h0 and ord_x Theta = h0 at a sheaf that fails to be
/// locally free at n nodes.
inline ThetaReport theta_invariants(const RationalNodalCurve& curve, const TFSheaf& sheaf) {
  require_theta_degree(curve, sheaf);
  const Cohomology c = cohomology(curve, sheaf);
  if (c.h0 != c.h1) throw AssertionFailure("h0 != h1 in degree g - 1");
  ThetaReport r;
  r.n = sheaf.n();
  r.h0 = c.h0;
  r.h1 = c.h1;
  r.ord = c.h0;
  r.mult_j = std::int64_t{1} << r.n;
  r.mult_theta = r.mult_j * r.h0;
  r.on_theta = r.h0 >= 1;
  r.singular = classify_theta_point(curve, sheaf).singular;
  return r;
}

} // namespace ntheta
