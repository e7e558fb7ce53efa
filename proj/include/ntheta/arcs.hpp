#pragma once

// Test arcs Spec k[[t]] -> Spec O centered at the origin, contact orders of
// divisors along them, and the minimal-contact constructions on O_std.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ntheta/errors.hpp"
#include "ntheta/local_model.hpp"
#include "ntheta/multiplicity.hpp"
#include "ntheta/power_series.hpp"
#include "ntheta/rational.hpp"

namespace ntheta {

/// An arc into O_std: one series in t per model variable.
struct Arc {
  LocalModel model;
  std::vector<PowerSeries> images;
  int truncation = 0;

  /// Same arc known to a lower precision; validity is preserved.
  Arc truncated(int n) const {
    Arc out = *this;
    out.truncation = std::min(n, truncation);
    for (auto& img : out.images) img = img.truncated(out.truncation);
    return out;
  }
};

/// An arc into an arbitrary quotient described by a RingSpec.
struct GeneralArc {
  RingSpec spec;
  std::vector<PowerSeries> images;
  int truncation = 0;
};

namespace detail {

inline void check_images(const std::vector<std::string>& variables, std::vector<PowerSeries>& images, int n) {
  detail::require(n >= 1, "arc-truncation", "arc truncation N must be >= 1");
  detail::require(images.size() == variables.size(), "arity-mismatch",
                  "need " + std::to_string(variables.size()) + " images, got " + std::to_string(images.size()));
  for (std::size_t i = 0; i < images.size(); ++i) {
    detail::require(images[i].arity() == 1, "image-not-univariate",
                    "image of " + variables[i] + " must be a series in one variable");
    detail::require(images[i].constant_term() == 0, "nonzero-constant-term",
                    "image of " + variables[i] + " has a nonzero constant term");
    images[i] = images[i].truncated(n);
  }
}

inline PowerSeries random_series(Rng& rng, int n, int min_degree = 1) {
  std::vector<Rational> coeffs(static_cast<std::size_t>(n) + 1);
  for (int k = min_degree; k <= n; ++k) coeffs[static_cast<std::size_t>(k)] = rng.uniform(-9, 9);
  return PowerSeries::univariate(coeffs, n);
}

inline PowerSeries zero_series(int n) { return PowerSeries({"t"}, n); }

inline PowerSeries linear_series(const Rational& a, int n) { return PowerSeries::univariate({0, a}, n); }

} // namespace detail

inline Arc make_arc(const LocalModel& model, std::vector<PowerSeries> images, int n) {
  detail::check_images(model.variables(), images, n);
  for (int i = 0; i < model.nodes(); ++i)
    detail::require(images[model.u(i)].is_zero() || images[model.v(i)].is_zero(), "node-constraint",
                    "u" + std::to_string(i + 1) + " and v" + std::to_string(i + 1) +
                        " both have nonzero images, but u*v = 0 and k[[t]] is a domain");
  return Arc{model, std::move(images), n};
}

inline GeneralArc make_general_arc(const RingSpec& spec, std::vector<PowerSeries> images, int n) {
  detail::check_images(spec.variables, images, n);
  for (const auto& rel : spec.relations) {
    detail::require(rel.variables() == spec.variables, "variable-mismatch", "relation over wrong variables");
    const PowerSeries pulled = substitute(rel, images, n);
    detail::require(pulled.is_zero(), "relation-violated",
                    "relation " + rel.to_string() + " pulls back to " + pulled.to_string());
  }
  return GeneralArc{spec, std::move(images), n};
}

/// t-order of the pulled-back equation. nullopt: the pullback is zero modulo
/// t^(N+1), i.e. the arc lies in the divisor to this precision.
struct Contact {
  Order order;
  bool inside_divisor() const noexcept { return !order.has_value(); }
};

inline Contact arc_contact(const Arc& arc, const ModelElement& f) {
  detail::require(arc.model == f.model(), "model-mismatch", "arc and element live on different models");
  detail::require(!f.is_zero(), "zero-element", "divisor equation is zero in O_std");
  return {order(substitute(f.series(), arc.images, arc.truncation))};
}

inline Contact arc_contact(const GeneralArc& arc, const PowerSeries& f) {
  detail::require(f.variables() == arc.spec.variables, "variable-mismatch", "element over wrong variables");
  return {order(substitute(f, arc.images, arc.truncation))};
}

/// Arc that fails the standing assumption of avoiding the divisor is a hard error here.
inline int require_contact(const Contact& c) {
  if (c.inside_divisor())
    throw PreconditionError("arc-inside-divisor", "arc factors through the divisor to the working precision");
  return *c.order;
}

struct MinimalArc {
  Arc arc;
  BranchIndex branch;
  int contact = 0;
};

namespace detail {

/// Generic linear arc x_j -> a_j t on the given branch coordinates, with a
/// drawn until lead(a) != 0. Terminates with probability 1 over Q.
inline std::optional<Arc> generic_linear_arc(const LocalModel& model, const std::vector<std::size_t>& coords,
                                             const PowerSeries& lead, int n, Rng& rng, int attempts = 500) {
  for (int attempt = 0; attempt < attempts; ++attempt) {
    std::vector<Rational> a;
    for (std::size_t k = 0; k < coords.size(); ++k) a.emplace_back(rng.uniform(-9, 9));
    if (lead.evaluate(a) == 0) continue;
    std::vector<PowerSeries> images(model.variable_count(), zero_series(n));
    for (std::size_t k = 0; k < coords.size(); ++k) images[coords[k]] = linear_series(a[k], n);
    return make_arc(model, std::move(images), n);
  }
  return std::nullopt;
}

} // namespace detail

/// An arc whose contact with f equals ord(f): a generic line on a branch of
/// minimal order.
inline MinimalArc minimal_arc(const ModelElement& f, int n, std::uint64_t seed) {
  detail::require(f.series().constant_term() == 0, "unit-equation", "divisor equation is a unit");
  const BranchOrders orders = branch_orders(f);
  const Order ord = ord_at_origin(f);
  detail::require(ord.has_value() && *ord <= n, "truncation-too-small",
                  "arc truncation N must be at least ord(f)");
  Rng rng(seed);
  for (const auto& entry : orders.entries) {
    if (entry.order != ord) continue;
    const PowerSeries projected = branch_project(f, entry.branch);
    const auto lead = leading_form(projected).form;
    const auto coords = branch_coordinates(f.model(), entry.branch);
    if (auto arc = detail::generic_linear_arc(f.model(), coords, lead, n, rng)) {
      const int contact = require_contact(arc_contact(*arc, f));
      if (contact != *ord)
        throw AssertionFailure("generic branch arc has contact " + std::to_string(contact) + " != ord " +
                               std::to_string(*ord));
      return {std::move(*arc), entry.branch, contact};
    }
  }
  throw PreconditionError("directions-exhausted", "no arc direction found with nonvanishing leading form");
}

struct ZArcSearch {
  std::optional<Arc> arc;  // set when an arc achieving ord(f) exists through Z
  Order best_contact;      // least contact achieved by arcs through Z
  int ord = 0;

  bool found() const noexcept { return arc.has_value(); }
};

/// Searches arcs through Z = {all u_i = v_i = 0}: these see only f|_Z, so
/// an arc through Z achieves ord(f) exactly when ord(f|_Z) = ord(f).
inline ZArcSearch minimal_arc_through_z(const ModelElement& f, int n, std::uint64_t seed) {
  detail::require(f.series().constant_term() == 0, "unit-equation", "divisor equation is a unit");
  const Order ord = ord_at_origin(f);
  detail::require(ord.has_value(), "zero-element", "divisor equation is zero in O_std");
  const LocalModel& model = f.model();
  ZArcSearch result;
  result.ord = *ord;
  if (model.smooth() == 0) return result;
  // f|_Z as a series in w1..wm.
  std::vector<std::size_t> coords;
  std::vector<std::string> names;
  for (int j = 0; j < model.smooth(); ++j) {
    coords.push_back(model.w(j));
    names.push_back(model.variables()[model.w(j)]);
  }
  const PowerSeries on_z = f.series().with_zeroed(model.node_mask());
  PowerSeries restricted(names, f.series().truncation());
  for (const auto& [e, c] : on_z.terms()) {
    Exponent projected{};
    for (std::size_t k = 0; k < coords.size(); ++k) projected[k] = e[coords[k]];
    restricted.add_term(projected, c);
  }
  const Order restricted_order = order(restricted);
  if (!restricted_order) return result;

  Rng rng(seed);
  const int precision = std::max(n, *restricted_order);
  auto arc = detail::generic_linear_arc(model, coords, leading_form(restricted).form, precision, rng);
  if (!arc) return result;
  result.best_contact = arc_contact(*arc, f).order;
  if (result.best_contact == ord) result.arc = std::move(arc);
  return result;
}

struct ArcSampleReport {
  int requested = 0;
  int evaluated = 0;        // draws whose contact was finite
  int inside_divisor = 0;   // skipped: arc in the divisor to precision
  int ord = 0;
  Order min_contact;
  int violations = 0;       // contact < ord
  std::map<int, int> histogram;
  std::optional<std::vector<PowerSeries>> witness;  // a draw achieving min_contact
};

namespace detail {

inline std::size_t size(const std::vector<PowerSeries>& images) {
  std::size_t terms = 0;
  for (const auto& img : images) terms += img.terms().size();
  return terms;
}

/// Keeps the sparsest draw among those of least contact as the witness.
inline void record(ArcSampleReport& report, const Contact& contact, const std::vector<PowerSeries>& images) {
  if (contact.inside_divisor()) {
    ++report.inside_divisor;
    return;
  }
  const int c = *contact.order;
  ++report.evaluated;
  ++report.histogram[c];
  if (c < report.ord) ++report.violations;
  if (!report.min_contact || c < *report.min_contact || (c == *report.min_contact && size(images) < size(*report.witness))) {
    report.min_contact = c;
    report.witness = images;
  }
}

} // namespace detail

/// Random arcs on O_std: at each node one side is zeroed (sometimes both),
/// every other coordinate gets a random series with coefficients in [-9, 9].
inline ArcSampleReport sample_arcs_check(const ModelElement& f, int count, int n, std::uint64_t seed) {
  const Order ord = ord_at_origin(f);
  detail::require(ord.has_value(), "zero-element", "divisor equation is zero in O_std");
  const LocalModel& model = f.model();
  ArcSampleReport report;
  report.requested = count;
  report.ord = *ord;
  Rng rng(seed);
  for (int draw = 0; draw < count; ++draw) {
    std::vector<PowerSeries> images(model.variable_count(), detail::zero_series(n));
    for (int i = 0; i < model.nodes(); ++i) {
      const auto side = rng.uniform(0, 3);  // 0,1: keep u; 2: keep v; 3: neither
      if (side <= 1) images[model.u(i)] = detail::random_series(rng, n);
      if (side == 2) images[model.v(i)] = detail::random_series(rng, n);
    }
    for (int j = 0; j < model.smooth(); ++j) images[model.w(j)] = detail::random_series(rng, n);
    const Arc arc = make_arc(model, images, n);
    detail::record(report, arc_contact(arc, f), arc.images);
  }
  if (report.violations > 0)
    throw AssertionFailure(std::to_string(report.violations) + " sampled arcs have contact below ord(f)");
  return report;
}

/// Produces arc images for a RingSpec from a random stream and a truncation.
using Parametrization = std::function<std::vector<PowerSeries>(Rng&, int)>;

/// Arcs on y^2 = x^3 (variables x, y, z): x = s^2, y = s^3, z random, with s a
/// random series without constant term. One draw in four takes s = t, and one
/// in four takes z = 0.
inline Parametrization cusp_parametrization() {
  return [](Rng& rng, int n) {
    const PowerSeries s = rng.uniform(0, 3) == 0 ? detail::linear_series(1, n) : detail::random_series(rng, n);
    const PowerSeries z = rng.uniform(0, 3) == 0 ? detail::zero_series(n) : detail::random_series(rng, n);
    return std::vector<PowerSeries>{s * s, s * s * s, z};
  };
}

inline ArcSampleReport sample_arcs_check(const RingSpec& spec, const PowerSeries& f, const Parametrization& param,
                                         int count, int n, std::uint64_t seed) {
  const Order ord = order_in_quotient(spec.variables, spec.relations, f);
  detail::require(ord.has_value(), "zero-element", "divisor equation is zero in O");
  ArcSampleReport report;
  report.requested = count;
  report.ord = *ord;
  Rng rng(seed);
  for (int draw = 0; draw < count; ++draw) {
    const GeneralArc arc = make_general_arc(spec, param(rng, n), n);
    detail::record(report, arc_contact(arc, f), arc.images);
  }
  // Violations are reported, not thrown: ord here is only as exact as the input truncation.
  return report;
}

} // namespace ntheta
