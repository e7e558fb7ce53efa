#include <gtest/gtest.h>

#include "ntheta/curve.hpp"
#include "ntheta/errors.hpp"
#include "ntheta/family.hpp"

#include "test_support.hpp"

using namespace ntheta;
using ntheta::fixtures::random_curve;
using ntheta::fixtures::random_subset;

namespace {

RationalNodalCurve nodal_cubic() { return RationalNodalCurve::from_pairs({{0, 1}}); }

}  // namespace

TEST(Curve, Validation) {
  EXPECT_THROW(RationalNodalCurve::from_pairs({}), PreconditionError);
  EXPECT_THROW(RationalNodalCurve::from_pairs({{0, 0}}), PreconditionError);
  EXPECT_THROW(RationalNodalCurve::from_pairs({{0, 1}, {1, 2}}), PreconditionError);
  const auto curve = RationalNodalCurve::from_pairs({{0, 1}, {2, 3}});
  EXPECT_THROW(make_sheaf(curve, {}, 1, {{0, 1}}), PreconditionError);
  EXPECT_THROW(make_sheaf(curve, {0}, 1, {{0, 1}, {1, 1}}), PreconditionError);
  EXPECT_THROW(make_sheaf(curve, {}, 1, {{0, 1}, {1, 0}}), PreconditionError);
  EXPECT_THROW(make_sheaf(curve, {5}, 1, {{0, 1}}), PreconditionError);
}

TEST(Curve, GenusOneExamples) {
  const auto curve = nodal_cubic();
  const auto trivial = make_sheaf(curve, {}, 0, {{0, 1}});
  EXPECT_EQ(cohomology(curve, trivial).h0, 1);
  EXPECT_EQ(cohomology(curve, trivial).h1, 1);
  const auto generic = make_sheaf(curve, {}, 0, {{0, 2}});
  EXPECT_EQ(cohomology(curve, generic).h0, 0);
  const auto nonfree = make_sheaf(curve, {0}, -1, {});
  EXPECT_EQ(cohomology(curve, nonfree).h0, 0);
  EXPECT_EQ(nonfree.total_degree(), 0);
  const auto rep = theta_invariants(curve, trivial);
  EXPECT_EQ(rep.n, 0);
  EXPECT_EQ(rep.h0, 1);
  EXPECT_EQ(rep.ord, 1);
  EXPECT_EQ(rep.mult_theta, 1);
  EXPECT_FALSE(rep.singular);
}

TEST(Curve, DegreeMismatchIsAPrecondition) {
  const auto curve = nodal_cubic();
  try {
    theta_invariants(curve, make_sheaf(curve, {}, 2, {{0, 1}}));
    FAIL();
  } catch (const PreconditionError& e) {
    EXPECT_EQ(e.tag(), "degree-mismatch");
  }
}

TEST(Curve, TwistRoundTripAndDegree) {
  Rng rng(51);
  for (int trial = 0; trial < 50; ++trial) {
    const int g = static_cast<int>(rng.uniform(1, 4));
    const auto curve = random_curve(rng, g);
    const auto nonfree = random_subset(rng, g, static_cast<int>(rng.uniform(0, g)));
    const auto sheaf = make_sheaf(curve, nonfree, static_cast<int>(rng.uniform(-1, 3)),
                                  fixtures::random_gluing(rng, g, nonfree));
    const Rational p = random_smooth_point(curve, rng);
    const auto down = twist_by_point(curve, sheaf, p, -1);
    EXPECT_EQ(down.total_degree(), sheaf.total_degree() - 1);
    const auto back = twist_by_point(curve, down, p, 1);
    EXPECT_EQ(back.glue, sheaf.glue);
    EXPECT_EQ(back.line_degree, sheaf.line_degree);
  }
}

TEST(CurveProperty, TwistDownMatchesSectionsVanishingAtPoint) {
  Rng rng(52);
  for (int trial = 0; trial < 80; ++trial) {
    const int g = static_cast<int>(rng.uniform(1, 4));
    const auto curve = random_curve(rng, g);
    const auto nonfree = random_subset(rng, g, static_cast<int>(rng.uniform(0, g - 1)));
    auto sheaf = fixtures::sheaf_with_section(curve, rng, nonfree, static_cast<int>(rng.uniform(0, 4)));
    if (!sheaf) continue;
    const Rational p = random_smooth_point(curve, rng);
    EXPECT_EQ(h0(curve, twist_by_point(curve, *sheaf, p, -1)), h0_vanishing_at(curve, *sheaf, {p}));
  }
}

TEST(CurveProperty, SymmetricCurveSectionCount) {
  Rng rng(53);
  for (int g = 1; g <= 6; ++g)
    for (int s = 0; s < g; ++s) {
      const auto c = fixtures::random_theta_case(rng, g, s, true);
      EXPECT_EQ(h0(c.curve, c.sheaf), (g - 1 - s) / 2 + 1);
    }
}

TEST(CurveProperty, RiemannRochAndResolutionAgree) {
  Rng rng(54);
  for (int trial = 0; trial < 80; ++trial) {
    const int g = static_cast<int>(rng.uniform(1, 4));
    const auto curve = random_curve(rng, g);
    const auto nonfree = random_subset(rng, g, static_cast<int>(rng.uniform(0, g)));
    const int degree = static_cast<int>(rng.uniform(-3, 2 * g));
    const int line_degree = degree - static_cast<int>(nonfree.size());
    const auto sheaf = make_sheaf(curve, nonfree, line_degree, fixtures::random_gluing(rng, g, nonfree));
    const Cohomology direct = cohomology(curve, sheaf);
    const Cohomology resolved = cohomology_via_resolution(curve, sheaf, static_cast<std::uint64_t>(trial));
    EXPECT_EQ(direct.h0, resolved.h0);
    EXPECT_EQ(direct.h1, resolved.h1);
    EXPECT_EQ(resolved.h0 - resolved.h1, degree - g + 1);
  }
}

TEST(Classify, GenusTwoStrata) {
  const auto curve = RationalNodalCurve::from_pairs({{1, -1}, {2, -2}});
  // Trivial gluing, d_L = 1: sections are the even polynomials of degree <= 1.
  const auto one_section = make_sheaf(curve, {}, 1, {{0, 1}, {1, 1}});
  const ThetaClass a = classify_theta_point(curve, one_section);
  EXPECT_TRUE(a.on_theta);
  EXPECT_FALSE(a.singular);
  const auto boundary = make_sheaf(curve, {0}, 0, {{1, 1}});
  const ThetaClass b = classify_theta_point(curve, boundary);
  EXPECT_TRUE(b.on_theta && b.in_boundary && b.singular);
  const auto off = make_sheaf(curve, {}, 1, {{0, 3}, {1, 5}});
  EXPECT_FALSE(classify_theta_point(curve, off).on_theta);
}

TEST(DropCheck, GeneralPointsDropSectionsOneAtATime) {
  Rng rng(55);
  for (int trial = 0; trial < 20; ++trial) {
    const int g = static_cast<int>(rng.uniform(1, 4));
    const auto c = fixtures::random_theta_case(rng, g, static_cast<int>(rng.uniform(0, g - 1)), rng.coin());
    const DropReport r = general_drop_check(c.curve, c.sheaf, 3, static_cast<std::uint64_t>(trial));
    EXPECT_TRUE(r.passed);
    EXPECT_EQ(r.chain.back(), 0);
  }
  const auto curve = nodal_cubic();
  EXPECT_THROW(general_drop_check(curve, make_sheaf(curve, {}, 0, {{0, 2}}), 3, 0), PreconditionError);
}
