#include <gtest/gtest.h>

#include "ntheta/errors.hpp"
#include "ntheta/expression.hpp"
#include "ntheta/local_model.hpp"
#include "ntheta/multiplicity.hpp"

using namespace ntheta;

namespace {

ModelElement element(int n, int m, const std::string& text, int truncation = 12) {
  const LocalModel model(n, m);
  return reduce(model, parse_series(text, model.variables(), truncation));
}

/// Random element with zero constant term: a few monomials of degree 1..3.
ModelElement random_element(Rng& rng, const LocalModel& model, int truncation) {
  for (;;) {
    PowerSeries f(model.variables(), truncation);
    const int terms = static_cast<int>(rng.uniform(1, 4));
    for (int k = 0; k < terms; ++k) {
      Exponent e{};
      const int degree = static_cast<int>(rng.uniform(1, 3));
      for (int d = 0; d < degree; ++d) ++e[static_cast<std::size_t>(rng.uniform(0, static_cast<std::int64_t>(model.variable_count()) - 1))];
      PowerSeries mono(model.variables(), truncation);
      mono.add_term(e, Rational(rng.nonzero(-4, 4)));
      f = f + mono;
    }
    ModelElement r = reduce(model, f);
    if (!r.is_zero()) return r;
  }
}

}  // namespace

TEST(LocalModel, VariablesAndValidation) {
  const LocalModel model(2, 1);
  EXPECT_EQ(model.variables(), (std::vector<std::string>{"u1", "u2", "v1", "v2", "w1"}));
  EXPECT_EQ(model.dimension(), 3);
  EXPECT_EQ(model.node_mask(), (std::vector<bool>{true, true, true, true, false}));
  EXPECT_THROW(LocalModel(0, 0), PreconditionError);
  EXPECT_THROW(LocalModel(-1, 2), PreconditionError);
  EXPECT_THROW(LocalModel(6, 1), PreconditionError);
}

TEST(LocalModel, NormalFormDropsMixedMonomials) {
  EXPECT_EQ(element(1, 1, "u1*v1 + v1 - u1^2").series().to_string(), "v1 - u1^2");
  EXPECT_EQ(element(1, 0, "(u1 + v1)^2").series().to_string(), "u1^2 + v1^2");
  EXPECT_TRUE(element(2, 0, "u1*v1*u2").is_zero());
  EXPECT_FALSE(element(2, 0, "u1*v2").is_zero());
  const LocalModel model(1, 1);
  EXPECT_THROW(reduce(model, parse_series("x", {"x", "y", "z"}, 4)), PreconditionError);
}

TEST(LocalModelProperty, ReduceIsIdempotentAndAdditive) {
  Rng rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    const LocalModel model(static_cast<int>(rng.uniform(1, 3)), static_cast<int>(rng.uniform(0, 2)));
    const ModelElement f = random_element(rng, model, 10);
    const ModelElement g = random_element(rng, model, 10);
    EXPECT_EQ(reduce(model, f.series()).series(), f.series());
    const PowerSeries sum = f.series() + g.series();
    EXPECT_EQ(reduce(model, reduce(model, sum).series()).series(), reduce(model, sum).series());
    EXPECT_EQ(reduce(model, f.series() * g.series()).series(),
              reduce(model, reduce(model, f.series()).series() * g.series()).series());
  }
}

TEST(Branches, CanonicalOrderAndProjection) {
  const LocalModel model(2, 0);
  const auto branches = enumerate_branches(model);
  ASSERT_EQ(branches.size(), 4u);
  EXPECT_EQ(branches[0].to_string(), "keep-u,keep-u");
  EXPECT_EQ(branches[1].to_string(), "keep-v,keep-u");
  EXPECT_EQ(branches[3].to_string(), "keep-v,keep-v");
  const ModelElement f = element(2, 0, "u1 + v2^2");
  EXPECT_EQ(branch_project(f, branches[0]).to_string(), "u1");
  EXPECT_EQ(branch_project(f, branches[3]).to_string(), "v2^2");
  EXPECT_EQ(enumerate_branches(LocalModel(0, 2))[0].to_string(), "smooth");
}

TEST(Multiplicity, ExampleWithStrictInequality) {
  const ModelElement f = element(1, 1, "v1 - u1^2");
  EXPECT_EQ(ord_at_origin(f), 1);
  const BranchSum sum = mult_divisor_branchsum(f);
  EXPECT_EQ(sum.total, 3);
  ASSERT_EQ(sum.per_branch.size(), 2u);
  EXPECT_EQ(sum.per_branch[0].order, 2);
  EXPECT_EQ(sum.per_branch[1].order, 1);
  EXPECT_EQ(mult_model(f.model()), 2);
  const EqnmatCheck eq = check_eqnmat(f);
  EXPECT_TRUE(eq.holds);
  EXPECT_FALSE(eq.equality);
  const auto table = hilbert_samuel(ring_spec(f), 10);
  EXPECT_TRUE(table.stabilized);
  EXPECT_EQ(table.dimension, 1);
  EXPECT_EQ(table.multiplicity, 3);
}

TEST(Multiplicity, Preconditions) {
  try {
    mult_divisor_branchsum(element(1, 1, "u1 + u1*w1"));
    FAIL();
  } catch (const PreconditionError& e) {
    EXPECT_EQ(e.tag(), "divisor-contains-branch");
  }
  try {
    mult_divisor_branchsum(element(1, 1, "1 + u1"));
    FAIL();
  } catch (const PreconditionError& e) {
    EXPECT_EQ(e.tag(), "unit-equation");
  }
  EXPECT_THROW(mult_divisor_branchsum(element(1, 1, "u1*v1")), PreconditionError);
}

TEST(HilbertSamuel, SmoothAndHypersurfaceExamples) {
  const std::vector<std::string> xy{"x", "y"};
  RingSpec plane{xy, {}, std::nullopt};
  const auto smooth = hilbert_samuel(plane, 6);
  EXPECT_EQ(smooth.values, (std::vector<std::int64_t>{1, 3, 6, 10, 15, 21, 28}));
  EXPECT_EQ(smooth.dimension, 2);
  EXPECT_EQ(smooth.multiplicity, 1);
  RingSpec cusp{xy, {parse_series("y^2 - x^3", xy, 10)}, std::nullopt};
  const auto c = hilbert_samuel(cusp, 8);
  EXPECT_EQ(c.dimension, 1);
  EXPECT_EQ(c.multiplicity, 2);
  RingSpec fat_point{xy, {parse_series("x^2", xy, 10), parse_series("y^3", xy, 10)}, std::nullopt};
  const auto fp = hilbert_samuel(fat_point, 8);
  EXPECT_EQ(fp.dimension, 0);
  EXPECT_EQ(fp.multiplicity, 6);
  EXPECT_THROW(hilbert_samuel(plane, 2), PreconditionError);
  RingSpec coarse{xy, {parse_series("x*y", xy, 4)}, std::nullopt};
  EXPECT_THROW(hilbert_samuel(coarse, 8), PreconditionError);
  RingSpec unit{xy, {parse_series("1 + x", xy, 10)}, std::nullopt};
  EXPECT_THROW(hilbert_samuel(unit, 5), PreconditionError);
}

TEST(HilbertSamuel, StandardModelHasMultiplicityPowerOfTwo) {
  for (int n = 0; n <= 2; ++n)
    for (int m = 0; m <= 1; ++m) {
      const auto t = hilbert_samuel(standard_ring_spec(n, m, 8), 8);
      EXPECT_TRUE(t.stabilized);
      EXPECT_EQ(t.multiplicity, std::int64_t{1} << n) << "n=" << n << " m=" << m;
      EXPECT_EQ(t.dimension, n + m);
    }
}

TEST(OrderInQuotient, CuspAndNodeExamples) {
  const std::vector<std::string> xyz{"x", "y", "z"};
  const auto rel = parse_series("y^2 - x^3", xyz, 12);
  EXPECT_EQ(order_in_quotient(xyz, {rel}, parse_series("x - z^3", xyz, 12)), 1);
  EXPECT_EQ(order_in_quotient(xyz, {rel}, parse_series("y^2", xyz, 12)), 3);
  const auto node = parse_series("x*y", xyz, 12);
  EXPECT_EQ(order_in_quotient(xyz, {node}, parse_series("x*y + z^4", xyz, 12)), 4);
  EXPECT_EQ(order_in_quotient(xyz, {node}, parse_series("x*y", xyz, 12)), std::nullopt);
}

TEST(MultiplicityProperty, BranchSumMatchesHilbertSamuelOracle) {
  Rng rng(32);
  int compared = 0;
  for (int trial = 0; trial < 150; ++trial) {
    const LocalModel model(static_cast<int>(rng.uniform(1, 2)), static_cast<int>(rng.uniform(0, 1)));
    const ModelElement f = random_element(rng, model, 10);
    if (branch_orders(f).any_vanishing) continue;
    const BranchSum sum = mult_divisor_branchsum(f);
    const auto table = hilbert_samuel(ring_spec(f), 9);
    if (!table.stabilized) continue;
    ++compared;
    EXPECT_EQ(table.multiplicity, sum.total) << f.series().to_string();
    EXPECT_EQ(table.dimension, model.dimension() - 1);
    EXPECT_TRUE(check_eqnmat(f).holds);
  }
  EXPECT_GE(compared, 50);
}

TEST(MultiplicityProperty, MinimumBranchOrderEqualsOrder) {
  Rng rng(33);
  for (int trial = 0; trial < 200; ++trial) {
    const LocalModel model(static_cast<int>(rng.uniform(0, 3)), static_cast<int>(rng.uniform(1, 2)));
    const ModelElement f = random_element(rng, model, 10);
    const BranchOrders orders = branch_orders(f);
    EXPECT_EQ(orders.minimum, ord_at_origin(f)) << f.series().to_string();
    const auto ord_q = order_in_quotient(standard_ring_spec(model.nodes(), model.smooth(), 10).variables,
                                         standard_ring_spec(model.nodes(), model.smooth(), 10).relations, f.series());
    EXPECT_EQ(ord_q, ord_at_origin(f));
  }
}
