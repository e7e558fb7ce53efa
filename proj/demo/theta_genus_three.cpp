// A genus three line bundle with two sections: theta has order 2 there.

#include <iostream>

#include "ntheta/curve.hpp"
#include "ntheta/family.hpp"

int main() {
  using namespace ntheta;
  const auto curve = RationalNodalCurve::from_pairs({{1, -1}, {2, -2}, {3, -3}});
  const auto sheaf = make_sheaf(curve, {}, 2, {{0, 1}, {1, 1}, {2, 1}});
  const Cohomology h = cohomology(curve, sheaf);
  std::cout << "h0 " << h.h0 << "  h1 " << h.h1 << "\n";
  const ThetaReport r = verify_theorem_A(curve, sheaf, 16, 0);
  std::cout << "ord " << r.ord << "  multTheta " << r.mult_theta << "  singular " << std::boolalpha << r.singular
            << "\n";
  const ThetaClass c = classify_theta_point(curve, sheaf);
  std::cout << "in W1 " << c.in_w1 << "  boundary " << c.in_boundary << "\n";
}
