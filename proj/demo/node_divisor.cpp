// Multiplicity of the divisor y = x^2 on two planes crossing along a line.

#include <iostream>

#include "ntheta/arcs.hpp"
#include "ntheta/expression.hpp"
#include "ntheta/local_model.hpp"
#include "ntheta/multiplicity.hpp"

int main() {
  using namespace ntheta;
  const LocalModel model(1, 1);
  const ModelElement f = reduce(model, parse_series("y - x^2", model.variables(), 24,
                                                    {{"x", "u1"}, {"y", "v1"}, {"z", "w1"}}));
  const BranchSum sum = mult_divisor_branchsum(f);
  std::cout << "ord     " << to_string(ord_at_origin(f)) << "\n";
  std::cout << "mult_V  " << mult_model(model) << "\n";
  std::cout << "mult_D  " << sum.total << "\n";
  for (const auto& b : sum.per_branch) std::cout << "  " << b.branch.to_string() << "  " << to_string(b.order) << "\n";
  const auto hs = hilbert_samuel(ring_spec(f), 10);
  std::cout << "hilbert-samuel multiplicity " << hs.multiplicity << "\n";
  const MinimalArc arc = minimal_arc(f, 16, 0);
  std::cout << "minimal arc contact " << arc.contact << "\n";
}
