// Fits y = 1 + 0.6 x - 1.5 x^3 + 0.8 x^4 on five points with an order-10 polynomial
// basis and prints the coefficients for a few stretch exponents.

#include <cstdio>

#include "stretchy/stretchy.hpp"

int main() {
  using namespace stretchy;
  const Dataset ds = synthesize(SynthSpec{SynthKind::poly1d, 5, 0.0, 1});
  const Matrix p = poly_features_univariate(ds.features.col(0), 10, true);

  std::printf("%-6s", "k");
  for (Index j = 0; j < p.cols(); ++j) std::printf(" %11s", ("a" + std::to_string(j)).c_str());
  std::printf("\n");
  for (double k : {1.2, 1.5, 1.8, 2.0}) {
    const FittedCoefficients fc = solve_stretchy(p, ds.targets, StretchConfig{k, Exact{}});
    std::printf("%-6.2f", k);
    for (Index j = 0; j < fc.alpha.size(); ++j) std::printf(" %11.4g", fc.alpha(j));
    std::printf("\n");
  }
  return 0;
}
