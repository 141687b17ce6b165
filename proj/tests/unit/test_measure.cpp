#include <cmath>

#include <gtest/gtest.h>

#include "generators.hpp"
#include "stretchy/measure.hpp"

using namespace stretchy;

namespace {

MeasureParams params(double k, double eps, std::optional<double> q = std::nullopt) {
  MeasureParams p;
  p.k = k;
  p.epsilon = eps;
  p.q = q;
  return p;
}

double termwise(const Vector& v, double k, double eps) {
  double s = 0.0;
  for (Index i = 0; i < v.size(); ++i) s += std::pow(std::sqrt(v(i) * v(i) + eps), k);
  return s;
}

}  // namespace

TEST(SmoothAbs, Examples) {
  EXPECT_NEAR(smooth_abs(0.0, 0.01), 0.1, 1e-15);
  EXPECT_NEAR(smooth_abs(-3.0, 1e-12), 3.0, 1e-6);
  EXPECT_DOUBLE_EQ(smooth_abs(0.6, 1e-4), std::sqrt(0.3601));
  EXPECT_THROW(smooth_abs(1.0, 0.0), InvalidParameter);
  EXPECT_THROW(smooth_abs(1.0, -1.0), InvalidParameter);
}

TEST(SmoothAbs, BoundsProperty) {
  gen::for_cases(31, 500, [](Rng& rng, int) {
    const double x = rng.uniform(-100, 100);
    const double eps = std::pow(10.0, rng.uniform(-12, 1));
    const double f = smooth_abs(x, eps);
    EXPECT_GE(f, std::abs(x));
    EXPECT_LE(f - std::abs(x), std::sqrt(eps) * (1 + 1e-12));
    EXPECT_EQ(f, smooth_abs(-x, eps));
  });
}

TEST(LpNorm, Examples) {
  Vector a(2);
  a << 3, 4;
  EXPECT_NEAR(lp_norm(a, 2), 5.0, 1e-14);
  Vector b(3);
  b << 1, -1, 1;
  EXPECT_NEAR(lp_norm(b, 1), 3.0, 1e-14);
  Vector c(2);
  c << 0.5, 0.5;
  EXPECT_NEAR(lp_norm(c, 0.5), 2.0, 1e-14);
  EXPECT_THROW(lp_norm(c, 0.0), InvalidParameter);
}

TEST(KMeasure, ZeroVector) {
  for (double k : {1.0, 1.5, 3.0}) {
    for (double eps : {1e-6, 1e-2}) {
      const Index d = 7;
      const double expected = std::pow(d * std::pow(eps, k / 2), 1.0 / k);
      EXPECT_NEAR(k_measure(Vector::Zero(d), params(k, eps)), expected, 1e-14 * expected);
    }
  }
}

TEST(KMeasure, EuclideanLimit) {
  Vector v(2);
  v << 3, 4;
  EXPECT_NEAR(k_measure(v, params(2, 1e-16)), 5.0, 1e-7);
}

TEST(KMeasure, TermwiseOracle) {
  Vector v(2);
  v << 1, -1;
  const double expected = std::pow(termwise(v, 1.1, 1e-4), 1.0 / 1.1);
  EXPECT_NEAR(k_measure(v, params(1.1, 1e-4)), expected, 1e-12);
}

TEST(KMeasure, Validation) {
  EXPECT_THROW(k_measure(Vector::Ones(2), params(0, 1e-4)), InvalidParameter);
  EXPECT_THROW(k_measure(Vector::Ones(2), params(2, 0)), InvalidParameter);
  EXPECT_THROW(k_measure(Vector::Ones(2), params(2, 1e-4, -1.0)), InvalidParameter);
}

TEST(KMeasure, SignSymmetryProperty) {
  gen::for_cases(32, 200, [](Rng& rng, int) {
    Vector v = gen::vec(rng, gen::size_in(rng, 1, 8), -3, 3);
    const auto p = params(rng.uniform(1, 4), std::pow(10.0, rng.uniform(-8, -1)));
    const double base = k_measure(v, p);
    v(static_cast<Index>(rng.below(static_cast<std::uint64_t>(v.size())))) *= -1.0;
    EXPECT_EQ(k_measure(v, p), base);
  });
}

TEST(KMeasure, MonotoneInEpsilonProperty) {
  gen::for_cases(33, 200, [](Rng& rng, int) {
    const Vector v = gen::vec(rng, gen::size_in(rng, 1, 8), -3, 3);
    const double k = rng.uniform(1, 4);
    const double e1 = std::pow(10.0, rng.uniform(-8, -1));
    const double e2 = e1 * rng.uniform(1.0, 100.0);
    EXPECT_LE(k_measure(v, params(k, e1)), k_measure(v, params(k, e2)));
  });
}

TEST(KMeasureRaised, Identities) {
  Rng rng(34);
  const Vector v = gen::vec(rng, 6);
  EXPECT_EQ(k_measure_raised(v, params(1.7, 1e-4, 1.0)), k_measure(v, params(1.7, 1e-4)));
  EXPECT_NEAR(k_measure_raised(v, params(1.7, 1e-4)), termwise(v, 1.7, 1e-4), 1e-12);
  Vector w(2);
  w << 1, 2;
  EXPECT_NEAR(k_measure_raised(w, params(2, 1e-14, 2.0)), 5.0, 1e-6);
  const double q = 0.5;
  EXPECT_NEAR(k_measure_raised(v, params(1.7, 1e-4, q)),
              std::pow(k_measure(v, params(1.7, 1e-4)), q), 1e-12);
}

TEST(Convexity, Examples) {
  const Vector grid = linspace(-2, 2, 101);
  EXPECT_TRUE(convexity_check(2, 1e-4, grid));
  EXPECT_TRUE(convexity_check(1, 1e-4, grid));
  EXPECT_TRUE(convexity_check(1.1, 1e-4, grid));
}

TEST(Convexity, DetectsConcavity) {
  EXPECT_FALSE(convexity_check(0.5, 1e-4, linspace(-2, 2, 101)));
}

TEST(Convexity, ChordProperty) {
  gen::for_cases(35, 300, [](Rng& rng, int) {
    const double k = rng.uniform(1, 4);
    const double eps = std::pow(10.0, rng.uniform(-6, -1));
    const Index d = gen::size_in(rng, 1, 6);
    const Vector a = gen::vec(rng, d, -3, 3);
    const Vector b = gen::vec(rng, d, -3, 3);
    const double lam = rng.uniform();
    const double lhs = termwise(lam * a + (1 - lam) * b, k, eps);
    const double rhs = lam * termwise(a, k, eps) + (1 - lam) * termwise(b, k, eps);
    EXPECT_LE(lhs, rhs + 1e-10);
  });
}
