#include <cmath>

#include <gtest/gtest.h>

#include "generators.hpp"
#include "oracles.hpp"
#include "stretchy/data_io.hpp"
#include "stretchy/estimator.hpp"

using namespace stretchy;

namespace {

ModelSpec poly_spec(int order, double k, Regularization reg = Exact{}, double density = 1.0) {
  ModelSpec spec;
  spec.basis = {BasisKind::poly_univariate, order, true};
  spec.stretch.k = k;
  spec.stretch.reg = reg;
  spec.density = density;
  return spec;
}

ModelSpec twoclass_spec(double k, double density) {
  ModelSpec spec;
  spec.basis = {BasisKind::poly_bivariate, 28, true};
  spec.transform.standardize = true;
  spec.transform.quadrant_map = true;
  spec.stretch.k = k;
  spec.density = density;
  return spec;
}

Dataset table_data() { return synthesize(SynthSpec{SynthKind::poly1d, 5, 0.0, 1}); }

}  // namespace

TEST(RetainedCount, RoundHalfUp) {
  EXPECT_EQ(retained_count(0.5, 10), 5);
  EXPECT_EQ(retained_count(0.1, 435), 44);
  EXPECT_EQ(retained_count(0.01, 435), 4);
  EXPECT_EQ(retained_count(0.01, 10), 1);
  EXPECT_EQ(retained_count(0.25, 10), 3);
  EXPECT_EQ(retained_count(1.0, 7), 7);
}

TEST(SelectColumns, MagnitudeTiesAndIntercept) {
  Vector a(6);
  a << 0.01, -5, 3, -3, 0.5, 5;
  EXPECT_EQ(select_columns(a, 3, true), (std::vector<Index>{0, 1, 5}));
  EXPECT_EQ(select_columns(a, 3, false), (std::vector<Index>{1, 2, 5}));
  EXPECT_EQ(select_columns(a, 4, false), (std::vector<Index>{1, 2, 3, 5}));
  EXPECT_EQ(select_columns(a, 1, true), (std::vector<Index>{0}));
}

TEST(SelectColumns, SortedUniqueProperty) {
  gen::for_cases(71, 200, [](Rng& rng, int) {
    const Index d = gen::size_in(rng, 1, 40);
    const Vector a = gen::vec(rng, d, -2, 2);
    const Index keep = gen::size_in(rng, 1, d);
    const bool icpt = rng.below(2) == 1;
    const auto sel = select_columns(a, keep, icpt);
    ASSERT_EQ(static_cast<Index>(sel.size()), keep);
    for (std::size_t i = 1; i < sel.size(); ++i) EXPECT_LT(sel[i - 1], sel[i]);
    if (icpt) EXPECT_EQ(sel.front(), 0);
    EXPECT_EQ(sel, select_columns(a, keep, icpt));
  });
}

TEST(Fit, FullDensityEqualsDirectSolve) {
  const Dataset ds = table_data();
  const FittedModel m = fit(ds.features, ds.targets, poly_spec(10, 1.2));
  const Matrix p = poly_features_univariate(ds.features.col(0), 10, true);
  const FittedCoefficients direct = solve_dual_exact(p, ds.targets, 1.2);
  EXPECT_EQ(m.coefficients.alpha, direct.alpha);
  EXPECT_EQ(static_cast<Index>(m.selected_columns.size()), 11);
  EXPECT_EQ(m.coefficients.form, SolverForm::dual_exact);
  EXPECT_TRUE(m.training_positivity);
}

TEST(Fit, HalfDensityKeepsFiveWithIntercept) {
  const Dataset ds = table_data();
  const FittedModel m = fit(ds.features, ds.targets, poly_spec(9, 1.5, Regularized{1e4}, 0.5));
  EXPECT_EQ(m.full_columns, 10);
  ASSERT_EQ(m.selected_columns.size(), 5u);
  EXPECT_EQ(m.selected_columns.front(), 0);
  EXPECT_TRUE(std::isfinite(m.residual));
  EXPECT_EQ(m.coefficients.alpha.size(), 5);
}

TEST(Fit, InterceptSurvivesEveryDensity) {
  const Dataset ds = table_data();
  for (double density : {0.01, 0.1, 0.3, 0.5, 0.8}) {
    const FittedModel m = fit(ds.features, ds.targets, poly_spec(10, 1.5, Regularized{100}, density));
    EXPECT_EQ(m.selected_columns.front(), 0) << density;
    EXPECT_EQ(static_cast<Index>(m.selected_columns.size()), retained_count(density, 11));
  }
}

TEST(Fit, SelectionIsDeterministic) {
  const Dataset ds = synthesize(SynthSpec{SynthKind::twoclass2d, 20, 0, kDefaultTwoClassSeed});
  const auto a = fit(ds.features, ds.targets, twoclass_spec(1.5, 0.1));
  const auto b = fit(ds.features, ds.targets, twoclass_spec(1.5, 0.1));
  EXPECT_EQ(a.selected_columns, b.selected_columns);
  EXPECT_EQ(a.coefficients.alpha, b.coefficients.alpha);
}

TEST(Fit, TwoClassSparseRefitClassifies) {
  const Dataset ds = synthesize(SynthSpec{SynthKind::twoclass2d, 20, 0, kDefaultTwoClassSeed});
  const FittedModel m = fit(ds.features, ds.targets, twoclass_spec(1.1, 0.1));
  EXPECT_EQ(m.full_columns, 435);
  EXPECT_EQ(m.selected_columns.size(), 44u);
  const Vector labels = classify(m, ds.features);
  const auto errors = (labels.array() != ds.targets.array()).count();
  EXPECT_LE(errors, 4);
}

TEST(Fit, Validation) {
  const Dataset ds = table_data();
  EXPECT_THROW(fit(ds.features, ds.targets, poly_spec(3, 1.5, Exact{}, 0.0)), InvalidParameter);
  EXPECT_THROW(fit(ds.features, ds.targets, poly_spec(3, 1.5, Exact{}, 1.5)), InvalidParameter);
  EXPECT_THROW(fit(ds.features, Vector::Ones(4), poly_spec(3, 1.5)), DimensionMismatch);
  ModelSpec bad = twoclass_spec(1.5, 1.0);
  bad.transform.a = 0.0;
  EXPECT_THROW(fit(ds.features, ds.targets, bad), InvalidParameter);
}

TEST(Fit, NegativeFeaturesNeedQuadrantMap) {
  const Dataset ds = synthesize(SynthSpec{SynthKind::twoclass2d, 20, 0, kDefaultTwoClassSeed});
  ModelSpec spec;
  spec.basis = {BasisKind::raw, 1, true};
  spec.stretch.k = 1.5;
  EXPECT_THROW(fit(ds.features, ds.targets, spec), NegativeBase);
  spec.stretch.k = 2.0;
  EXPECT_NO_THROW(fit(ds.features, ds.targets, spec));
}

TEST(Predict, InterpolatesTrainingData) {
  const Dataset ds = table_data();
  const FittedModel m = fit(ds.features, ds.targets, poly_spec(10, 1.2));
  EXPECT_LT((predict(m, ds.features) - ds.targets).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(Predict, TracksGeneratingPolynomial) {
  const Dataset ds = table_data();
  const FittedModel m = fit(ds.features, ds.targets, poly_spec(10, 1.2));
  const Vector grid = Vector::LinSpaced(401, 0.1, 0.5);
  const Vector pred = predict(m, grid);
  for (Index i = 0; i < grid.size(); ++i) {
    EXPECT_NEAR(pred(i), poly1d_truth(grid(i)), 1e-3) << grid(i);
  }
}

TEST(Predict, InterceptOnlyIsConstant) {
  const Dataset ds = table_data();
  const FittedModel m = fit(ds.features, ds.targets, poly_spec(10, 1.5, Regularized{100}, 0.01));
  ASSERT_EQ(m.selected_columns, std::vector<Index>{0});
  const Vector pred = predict(m, Vector::LinSpaced(7, 0.0, 3.0));
  EXPECT_TRUE((pred.array() == pred(0)).all());
}

TEST(Predict, UsesTrainingStatistics) {
  Rng rng(72);
  const Matrix x = gen::uniform(rng, 12, 2, -3, 3);
  const Vector y = gen::vec(rng, 12);
  ModelSpec spec;
  spec.basis = {BasisKind::raw, 1, true};
  spec.transform.standardize = true;
  spec.transform.quadrant_map = true;
  spec.stretch = {1.5, Regularized{10}};
  const FittedModel m = fit(x, y, spec);
  const Matrix probe = x.topRows(3);
  const TransformParams& t = *m.transform;
  Matrix expected_design(3, 3);
  for (Index i = 0; i < 3; ++i) {
    expected_design(i, 0) = 1.0;
    for (Index j = 0; j < 2; ++j)
      expected_design(i, j + 1) = std::exp(-0.2 * (probe(i, j) - t.means(j)) / t.stds(j));
  }
  EXPECT_LT((predict(m, probe) - expected_design * m.coefficients.alpha).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_THROW(predict(m, Matrix::Ones(2, 3)), DimensionMismatch);
}

TEST(Classify, TieRuleAndSigns) {
  Vector s(3);
  s << -0.5, 0.3, 0.0;
  const Vector l = sign_labels(s);
  EXPECT_EQ(l(0), -1.0);
  EXPECT_EQ(l(1), 1.0);
  EXPECT_EQ(l(2), 1.0);
}

TEST(Classify, SeparableTwoPoints) {
  Matrix x(2, 1);
  x << -1, 1;
  Vector y(2);
  y << -1, 1;
  ModelSpec spec;
  spec.basis = {BasisKind::raw, 1, true};
  spec.stretch.k = 2.0;
  const FittedModel m = fit(x, y, spec);
  EXPECT_EQ(classify(m, x), y);
}
