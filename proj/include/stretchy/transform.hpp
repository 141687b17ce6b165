#pragma once

// Input pipeline: z-score standardization, the exponential first-quadrant map and
// polynomial basis expansion into the design matrix.

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>

#include "stretchy/errors.hpp"
#include "stretchy/numeric.hpp"

namespace stretchy {

inline constexpr double kNominalQuadrantSlope = -0.2;

/// Per-feature standardization statistics plus the constants of x -> exp(a x + b_j).
struct TransformParams {
  Vector means;
  Vector stds;
  double a = kNominalQuadrantSlope;
  Vector b;  // empty means all zeros

  Index features() const { return means.size(); }

  Vector offsets() const { return b.size() == 0 ? Vector::Zero(means.size()) : b; }
};

/// Statistics that leave the data untouched; used when only the quadrant map is wanted.
inline TransformParams identity_transform(Index features, double a = kNominalQuadrantSlope) {
  TransformParams p;
  p.means = Vector::Zero(features);
  p.stds = Vector::Ones(features);
  p.a = a;
  return p;
}

/// Column means and sample standard deviations (denominator M - 1).
inline TransformParams zscore_fit(const Matrix& x_raw, double a = kNominalQuadrantSlope) {
  const Index m = x_raw.rows();
  if (m < 2) {
    throw InsufficientSamples("z-score statistics need at least 2 rows");
  }
  TransformParams p;
  p.a = a;
  p.means = x_raw.colwise().mean().transpose();
  p.stds.resize(x_raw.cols());
  for (Index j = 0; j < x_raw.cols(); ++j) {
    const double ss = (x_raw.col(j).array() - p.means(j)).square().sum();
    const double sd = std::sqrt(ss / static_cast<double>(m - 1));
    if (!(sd > 0.0)) {
      throw ZeroVariance(static_cast<std::size_t>(j));
    }
    p.stds(j) = sd;
  }
  return p;
}

inline void check_feature_count(const Matrix& x, const TransformParams& params) {
  if (x.cols() != params.features()) {
    throw DimensionMismatch("input has " + std::to_string(x.cols()) +
                            " features, transform expects " + std::to_string(params.features()));
  }
}

inline Matrix zscore_apply(const Matrix& x_raw, const TransformParams& params) {
  check_feature_count(x_raw, params);
  Matrix out = x_raw.rowwise() - params.means.transpose();
  out.array().rowwise() /= params.stds.transpose().array();
  return out;
}

inline Matrix zscore_invert(const Matrix& x_std, const TransformParams& params) {
  check_feature_count(x_std, params);
  Matrix out = x_std;
  out.array().rowwise() *= params.stds.transpose().array();
  out.rowwise() += params.means.transpose();
  return out;
}

/// exp(a x_ij + b_j): maps every finite input to a strictly positive value.
inline Matrix quadrant_map(const Matrix& x_std, double a, const Vector& b) {
  if (a == 0.0) {
    throw InvalidParameter("a", "quadrant map slope must be non-zero");
  }
  if (b.size() != x_std.cols()) {
    throw DimensionMismatch("quadrant map offsets must match the column count");
  }
  Matrix out(x_std.rows(), x_std.cols());
  for (Index j = 0; j < x_std.cols(); ++j) {
    for (Index i = 0; i < x_std.rows(); ++i) {
      out(i, j) = std::exp(a * x_std(i, j) + b(j));
    }
  }
  require_finite(out, "quadrant_map");
  return out;
}

enum class BasisKind { raw, poly_univariate, poly_bivariate };

inline const char* to_string(BasisKind kind) {
  switch (kind) {
    case BasisKind::raw:
      return "raw";
    case BasisKind::poly_univariate:
      return "poly";
    case BasisKind::poly_bivariate:
      return "poly2";
  }
  return "raw";
}

inline BasisKind basis_kind_from_string(const std::string& s) {
  if (s == "raw") return BasisKind::raw;
  if (s == "poly") return BasisKind::poly_univariate;
  if (s == "poly2") return BasisKind::poly_bivariate;
  throw InvalidParameter("basis", "unknown kind '" + s + "'");
}

struct BasisSpec {
  BasisKind kind = BasisKind::raw;
  int order = 1;
  bool include_intercept = true;
};

/// Number of design columns produced from `features` raw inputs.
inline Index basis_column_count(const BasisSpec& spec, Index features) {
  const Index icpt = spec.include_intercept ? 0 : 1;
  switch (spec.kind) {
    case BasisKind::raw:
      return features + (spec.include_intercept ? 1 : 0);
    case BasisKind::poly_univariate:
      return spec.order + 1 - icpt;
    case BasisKind::poly_bivariate:
      return static_cast<Index>(spec.order + 1) * (spec.order + 2) / 2 - icpt;
  }
  return 0;
}

/// Columns [1, x, x^2, ..., x^n]; the leading 1 is dropped without intercept.
inline Matrix poly_features_univariate(const Vector& x, int order, bool intercept = true) {
  if (order < 0) {
    throw InvalidParameter("order", "must be non-negative");
  }
  const Index first = intercept ? 0 : 1;
  const Index cols = order + 1 - first;
  if (cols < 1) {
    throw InvalidParameter("order", "order 0 without intercept leaves no columns");
  }
  Matrix out(x.size(), cols);
  for (Index i = 0; i < x.size(); ++i) {
    double power = 1.0;
    for (Index p = 0; p <= order; ++p) {
      if (p >= first) {
        out(i, p - first) = power;
      }
      power *= x(i);
    }
  }
  return out;
}

/// All monomials x1^i x2^j with i + j <= n in graded order: degree ascending, and within
/// a degree the power of x1 descending. (n+1)(n+2)/2 columns with intercept.
inline Matrix poly_features_bivariate(const Matrix& x, int order, bool intercept = true) {
  if (x.cols() != 2) {
    throw DimensionMismatch("bivariate basis needs exactly 2 input columns, got " +
                            std::to_string(x.cols()));
  }
  if (order < 0) {
    throw InvalidParameter("order", "must be non-negative");
  }
  BasisSpec spec{BasisKind::poly_bivariate, order, intercept};
  const Index cols = basis_column_count(spec, 2);
  if (cols < 1) {
    throw InvalidParameter("order", "order 0 without intercept leaves no columns");
  }
  Matrix out(x.rows(), cols);
  for (Index r = 0; r < x.rows(); ++r) {
    Index c = 0;
    for (int degree = intercept ? 0 : 1; degree <= order; ++degree) {
      for (int p1 = degree; p1 >= 0; --p1) {
        out(r, c++) = std::pow(x(r, 0), p1) * std::pow(x(r, 1), degree - p1);
      }
    }
  }
  return out;
}

inline Matrix expand_basis(const Matrix& x, const BasisSpec& spec) {
  switch (spec.kind) {
    case BasisKind::raw: {
      if (!spec.include_intercept) {
        return x;
      }
      Matrix out(x.rows(), x.cols() + 1);
      out.col(0).setOnes();
      out.rightCols(x.cols()) = x;
      return out;
    }
    case BasisKind::poly_univariate:
      if (x.cols() != 1) {
        throw DimensionMismatch("univariate basis needs exactly 1 input column, got " +
                                std::to_string(x.cols()));
      }
      return poly_features_univariate(x.col(0), spec.order, spec.include_intercept);
    case BasisKind::poly_bivariate:
      return poly_features_bivariate(x, spec.order, spec.include_intercept);
  }
  return x;
}

/// Basis-expanded features P (rows are samples) and whether every entry is > 0.
struct DesignMatrix {
  Matrix values;
  bool all_positive = false;

  Index rows() const { return values.rows(); }
  Index cols() const { return values.cols(); }
};

inline DesignMatrix make_design(Matrix values) {
  require_finite(values, "design matrix");
  DesignMatrix d;
  d.all_positive = values.size() > 0 && (values.array() > 0.0).all();
  d.values = std::move(values);
  return d;
}

/// z-score (when params are given) -> quadrant map (when enabled) -> basis expansion.
inline DesignMatrix build_design(const Matrix& x_raw, const std::optional<TransformParams>& params,
                                 const BasisSpec& basis, bool use_quadrant_map) {
  if (x_raw.rows() < 1 || x_raw.cols() < 1) {
    throw DimensionMismatch("input matrix is empty");
  }
  Matrix x = params ? zscore_apply(x_raw, *params) : x_raw;
  if (use_quadrant_map) {
    if (!params) {
      throw InvalidParameter("transform", "the quadrant map needs transform parameters");
    }
    x = quadrant_map(x, params->a, params->offsets());
  }
  return make_design(expand_basis(x, basis));
}

}  // namespace stretchy
