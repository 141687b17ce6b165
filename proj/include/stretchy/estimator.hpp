#pragma once

// End-to-end fitting: input transform, basis expansion, stretchy solve and the optional
// second pass that keeps only the largest coefficients.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <vector>

#include "stretchy/errors.hpp"
#include "stretchy/numeric.hpp"
#include "stretchy/solver.hpp"
#include "stretchy/transform.hpp"

namespace stretchy {

/// What to do to raw inputs before basis expansion. Statistics are learned at fit time.
struct TransformSettings {
  bool standardize = false;
  bool quadrant_map = false;
  double a = kNominalQuadrantSlope;
  Vector b;  // empty means zeros
};

struct ModelSpec {
  TransformSettings transform;
  BasisSpec basis;
  StretchConfig stretch;
  double density = 1.0;  // fraction of basis columns kept by the second pass

  void validate() const {
    if (!(density > 0.0 && density <= 1.0)) {
      throw InvalidParameter("density", "must lie in (0, 1]");
    }
    if (transform.quadrant_map && transform.a == 0.0) {
      throw InvalidParameter("a", "quadrant map slope must be non-zero");
    }
    stretch.validate();
  }
};

struct FittedModel {
  ModelSpec spec;
  std::optional<TransformParams> transform;
  Index full_columns = 0;
  std::vector<Index> selected_columns;  // ascending indices into the full basis
  FittedCoefficients coefficients;      // over selected_columns only
  bool training_positivity = false;
  double first_pass_residual = 0.0;
  double residual = 0.0;  // ||y - P_sel alpha|| on the training data
};

/// Number of columns the second pass keeps: max(1, round-half-up(density * D)).
inline Index retained_count(double density, Index columns) {
  const auto n = static_cast<Index>(std::floor(density * static_cast<double>(columns) + 0.5));
  return std::clamp<Index>(n, 1, columns);
}

/// Ranks columns by |alpha_j| descending (ties to the lower index) and keeps `keep` of
/// them. With an intercept at column 0, it always takes one of the slots.
inline std::vector<Index> select_columns(const Vector& alpha, Index keep, bool has_intercept) {
  std::vector<Index> order(static_cast<std::size_t>(alpha.size()));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index lhs, Index rhs) {
    return std::abs(alpha(lhs)) > std::abs(alpha(rhs));
  });
  std::vector<Index> selected;
  if (has_intercept) {
    selected.push_back(0);
  }
  for (Index idx : order) {
    if (static_cast<Index>(selected.size()) >= keep) {
      break;
    }
    if (has_intercept && idx == 0) {
      continue;
    }
    selected.push_back(idx);
  }
  std::sort(selected.begin(), selected.end());
  return selected;
}

inline Matrix take_columns(const Matrix& m, const std::vector<Index>& columns) {
  Matrix out(m.rows(), static_cast<Index>(columns.size()));
  for (std::size_t j = 0; j < columns.size(); ++j) {
    out.col(static_cast<Index>(j)) = m.col(columns[j]);
  }
  return out;
}

inline std::optional<TransformParams> fit_transform(const Matrix& x_raw,
                                                    const TransformSettings& settings) {
  std::optional<TransformParams> params;
  if (settings.standardize) {
    params = zscore_fit(x_raw, settings.a);
  } else if (settings.quadrant_map) {
    params = identity_transform(x_raw.cols(), settings.a);
  }
  if (params && settings.b.size() != 0) {
    if (settings.b.size() != x_raw.cols()) {
      throw DimensionMismatch("quadrant offsets b must have one entry per input feature");
    }
    params->b = settings.b;
  }
  return params;
}

inline FittedModel fit(const Matrix& x_raw, const Vector& y, const ModelSpec& spec) {
  spec.validate();
  if (x_raw.rows() != y.size()) {
    throw DimensionMismatch("features have " + std::to_string(x_raw.rows()) +
                            " rows, targets have " + std::to_string(y.size()));
  }
  FittedModel model;
  model.spec = spec;
  model.transform = fit_transform(x_raw, spec.transform);
  const DesignMatrix design =
      build_design(x_raw, model.transform, spec.basis, spec.transform.quadrant_map);
  model.training_positivity = design.all_positive;
  model.full_columns = design.cols();

  FittedCoefficients first = solve_stretchy(design.values, y, spec.stretch);
  model.first_pass_residual = residual_norm(design.values, first.alpha, y);

  if (spec.density >= 1.0) {
    model.selected_columns.resize(static_cast<std::size_t>(design.cols()));
    std::iota(model.selected_columns.begin(), model.selected_columns.end(), Index{0});
    model.coefficients = std::move(first);
    model.residual = model.first_pass_residual;
    return model;
  }

  const Index keep = retained_count(spec.density, design.cols());
  model.selected_columns = select_columns(first.alpha, keep, spec.basis.include_intercept);
  const Matrix reduced = take_columns(design.values, model.selected_columns);
  model.coefficients = solve_stretchy(reduced, y, spec.stretch);
  model.residual = residual_norm(reduced, model.coefficients.alpha, y);
  return model;
}

/// Design matrix for new inputs, restricted to the model's selected columns.
inline Matrix model_design(const FittedModel& model, const Matrix& x_raw) {
  if (model.transform && x_raw.cols() != model.transform->features()) {
    throw DimensionMismatch("input has " + std::to_string(x_raw.cols()) +
                            " features, model was trained on " +
                            std::to_string(model.transform->features()));
  }
  const DesignMatrix design = build_design(x_raw, model.transform, model.spec.basis,
                                           model.spec.transform.quadrant_map);
  if (design.cols() != model.full_columns) {
    throw DimensionMismatch("input expands to " + std::to_string(design.cols()) +
                            " basis columns, model expects " +
                            std::to_string(model.full_columns));
  }
  return take_columns(design.values, model.selected_columns);
}

inline Vector predict(const FittedModel& model, const Matrix& x_raw) {
  return model_design(model, x_raw) * model.coefficients.alpha;
}

/// Zero-threshold labels in {-1, +1}; an exact zero maps to +1.
inline Vector sign_labels(const Vector& scores) {
  return scores.unaryExpr([](double v) { return v < 0.0 ? -1.0 : 1.0; });
}

inline Vector classify(const FittedModel& model, const Matrix& x_raw) {
  return sign_labels(predict(model, x_raw));
}

}  // namespace stretchy
