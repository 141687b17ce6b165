#pragma once

// lp norms, the smooth absolute value sqrt(x^2 + eps) and the k-measure built on it.
// These are diagnostics only: the solvers work in the eps -> 0 limit and never see eps.

#include <cmath>
#include <optional>

#include "stretchy/errors.hpp"
#include "stretchy/numeric.hpp"

namespace stretchy {

struct MeasureParams {
  double k = 2.0;
  double epsilon = 1e-4;
  std::optional<double> q;  // outer exponent, defaults to k

  double outer() const { return q.value_or(k); }

  void validate() const {
    if (!(k > 0.0) || !std::isfinite(k)) {
      throw InvalidParameter("k", "must be positive and finite");
    }
    if (!(epsilon > 0.0)) {
      throw InvalidParameter("epsilon", "must be positive");
    }
    if (!(outer() > 0.0)) {
      throw InvalidParameter("q", "must be positive");
    }
  }
};

inline double smooth_abs(double x, double epsilon) {
  if (!(epsilon > 0.0)) {
    throw InvalidParameter("epsilon", "must be positive");
  }
  return std::sqrt(x * x + epsilon);
}

inline double lp_norm(const Vector& v, double p) {
  if (!(p > 0.0)) {
    throw InvalidParameter("p", "must be positive");
  }
  double sum = 0.0;
  for (Index i = 0; i < v.size(); ++i) {
    sum += std::pow(std::abs(v(i)), p);
  }
  return std::pow(sum, 1.0 / p);
}

namespace detail {

inline double smooth_power_sum(const Vector& v, double k, double epsilon) {
  double sum = 0.0;
  for (Index i = 0; i < v.size(); ++i) {
    sum += std::pow(smooth_abs(v(i), epsilon), k);
  }
  return sum;
}

}  // namespace detail

/// (sum_j f(v_j)^k)^(1/k) with f the smooth absolute value.
inline double k_measure(const Vector& v, const MeasureParams& params) {
  params.validate();
  return std::pow(detail::smooth_power_sum(v, params.k, params.epsilon), 1.0 / params.k);
}

/// k_measure(v)^q. q = 1 returns k_measure unchanged; q = k returns the raw power sum.
inline double k_measure_raised(const Vector& v, const MeasureParams& params) {
  params.validate();
  const double q = params.outer();
  if (q == 1.0) {
    return k_measure(v, params);
  }
  const double sum = detail::smooth_power_sum(v, params.k, params.epsilon);
  if (q == params.k) {
    return sum;
  }
  return std::pow(sum, q / params.k);
}

/// Checks convexity of x -> f(x)^k on each grid point by the centred second difference
/// g(x+h) - 2 g(x) + g(x-h) >= -1e-8 with h = 1e-4.
inline bool convexity_check(double k, double epsilon, const Vector& grid) {
  constexpr double h = 1e-4;
  constexpr double tol = -1e-8;
  const auto g = [&](double x) { return std::pow(smooth_abs(x, epsilon), k); };
  for (Index i = 0; i < grid.size(); ++i) {
    const double x = grid(i);
    const double second = g(x + h) - 2.0 * g(x) + g(x - h);
    if (!(second >= tol)) {
      return false;
    }
  }
  return true;
}

inline Vector linspace(double lo, double hi, Index n) {
  return Vector::LinSpaced(n, lo, hi);
}

}  // namespace stretchy
