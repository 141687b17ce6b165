#pragma once

// Closed-form stretchy estimators and the classical baselines they reduce to.
//
// With S = (P^T)^{o 1/(k-1)} (elementwise power of the transposed design):
//   dual exact          alpha = S [P S]^-1 y
//   dual regularized    alpha = S [P S + I/(c k)]^-1 y
//   primal regularized  alpha = [S P + I/(c k)]^-1 S y
//   primal exact        alpha = [S P]^-1 S y               (c -> inf, M >= D)
// At k = 2, S = P^T and the forms collapse to least-norm / ridge.

#include <cmath>
#include <optional>
#include <string>
#include <variant>

#include "stretchy/errors.hpp"
#include "stretchy/numeric.hpp"

namespace stretchy {

/// c -> infinity.
struct Exact {};

struct Regularized {
  double c = 1.0;
};

using Regularization = std::variant<Exact, Regularized>;

/// c values at or above this are treated as Exact by the command-line front end.
inline constexpr double kExactThreshold = 1e50;

struct StretchConfig {
  double k = 2.0;
  Regularization reg = Exact{};
  double rcond_threshold = kDefaultRcond;

  bool exact() const { return std::holds_alternative<Exact>(reg); }

  double c() const {
    return exact() ? std::numeric_limits<double>::infinity() : std::get<Regularized>(reg).c;
  }

  /// 1/(c k), zero in exact mode.
  double ridge_term() const { return exact() ? 0.0 : 1.0 / (c() * k); }

  void validate() const {
    if (!(k > 1.0) || !std::isfinite(k)) {
      throw InvalidParameter("k", "stretch exponent must satisfy 1 < k < inf, got " +
                                      std::to_string(k));
    }
    if (!exact() && !(c() > 0.0 && std::isfinite(c()))) {
      throw InvalidParameter("c", "regularization must be positive and finite");
    }
  }
};

enum class SolverForm {
  dual_exact,
  dual_regularized,
  primal_regularized,
  primal_exact,
  ridge,
  least_norm
};

inline const char* to_string(SolverForm form) {
  switch (form) {
    case SolverForm::dual_exact:
      return "dual_exact";
    case SolverForm::dual_regularized:
      return "dual_regularized";
    case SolverForm::primal_regularized:
      return "primal_regularized";
    case SolverForm::primal_exact:
      return "primal_exact";
    case SolverForm::ridge:
      return "ridge";
    case SolverForm::least_norm:
      return "least_norm";
  }
  return "unknown";
}

inline SolverForm solver_form_from_string(const std::string& s) {
  for (auto f : {SolverForm::dual_exact, SolverForm::dual_regularized,
                 SolverForm::primal_regularized, SolverForm::primal_exact, SolverForm::ridge,
                 SolverForm::least_norm}) {
    if (s == to_string(f)) {
      return f;
    }
  }
  throw InvalidParameter("solver_form", "unknown tag '" + s + "'");
}

struct FittedCoefficients {
  Vector alpha;
  std::optional<Vector> beta;  // dual multipliers, dual forms only
  SolverForm form = SolverForm::dual_exact;
  double condition_report = 0.0;  // cond of the system matrix that was factorized
};

namespace detail {

inline void check_system(const Matrix& p, const Vector& y) {
  if (p.rows() < 1 || p.cols() < 1) {
    throw DimensionMismatch("design matrix is empty");
  }
  if (p.rows() != y.size()) {
    throw DimensionMismatch("design has " + std::to_string(p.rows()) + " rows but y has " +
                            std::to_string(y.size()) + " entries");
  }
  if (!y.allFinite()) {
    throw InvalidParameter("y", "targets must be finite");
  }
}

inline void check_k(double k) {
  StretchConfig{k, Exact{}}.validate();
}

inline void check_c(double c) {
  if (!(c > 0.0) || !std::isfinite(c)) {
    throw InvalidParameter("c", "regularization must be positive and finite");
  }
}

inline Matrix add_to_diagonal(Matrix m, double value) {
  if (value != 0.0) {
    m.diagonal().array() += value;
  }
  return m;
}

inline FittedCoefficients dual_solve(const Matrix& p, const Matrix& stretched, const Vector& y,
                                     double ridge, SolverForm form, double rcond) {
  const Matrix system = add_to_diagonal(p * stretched, ridge);
  const LinearSolver lu(system, rcond);
  FittedCoefficients out;
  // Refine beta against the unformed operator P (S beta) + ridge beta, which carries less
  // rounding than the product matrix when S spans many orders of magnitude.
  Vector beta = lu.solve(y);
  Vector residual = y - p * (stretched * beta) - ridge * beta;
  double norm = residual.norm();
  for (int step = 0; step < 3 && norm > 0.0; ++step) {
    const Vector candidate = beta + lu.solve(residual);
    const Vector next = y - p * (stretched * candidate) - ridge * candidate;
    if (!(next.norm() < norm)) {
      break;
    }
    beta = candidate;
    residual = next;
    norm = next.norm();
  }
  out.beta = beta;
  out.alpha = stretched * beta;
  out.form = form;
  out.condition_report = condition_number(system);
  require_finite(out.alpha, "dual solve");
  return out;
}

inline FittedCoefficients primal_solve(const Matrix& p, const Matrix& stretched, const Vector& y,
                                       double ridge, SolverForm form, double rcond) {
  const Matrix system = add_to_diagonal(stretched * p, ridge);
  const LinearSolver lu(system, rcond);
  FittedCoefficients out;
  out.alpha = lu.solve(Vector(stretched * y));
  out.form = form;
  out.condition_report = condition_number(system);
  require_finite(out.alpha, "primal solve");
  return out;
}

}  // namespace detail

/// (P^T)^{o 1/(k-1)}. Negative or zero design entries are rejected for every k != 2,
/// including those where 1/(k-1) happens to be an integer.
inline Matrix stretch_matrix(const Matrix& p, double k) {
  detail::check_k(k);
  const double r = 1.0 / (k - 1.0);
  if (std::abs(r - 1.0) <= kIntegerExponentTol) {
    return p.transpose();
  }
  for (Index j = 0; j < p.cols(); ++j) {
    for (Index i = 0; i < p.rows(); ++i) {
      if (!(p(i, j) > 0.0)) {
        throw NegativeBase(static_cast<std::size_t>(i), static_cast<std::size_t>(j), p(i, j));
      }
    }
  }
  return elementwise_power(Matrix(p.transpose()), r);
}

inline FittedCoefficients solve_dual_exact(const Matrix& p, const Vector& y, double k,
                                           double rcond = kDefaultRcond) {
  detail::check_system(p, y);
  const Matrix s = stretch_matrix(p, k);
  return detail::dual_solve(p, s, y, 0.0, SolverForm::dual_exact, rcond);
}

inline FittedCoefficients solve_dual_regularized(const Matrix& p, const Vector& y, double k,
                                                 double c, double rcond = kDefaultRcond) {
  detail::check_system(p, y);
  detail::check_c(c);
  const Matrix s = stretch_matrix(p, k);
  return detail::dual_solve(p, s, y, 1.0 / (c * k), SolverForm::dual_regularized, rcond);
}

inline FittedCoefficients solve_primal_regularized(const Matrix& p, const Vector& y, double k,
                                                   double c, double rcond = kDefaultRcond) {
  detail::check_system(p, y);
  detail::check_c(c);
  const Matrix s = stretch_matrix(p, k);
  return detail::primal_solve(p, s, y, 1.0 / (c * k), SolverForm::primal_regularized, rcond);
}

inline FittedCoefficients solve_primal_exact(const Matrix& p, const Vector& y, double k,
                                             double rcond = kDefaultRcond) {
  detail::check_system(p, y);
  const Matrix s = stretch_matrix(p, k);
  return detail::primal_solve(p, s, y, 0.0, SolverForm::primal_exact, rcond);
}

/// Dual form for under-determined systems (M < D), primal form otherwise.
inline FittedCoefficients solve_stretchy(const Matrix& p, const Vector& y,
                                         const StretchConfig& config) {
  config.validate();
  const bool under = p.rows() < p.cols();
  if (config.exact()) {
    return under ? solve_dual_exact(p, y, config.k, config.rcond_threshold)
                 : solve_primal_exact(p, y, config.k, config.rcond_threshold);
  }
  return under ? solve_dual_regularized(p, y, config.k, config.c(), config.rcond_threshold)
               : solve_primal_regularized(p, y, config.k, config.c(), config.rcond_threshold);
}

/// (P^T P + lambda I)^-1 P^T y.
inline FittedCoefficients ridge(const Matrix& p, const Vector& y, double lambda,
                                double rcond = kDefaultRcond) {
  detail::check_system(p, y);
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw InvalidParameter("lambda", "must be finite and non-negative");
  }
  const Matrix system = detail::add_to_diagonal(p.transpose() * p, lambda);
  FittedCoefficients out;
  out.alpha = LinearSolver(system, rcond).solve(Vector(p.transpose() * y));
  out.form = SolverForm::ridge;
  out.condition_report = condition_number(system);
  return out;
}

/// P^T (P P^T)^-1 y, the interpolant of smallest Euclidean norm.
inline FittedCoefficients least_norm(const Matrix& p, const Vector& y,
                                     double rcond = kDefaultRcond) {
  detail::check_system(p, y);
  const Matrix pt = p.transpose();
  return detail::dual_solve(p, pt, y, 0.0, SolverForm::least_norm, rcond);
}

/// Scaling vector s with A (A^T b)^{o k} = (A (A^T)^{o k} b^{o k}) o s, elementwise:
/// s_l = sum_j a_lj (sum_i a_ij b_i)^k / sum_j a_lj sum_i a_ij^k b_i^k.
inline Vector scaling_vector(const Matrix& a, const Vector& b, double k) {
  if (a.rows() != b.size()) {
    throw DimensionMismatch("scaling_vector: A has " + std::to_string(a.rows()) +
                            " rows, b has " + std::to_string(b.size()));
  }
  if (!(k > 0.0) || !std::isfinite(k)) {
    throw InvalidParameter("k", "must be positive and finite");
  }
  // Both inner sums run in the same order, so at k = 1 they agree to the last bit.
  Vector inner(a.cols());
  Vector inner_pow(a.cols());
  for (Index j = 0; j < a.cols(); ++j) {
    double t = 0.0;
    double u = 0.0;
    for (Index i = 0; i < a.rows(); ++i) {
      t += a(i, j) * b(i);
      u += std::pow(a(i, j), k) * std::pow(b(i), k);
    }
    inner(j) = std::pow(t, k);
    inner_pow(j) = u;
  }
  Vector numerator = Vector::Zero(a.rows());
  Vector denominator = Vector::Zero(a.rows());
  for (Index l = 0; l < a.rows(); ++l) {
    for (Index j = 0; j < a.cols(); ++j) {
      numerator(l) += a(l, j) * inner(j);
      denominator(l) += a(l, j) * inner_pow(j);
    }
  }
  Vector s(a.rows());
  for (Index l = 0; l < a.rows(); ++l) {
    if (!(std::abs(denominator(l)) > 1e-300)) {
      throw ZeroDenominator(static_cast<std::size_t>(l));
    }
    s(l) = numerator(l) / denominator(l);
  }
  require_finite(s, "scaling_vector");
  return s;
}

inline double residual_norm(const Matrix& p, const Vector& alpha, const Vector& y) {
  return (p * alpha - y).norm();
}

}  // namespace stretchy
