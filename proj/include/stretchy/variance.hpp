#pragma once

// Expectation, bias and covariance of the stretchy estimator under y = P alpha + e, and
// the conditioning of P (P^T)^{o 1/(k-1)} across stretch exponents.

#include <cmath>
#include <string>
#include <variant>
#include <vector>

#include "stretchy/errors.hpp"
#include "stretchy/numeric.hpp"
#include "stretchy/solver.hpp"

namespace stretchy {

enum class Regime { under, over };

inline Regime regime_for(const Matrix& p) { return p.rows() < p.cols() ? Regime::under : Regime::over; }

inline const char* to_string(Regime r) { return r == Regime::under ? "under" : "over"; }

struct Isotropic {
  double sigma2 = 0.0;
};

/// Either a full M x M noise covariance or sigma^2 I.
using NoiseModel = std::variant<Matrix, Isotropic>;

namespace detail {

inline double ridge_of(double k, const Regularization& reg) {
  return std::holds_alternative<Exact>(reg) ? 0.0 : 1.0 / (std::get<Regularized>(reg).c * k);
}

inline void check_reg(const Regularization& reg) {
  if (const auto* r = std::get_if<Regularized>(&reg)) {
    check_c(r->c);
  }
}

}  // namespace detail

/// Linear map H with alpha_hat = H y.
///   under: H = S [P S + I/(c k)]^-1
///   over:  H = [S P + I/(c k)]^-1 S
inline Matrix hat_matrix(const Matrix& p, double k, const Regularization& reg, Regime regime,
                         double rcond = kDefaultRcond) {
  detail::check_reg(reg);
  const Matrix s = stretch_matrix(p, k);
  const double ridge = detail::ridge_of(k, reg);
  if (regime == Regime::under) {
    const Matrix system = detail::add_to_diagonal(p * s, ridge);
    // H^T = system^-T S^T
    const Matrix ht = solve_linear(Matrix(system.transpose()), Matrix(s.transpose()), rcond);
    return ht.transpose();
  }
  const Matrix system = detail::add_to_diagonal(s * p, ridge);
  return solve_linear(system, s, rcond);
}

/// E[alpha_hat] = H P alpha_true.
inline Vector expected_estimate(const Matrix& p, const Vector& alpha_true, double k,
                                const Regularization& reg, Regime regime) {
  if (alpha_true.size() != p.cols()) {
    throw DimensionMismatch("alpha_true length must equal the design column count");
  }
  return hat_matrix(p, k, reg, regime) * (p * alpha_true);
}

inline Vector bias_report(const Matrix& p, const Vector& alpha_true, double k,
                          const Regularization& reg, Regime regime) {
  return expected_estimate(p, alpha_true, k, reg, regime) - alpha_true;
}

inline void check_noise(const Matrix& c, Index m) {
  if (c.rows() != m || c.cols() != m) {
    throw DimensionMismatch("noise covariance must be " + std::to_string(m) + " x " +
                            std::to_string(m));
  }
  const double scale = std::max(1.0, c.cwiseAbs().maxCoeff());
  if ((c - c.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw AsymmetricNoise("noise covariance is not symmetric");
  }
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(c, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < -1e-10 * std::max(scale, c.trace())) {
    throw InvalidParameter("noise", "covariance has a negative eigenvalue");
  }
}

/// Cov[alpha_hat] = H C H^T. For isotropic noise in the over-determined regime the
/// product is evaluated as sigma^2 [B^-1 S S^T] B^-T with B = S P + I/(c k).
inline Matrix estimator_covariance(const Matrix& p, double k, const Regularization& reg,
                                   const NoiseModel& noise, Regime regime,
                                   double rcond = kDefaultRcond) {
  Matrix cov;
  if (const auto* iso = std::get_if<Isotropic>(&noise)) {
    if (!(iso->sigma2 >= 0.0)) {
      throw InvalidParameter("sigma2", "noise variance must be non-negative");
    }
    if (regime == Regime::over) {
      detail::check_reg(reg);
      const Matrix s = stretch_matrix(p, k);
      const Matrix system = detail::add_to_diagonal(s * p, detail::ridge_of(k, reg));
      const LinearSolver lu(system, rcond);
      const Matrix left = lu.solve(Matrix(s * s.transpose()));
      // left * system^-T = (system^-1 left^T)^T
      cov = iso->sigma2 * lu.solve(Matrix(left.transpose())).transpose();
    } else {
      const Matrix h = hat_matrix(p, k, reg, regime, rcond);
      cov = iso->sigma2 * (h * h.transpose());
    }
  } else {
    const Matrix& c = std::get<Matrix>(noise);
    check_noise(c, p.rows());
    const Matrix h = hat_matrix(p, k, reg, regime, rcond);
    cov = h * c * h.transpose();
  }
  return 0.5 * (cov + cov.transpose());
}

struct ConditionPoint {
  double k = 0.0;
  double condition = 0.0;
};

/// cond(P (P^T)^{o 1/(k-1)}) for every k on the grid.
inline std::vector<ConditionPoint> condition_sweep(const Matrix& p, const Vector& k_grid) {
  std::vector<ConditionPoint> out;
  out.reserve(static_cast<std::size_t>(k_grid.size()));
  for (Index i = 0; i < k_grid.size(); ++i) {
    const double k = k_grid(i);
    out.push_back({k, condition_number(p * stretch_matrix(p, k))});
  }
  return out;
}

}  // namespace stretchy
