#pragma once

// Dense linear algebra primitives shared by every other header.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "stretchy/errors.hpp"

namespace stretchy {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr double kIntegerExponentTol = 1e-12;
inline constexpr double kDefaultRcond = 1e-12;
inline constexpr double kSingularValueFloor = 1e-300;

/// Returns true when `r` is within kIntegerExponentTol of a non-negative integer.
inline bool is_nonnegative_integer_exponent(double r) {
  const double nearest = std::round(r);
  return nearest >= 0.0 && std::abs(r - nearest) <= kIntegerExponentTol;
}

template <typename Derived>
bool all_finite(const Eigen::DenseBase<Derived>& m) {
  return m.allFinite();
}

template <typename Derived>
void require_finite(const Eigen::DenseBase<Derived>& m, const char* what) {
  if (!m.allFinite()) {
    throw NonFiniteResult(std::string(what) + " produced a non-finite value");
  }
}

/// Elementwise (Hadamard) power. Fractional exponents require strictly positive
/// entries; integer exponents accept any sign.
inline Matrix elementwise_power(const Matrix& m, double r) {
  if (r == 1.0) {
    return m;
  }
  const bool integral = is_nonnegative_integer_exponent(r);
  Matrix out(m.rows(), m.cols());
  if (integral) {
    const double n = std::round(r);
    for (Index j = 0; j < m.cols(); ++j) {
      for (Index i = 0; i < m.rows(); ++i) {
        out(i, j) = std::pow(m(i, j), n);
      }
    }
  } else {
    for (Index j = 0; j < m.cols(); ++j) {
      for (Index i = 0; i < m.rows(); ++i) {
        const double v = m(i, j);
        if (!(v > 0.0)) {
          throw NegativeBase(static_cast<std::size_t>(i), static_cast<std::size_t>(j), v);
        }
        out(i, j) = std::pow(v, r);
      }
    }
  }
  require_finite(out, "elementwise_power");
  return out;
}

inline Vector elementwise_power(const Vector& v, double r) {
  const Matrix m = v;
  return elementwise_power(m, r);
}

namespace detail {

// Power of two closest below 1/max_abs, so scaling is exact in binary floating point.
inline double pow2_reciprocal(double max_abs) {
  int e = 0;
  std::frexp(max_abs, &e);
  return std::ldexp(1.0, -e);
}

}  // namespace detail

/// LU factorization with power-of-two row/column equilibration, partial pivoting
/// and iterative refinement. Factorize once, solve for any number of right-hand sides.
///
/// Rank deficiency is declared when the smallest |pivot| of the equilibrated factor
/// falls below `rcond` times the largest.
class LinearSolver {
 public:
  explicit LinearSolver(Matrix a, double rcond = kDefaultRcond) : a_(std::move(a)) {
    if (a_.rows() != a_.cols() || a_.rows() == 0) {
      throw DimensionMismatch("solve_linear needs a non-empty square matrix");
    }
    if (!a_.allFinite()) {
      throw NonFiniteResult("solve_linear received a non-finite matrix");
    }
    const Index n = a_.rows();
    row_scale_.resize(n);
    col_scale_.resize(n);
    const double inf = std::numeric_limits<double>::infinity();
    for (Index i = 0; i < n; ++i) {
      const double mx = a_.row(i).cwiseAbs().maxCoeff();
      if (mx == 0.0) {
        throw SingularMatrix(inf);
      }
      row_scale_(i) = detail::pow2_reciprocal(mx);
    }
    Matrix scaled = row_scale_.asDiagonal() * a_;
    for (Index j = 0; j < n; ++j) {
      const double mx = scaled.col(j).cwiseAbs().maxCoeff();
      if (mx == 0.0) {
        throw SingularMatrix(inf);
      }
      col_scale_(j) = detail::pow2_reciprocal(mx);
    }
    scaled = scaled * col_scale_.asDiagonal();
    lu_.compute(scaled);
    const Vector pivots = lu_.matrixLU().diagonal().cwiseAbs();
    const double pmax = pivots.maxCoeff();
    const double pmin = pivots.minCoeff();
    pivot_ratio_ = pmax > 0.0 ? pmin / pmax : 0.0;
    if (!(pivot_ratio_ >= rcond)) {
      throw SingularMatrix(pmin > 0.0 ? pmax / pmin : inf);
    }
  }

  Index size() const { return a_.rows(); }
  double pivot_ratio() const { return pivot_ratio_; }

  Matrix solve(const Matrix& b) const {
    if (b.rows() != a_.rows()) {
      throw DimensionMismatch("right-hand side has " + std::to_string(b.rows()) +
                              " rows, system has " + std::to_string(a_.rows()));
    }
    Matrix x = raw_solve(b);
    Matrix residual = b - a_ * x;
    double norm = residual.norm();
    for (int step = 0; step < kRefinementSteps && norm > 0.0; ++step) {
      const Matrix candidate = x + raw_solve(residual);
      const Matrix next_residual = b - a_ * candidate;
      const double next_norm = next_residual.norm();
      if (!(next_norm < norm)) {
        break;
      }
      x = candidate;
      residual = next_residual;
      norm = next_norm;
    }
    require_finite(x, "solve_linear");
    return x;
  }

  Vector solve(const Vector& b) const {
    const Matrix rhs = b;
    return solve(rhs).col(0);
  }

 private:
  static constexpr int kRefinementSteps = 3;

  Matrix raw_solve(const Matrix& b) const {
    return col_scale_.asDiagonal() * lu_.solve(row_scale_.asDiagonal() * b);
  }

  Matrix a_;
  Vector row_scale_;
  Vector col_scale_;
  Eigen::PartialPivLU<Matrix> lu_;
  double pivot_ratio_ = 0.0;
};

inline Vector solve_linear(const Matrix& a, const Vector& b, double rcond = kDefaultRcond) {
  if (b.size() != a.rows()) {
    throw DimensionMismatch("solve_linear: right-hand side length does not match the matrix");
  }
  return LinearSolver(a, rcond).solve(b);
}

inline Matrix solve_linear(const Matrix& a, const Matrix& b, double rcond = kDefaultRcond) {
  return LinearSolver(a, rcond).solve(b);
}

/// 2-norm condition number sigma_max / sigma_min; +inf once sigma_min drops below 1e-300.
inline double condition_number(const Matrix& m) {
  if (m.size() == 0) {
    throw DimensionMismatch("condition_number of an empty matrix");
  }
  const Eigen::JacobiSVD<Matrix> svd(m);
  const Vector& s = svd.singularValues();
  const double smax = s(0);
  const double smin = s(s.size() - 1);
  if (smin < kSingularValueFloor) {
    return std::numeric_limits<double>::infinity();
  }
  return smax / smin;
}

/// Deterministic random stream. The engine is std::mt19937_64, whose output sequence is
/// fixed by the C++ standard; every derived quantity (uniforms, normals, indices) is
/// computed here rather than through the implementation-defined <random> distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via the Box-Muller transform; values are produced in pairs.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * 3.14159265358979323846 * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  double normal(double mean, double sigma) { return mean + sigma * normal(); }

  /// Unbiased integer in [0, n) by rejection.
  std::uint64_t below(std::uint64_t n) {
    if (n == 0) {
      throw InvalidParameter("n", "Rng::below needs n > 0");
    }
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t draw = 0;
    do {
      draw = engine_();
    } while (draw >= limit);
    return draw % n;
  }

  /// Fisher-Yates shuffle driven by below().
  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

  /// Independent child seed for stream `index` (splitmix64 finalizer).
  static std::uint64_t derive(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

inline Matrix random_uniform_matrix(Index rows, Index cols, double lo, double hi, Rng& rng) {
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) {
      m(i, j) = rng.uniform(lo, hi);
    }
  }
  return m;
}

inline Vector random_normal_vector(Index n, Rng& rng, double sigma = 1.0) {
  Vector v(n);
  for (Index i = 0; i < n; ++i) {
    v(i) = rng.normal(0.0, sigma);
  }
  return v;
}

}  // namespace stretchy
