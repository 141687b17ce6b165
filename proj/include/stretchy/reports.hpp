#pragma once

// CSV emitters for plot-ready diagnostics.

#include <string>
#include <vector>

#include "stretchy/data_io.hpp"
#include "stretchy/numeric.hpp"
#include "stretchy/variance.hpp"

namespace stretchy {

/// Seed of the positive matrix used by the conditioning diagnostic.
inline constexpr std::uint64_t kDiagnosticSeed = 20190901;

/// Entries uniform on [0.1, 1): strictly positive, so every stretch exponent is valid.
inline Matrix random_positive_matrix(Index rows, Index cols, std::uint64_t seed) {
  Rng rng(seed);
  return random_uniform_matrix(rows, cols, 0.1, 1.0, rng);
}

inline std::string condition_sweep_csv(const std::vector<ConditionPoint>& sweep) {
  std::string out = "k,cond\n";
  for (const auto& pt : sweep) {
    out += format_double(pt.k) + "," + format_double(pt.condition) + "\n";
  }
  return out;
}

inline std::string vector_csv(const Vector& v, const std::string& value_name) {
  std::string out = "index," + value_name + "\n";
  for (Index i = 0; i < v.size(); ++i) {
    out += std::to_string(i) + "," + format_double(v(i)) + "\n";
  }
  return out;
}

/// Long format: one row per entry.
inline std::string matrix_csv(const Matrix& m) {
  std::string out = "row,col,value\n";
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      out += std::to_string(i) + "," + std::to_string(j) + "," + format_double(m(i, j)) + "\n";
    }
  }
  return out;
}

}  // namespace stretchy
