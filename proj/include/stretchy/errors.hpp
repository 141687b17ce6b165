#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace stretchy {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A non-positive entry met a fractional exponent.
class NegativeBase : public Error {
 public:
  NegativeBase(std::size_t row, std::size_t col, double value)
      : Error("non-positive entry " + std::to_string(value) + " at (" + std::to_string(row) + ", " +
              std::to_string(col) +
              ") cannot be raised to a fractional power; map the inputs into the first "
              "quadrant (--quadrant-map)"),
        row_(row),
        col_(col),
        value_(value) {}

  std::size_t row() const noexcept { return row_; }
  std::size_t col() const noexcept { return col_; }
  double value() const noexcept { return value_; }

 private:
  std::size_t row_;
  std::size_t col_;
  double value_;
};

/// The factorization found the system rank deficient.
class SingularMatrix : public Error {
 public:
  explicit SingularMatrix(double condition_estimate)
      : Error("matrix is singular to working precision (condition estimate " +
              std::to_string(condition_estimate) + ")"),
        condition_estimate_(condition_estimate) {}

  double condition_estimate() const noexcept { return condition_estimate_; }

 private:
  double condition_estimate_;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// An argument violated its documented domain (epsilon <= 0, p <= 0, a = 0, ...).
class InvalidParameter : public Error {
 public:
  InvalidParameter(const std::string& name, const std::string& detail)
      : Error("invalid " + name + ": " + detail), name_(name) {}

  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

class NonFiniteResult : public Error {
 public:
  using Error::Error;
};

class ZeroVariance : public Error {
 public:
  explicit ZeroVariance(std::size_t col)
      : Error("column " + std::to_string(col) + " has zero variance"), col_(col) {}

  std::size_t col() const noexcept { return col_; }

 private:
  std::size_t col_;
};

class ZeroDenominator : public Error {
 public:
  explicit ZeroDenominator(std::size_t row)
      : Error("scaling vector denominator vanishes at row " + std::to_string(row)), row_(row) {}

  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

class AsymmetricNoise : public Error {
 public:
  using Error::Error;
};

class SingleClassTarget : public Error {
 public:
  SingleClassTarget() : Error("balanced error rate needs both classes in the targets") {}
};

class InsufficientSamples : public Error {
 public:
  using Error::Error;
};

class DegenerateTable : public Error {
 public:
  using Error::Error;
};

class UnsupportedK : public Error {
 public:
  explicit UnsupportedK(std::size_t k)
      : Error("Nemenyi critical values are tabulated for 2..10 algorithms, got " +
              std::to_string(k)) {}
};

class IoError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::size_t col, const std::string& detail)
      : Error("parse error at line " + std::to_string(line) + ", column " + std::to_string(col) +
              ": " + detail),
        line_(line),
        col_(col) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t col() const noexcept { return col_; }

 private:
  std::size_t line_;
  std::size_t col_;
};

class NonNumericCell : public ParseError {
 public:
  NonNumericCell(std::size_t line, std::size_t col, const std::string& cell)
      : ParseError(line, col, "non-numeric cell '" + cell + "'") {}
};

class MissingTarget : public Error {
 public:
  explicit MissingTarget(const std::string& target)
      : Error("target column '" + target + "' not found") {}
};

class SchemaVersionMismatch : public Error {
 public:
  SchemaVersionMismatch(int found, int expected)
      : Error("model schema_version " + std::to_string(found) + " is not supported (expected " +
              std::to_string(expected) + ")") {}
};

}  // namespace stretchy
