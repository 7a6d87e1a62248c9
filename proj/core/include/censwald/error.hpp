#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace censwald {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated (bad parameter, bad level, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Malformed input data. Carries the 1-based row and the column name when known.
class DataError : public Error {
 public:
  DataError(const std::string& what, std::size_t row, std::string column)
      : Error(format(what, row, column)), row_(row), column_(std::move(column)) {}
  explicit DataError(const std::string& what) : Error(what) {}

  std::size_t row() const noexcept { return row_; }
  const std::string& column() const noexcept { return column_; }

 private:
  static std::string format(const std::string& what, std::size_t row, const std::string& column) {
    std::string out = what + " (row " + std::to_string(row);
    if (!column.empty()) out += ", column '" + column + "'";
    return out + ")";
  }

  std::size_t row_ = 0;
  std::string column_;
};

/// Numerical failure: singular matrix, quadrature or root finding that did not converge.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Hypothesis text could not be parsed. `position` is the 0-based character offset.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : Error(what + " at position " + std::to_string(position)), position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

}  // namespace censwald
