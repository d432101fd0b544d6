#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rpbf {

/// Operand shapes or layouts that do not fit together.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A NaN or infinity in an input plane. Carries the first offending position.
class NonFiniteError : public std::domain_error {
 public:
  NonFiniteError(char plane, std::size_t row, std::size_t col)
      : std::domain_error(std::string("non-finite value in ") +
                          (plane == 'r' ? "real" : "imaginary") + " plane at (" +
                          std::to_string(row) + ", " + std::to_string(col) + ")"),
        plane_(plane),
        row_(row),
        col_(col) {}

  char plane() const noexcept { return plane_; }
  std::size_t row() const noexcept { return row_; }
  std::size_t col() const noexcept { return col_; }

 private:
  char plane_;
  std::size_t row_;
  std::size_t col_;
};

/// Malformed binary matrix or tuned-config file.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A file could not be opened, read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rpbf
