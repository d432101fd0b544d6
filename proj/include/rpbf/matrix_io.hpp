#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <variant>

#include "rpbf/complex_matrix.hpp"
#include "rpbf/quantpack.hpp"

namespace rpbf {

// Binary matrix file ("BBM1"). All integers little-endian.
//
//   offset  size  field
//        0     4  magic "BBM1"
//        4     4  element type code (ElementType)
//        8     8  rows
//       16     8  cols_logical
//       24     8  cols_padded (== cols_logical for numeric types,
//                 multiple of 32 for one_bit)
//       32     4  plane count (always 2: real, imag)
//       36     4  row-major flag (always 1)
//       40    24  reserved, zero
//
// The real plane follows the header, then the imaginary plane. Numeric planes
// are rows * cols_padded elements; one_bit planes are rows * cols_padded / 32
// 32-bit words, bit order LSB-first within each word.

inline constexpr std::size_t kMatrixHeaderBytes = 64;

struct MatrixHeader {
  ElementType element_type = ElementType::single;
  std::uint64_t rows = 0;
  std::uint64_t cols_logical = 0;
  std::uint64_t cols_padded = 0;
  std::uint32_t planes = 2;
  std::uint32_t row_major = 1;
};

using AnyMatrix = std::variant<ComplexMatrix<Half>, ComplexMatrix<float>, ComplexMatrix<double>,
                               ComplexMatrix<std::int32_t>, PackedComplex>;

template <typename T>
void write_matrix(std::ostream& os, const ComplexMatrix<T>& m);
void write_matrix(std::ostream& os, const PackedComplex& m);
void write_matrix(std::ostream& os, const AnyMatrix& m);

MatrixHeader read_header(std::istream& is);
AnyMatrix read_matrix(std::istream& is);

void save_matrix(const std::filesystem::path& path, const AnyMatrix& m);
AnyMatrix load_matrix(const std::filesystem::path& path);

}  // namespace rpbf
