#include "rpbf/matrix_io.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "rpbf/errors.hpp"

namespace rpbf {

namespace {

constexpr std::array<char, 4> kMagic{'B', 'B', 'M', '1'};

template <typename U>
U to_little(U v) {
  static_assert(std::is_unsigned_v<U>);
  if constexpr (std::endian::native == std::endian::big) {
    U out = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) {
      out = static_cast<U>((out << 8) | ((v >> (8 * i)) & 0xffu));
    }
    return out;
  } else {
    return v;
  }
}

template <typename U>
void put(unsigned char* dst, U v) {
  v = to_little(v);
  std::memcpy(dst, &v, sizeof(U));
}

template <typename U>
U get(const unsigned char* src) {
  U v;
  std::memcpy(&v, src, sizeof(U));
  return to_little(v);
}

template <typename T>
using bits_of = std::conditional_t<sizeof(T) == 2, std::uint16_t,
                                   std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>>;

template <typename T>
void write_plane(std::ostream& os, std::span<const T> plane) {
  using U = bits_of<T>;
  std::vector<U> buffer(plane.size());
  for (std::size_t i = 0; i < plane.size(); ++i) {
    U raw;
    std::memcpy(&raw, &plane[i], sizeof(U));
    buffer[i] = to_little(raw);
  }
  os.write(reinterpret_cast<const char*>(buffer.data()), static_cast<std::streamsize>(buffer.size() * sizeof(U)));
}

template <typename T>
void read_plane(std::istream& is, std::span<T> plane) {
  using U = bits_of<T>;
  std::vector<U> buffer(plane.size());
  is.read(reinterpret_cast<char*>(buffer.data()), static_cast<std::streamsize>(buffer.size() * sizeof(U)));
  if (!is) throw FormatError("matrix file truncated");
  for (std::size_t i = 0; i < plane.size(); ++i) {
    const U raw = to_little(buffer[i]);
    std::memcpy(static_cast<void*>(&plane[i]), &raw, sizeof(U));
  }
}

void write_header(std::ostream& os, const MatrixHeader& h) {
  std::array<unsigned char, kMatrixHeaderBytes> buf{};
  std::memcpy(buf.data(), kMagic.data(), kMagic.size());
  put<std::uint32_t>(buf.data() + 4, static_cast<std::uint32_t>(h.element_type));
  put<std::uint64_t>(buf.data() + 8, h.rows);
  put<std::uint64_t>(buf.data() + 16, h.cols_logical);
  put<std::uint64_t>(buf.data() + 24, h.cols_padded);
  put<std::uint32_t>(buf.data() + 32, h.planes);
  put<std::uint32_t>(buf.data() + 36, h.row_major);
  os.write(reinterpret_cast<const char*>(buf.data()), buf.size());
}

template <typename T>
ComplexMatrix<T> read_numeric(std::istream& is, const MatrixHeader& h) {
  if (h.cols_padded != h.cols_logical) throw FormatError("numeric matrix must not be padded");
  ComplexMatrix<T> m(h.rows, h.cols_logical);
  read_plane(is, m.real());
  read_plane(is, m.imag());
  return m;
}

PackedComplex read_packed(std::istream& is, const MatrixHeader& h) {
  if (h.cols_padded != words_for_bits(h.cols_logical) * kWordBits) {
    throw FormatError("one_bit cols_padded must be cols_logical rounded up to 32");
  }
  PackedComplex m{PackedBitMatrix(h.rows, h.cols_logical), PackedBitMatrix(h.rows, h.cols_logical)};
  read_plane(is, m.real.words());
  read_plane(is, m.imag.words());
  if (!m.real.padding_clear() || !m.imag.padding_clear()) throw FormatError("one_bit padding bits must be 0");
  return m;
}

}  // namespace

template <typename T>
void write_matrix(std::ostream& os, const ComplexMatrix<T>& m) {
  write_header(os, MatrixHeader{ComplexMatrix<T>::element_type(), m.rows(), m.cols(), m.cols(), 2, 1});
  write_plane(os, m.real());
  write_plane(os, m.imag());
}

void write_matrix(std::ostream& os, const PackedComplex& m) {
  write_header(os, MatrixHeader{ElementType::one_bit, m.rows(), m.cols(), m.real.cols_padded(), 2, 1});
  write_plane(os, m.real.words());
  write_plane(os, m.imag.words());
}

void write_matrix(std::ostream& os, const AnyMatrix& m) {
  std::visit([&](const auto& x) { write_matrix(os, x); }, m);
}

MatrixHeader read_header(std::istream& is) {
  std::array<unsigned char, kMatrixHeaderBytes> buf{};
  is.read(reinterpret_cast<char*>(buf.data()), buf.size());
  if (!is) throw FormatError("matrix file shorter than its 64-byte header");
  if (std::memcmp(buf.data(), kMagic.data(), kMagic.size()) != 0) throw FormatError("bad magic, expected BBM1");

  MatrixHeader h;
  const auto code = get<std::uint32_t>(buf.data() + 4);
  if (code < 1 || code > 5) throw FormatError("unknown element type code " + std::to_string(code));
  h.element_type = static_cast<ElementType>(code);
  h.rows = get<std::uint64_t>(buf.data() + 8);
  h.cols_logical = get<std::uint64_t>(buf.data() + 16);
  h.cols_padded = get<std::uint64_t>(buf.data() + 24);
  h.planes = get<std::uint32_t>(buf.data() + 32);
  h.row_major = get<std::uint32_t>(buf.data() + 36);
  if (h.planes != 2) throw FormatError("plane count must be 2");
  if (h.row_major != 1) throw FormatError("only row-major matrices are supported");
  return h;
}

AnyMatrix read_matrix(std::istream& is) {
  const MatrixHeader h = read_header(is);
  switch (h.element_type) {
    case ElementType::half:
      return read_numeric<Half>(is, h);
    case ElementType::single:
      return read_numeric<float>(is, h);
    case ElementType::double_:
      return read_numeric<double>(is, h);
    case ElementType::int32:
      return read_numeric<std::int32_t>(is, h);
    case ElementType::one_bit:
      return read_packed(is, h);
  }
  throw FormatError("unreachable element type");
}

void save_matrix(const std::filesystem::path& path, const AnyMatrix& m) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  write_matrix(os, m);
  if (!os) throw IoError("write failed: " + path.string());
}

AnyMatrix load_matrix(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path.string());
  return read_matrix(is);
}

template void write_matrix(std::ostream&, const ComplexMatrix<Half>&);
template void write_matrix(std::ostream&, const ComplexMatrix<float>&);
template void write_matrix(std::ostream&, const ComplexMatrix<double>&);
template void write_matrix(std::ostream&, const ComplexMatrix<std::int32_t>&);

}  // namespace rpbf
