#include "rpbf/tile_config.hpp"

#include <bit>
#include <sstream>
#include <stdexcept>

namespace rpbf {

std::string_view to_string(Precision p) noexcept { return p == Precision::half ? "f16" : "b1"; }

std::string_view to_string(BitOp op) noexcept { return op == BitOp::xor_ ? "xor" : "and"; }

std::optional<Precision> parse_precision(std::string_view s) noexcept {
  if (s == "f16" || s == "half" || s == "float16") return Precision::half;
  if (s == "b1" || s == "one_bit" || s == "int1") return Precision::one_bit;
  return std::nullopt;
}

std::optional<BitOp> parse_bit_op(std::string_view s) noexcept {
  if (s == "xor") return BitOp::xor_;
  if (s == "and") return BitOp::and_;
  return std::nullopt;
}

void GemmProblem::validate() const {
  if (batch == 0 || m == 0 || n == 0 || k == 0) {
    throw std::invalid_argument("GemmProblem: batch, M, N and K must all be >= 1");
  }
  if (precision == Precision::half && k_pad != 0) {
    throw std::invalid_argument("GemmProblem: k_pad only applies to one_bit problems");
  }
  if (precision == Precision::one_bit && (k + k_pad) % 32 != 0) {
    throw std::invalid_argument("GemmProblem: K + k_pad must be a multiple of 32");
  }
}

std::string TileConfig::check(Precision precision) const {
  const auto pow2 = [](std::size_t v) { return v != 0 && std::has_single_bit(v); };
  if (!pow2(m_outer) || !pow2(m_inner) || !pow2(n_outer) || !pow2(n_inner) || !pow2(k_block) || !pow2(buffers)) {
    return "all tile parameters must be powers of two";
  }
  if (m_outer % m_inner != 0) return "m_inner must divide m_outer";
  if (n_outer % n_inner != 0) return "n_inner must divide n_outer";
  if (precision == Precision::half) {
    if (m_inner % kHalfMicroRows != 0) return "m_inner must be a multiple of " + std::to_string(kHalfMicroRows);
    if (n_inner % kHalfMicroCols != 0) return "n_inner must be a multiple of " + std::to_string(kHalfMicroCols);
  } else {
    if (m_inner % kBitMicroRows != 0) return "m_inner must be a multiple of " + std::to_string(kBitMicroRows);
    if (n_inner % kBitMicroCols != 0) return "n_inner must be a multiple of " + std::to_string(kBitMicroCols);
    if (k_block % kBitKGranule != 0) return "k_block must be a multiple of " + std::to_string(kBitKGranule) + " bits";
  }
  return {};
}

void TileConfig::validate(Precision precision) const {
  if (auto msg = check(precision); !msg.empty()) throw std::invalid_argument("TileConfig: " + msg);
}

std::string TileConfig::to_string() const {
  std::ostringstream os;
  os << m_outer << '/' << m_inner << 'x' << n_outer << '/' << n_inner << 'x' << k_block << " b" << buffers;
  return os.str();
}

TileConfig default_tile_config(Precision precision) noexcept {
  if (precision == Precision::half) return TileConfig{64, 32, 64, 32, 256, 1};
  return TileConfig{32, 16, 32, 16, 1024, 1};
}

}  // namespace rpbf
