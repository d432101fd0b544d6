#pragma once

#include <cstddef>
#include <optional>
#include <string_view>

namespace rpbf {

enum class Precision {
  half,     // float16 inputs, float32 accumulation and output
  one_bit,  // sign-bit inputs, int32 accumulation and output
};

/// Bitwise operation used by the 1-bit engine. Both produce identical results.
enum class BitOp { xor_, and_ };

std::string_view to_string(Precision p) noexcept;  // "f16" / "b1"
std::string_view to_string(BitOp op) noexcept;     // "xor" / "and"
std::optional<Precision> parse_precision(std::string_view s) noexcept;
std::optional<BitOp> parse_bit_op(std::string_view s) noexcept;

/// Shape of a batched complex GEMM: batch independent products of an M x K
/// and a K x N matrix. k_pad is the number of zero bits appended to K by
/// word packing (one_bit only).
struct GemmProblem {
  std::size_t batch = 1;
  std::size_t m = 1;
  std::size_t n = 1;
  std::size_t k = 1;
  Precision precision = Precision::half;
  BitOp bit_op = BitOp::xor_;
  std::size_t k_pad = 0;

  /// Throws std::invalid_argument on zero dimensions or inconsistent k_pad.
  void validate() const;

  friend bool operator==(const GemmProblem&, const GemmProblem&) = default;
};

/// Padding that 32-bit word packing adds to a reduction length.
constexpr std::size_t packing_pad(std::size_t k) noexcept { return (32 - k % 32) % 32; }

}  // namespace rpbf
