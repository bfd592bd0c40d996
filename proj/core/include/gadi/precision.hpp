#pragma once

// Software emulation of IEEE binary16/binary32/binary64 round-to-nearest-even,
// so that an arithmetic step can be executed "in precision u" deterministically
// on any host. Values are always carried as binary64; a reduced-precision value
// is simply a binary64 that happens to be representable in the target format.

#include <cstdint>
#include <map>
#include <string>

namespace gadi {

enum class Precision : std::uint8_t { Half = 0, Single = 1, Double = 2 };

const char* name(Precision p);
Precision precision_from_name(const std::string& s);  // "half" | "single" | "double"

/// Static parameters of an emulated IEEE binary format.
struct FloatFormat {
  Precision name;
  double unit_roundoff;   // u = 2^-(mantissa_bits+1)
  double max_normal;
  double min_normal;
  int mantissa_bits;      // stored fraction bits (excludes the implicit bit)
  int exponent_bits;
};

/// Format descriptors; unit roundoffs are 2^-11, 2^-24, 2^-53.
const FloatFormat& format(Precision p);

inline double unit_roundoff(Precision p) { return format(p).unit_roundoff; }

/// Per-solve instrumentation. Counters only ever grow during a solve;
/// reset() between solves.
struct RoundingStats {
  std::uint64_t overflow_count = 0;           // finite value rounded to +-inf
  std::uint64_t underflow_to_zero_count = 0;  // nonzero value rounded to +-0
  std::uint64_t subnormal_count = 0;          // result subnormal in the target format
  std::map<Precision, std::uint64_t> op_count_by_format;

  void reset() { *this = RoundingStats{}; }
  void add_ops(Precision p, std::uint64_t n) { op_count_by_format[p] += n; }
};

namespace detail {

// Round a binary64 value directly to the nearest binary16 value (ties to
// even), returned as binary64. Subnormals are honored; magnitudes >= 65520
// round to infinity. Single rounding: no intermediate format is involved.
// Inline: this sits on the inner-solve hot path.
double round_to_half_slowpath(double x, std::uint64_t mag, std::uint64_t sign) noexcept;

inline double round_to_half(double x) noexcept {
  std::uint64_t bits = __builtin_bit_cast(std::uint64_t, x);
  const std::uint64_t sign = bits & 0x8000000000000000ull;
  std::uint64_t mag = bits & 0x7fffffffffffffffull;
  // Normal binary16 range, the common case: round the 52-bit fraction to 10
  // bits with the ties-to-even add trick; an exponent carry is the correctly
  // rounded next binade.
  if (mag >= 0x3f10000000000000ull /* 2^-14 */ && __builtin_bit_cast(double, mag) < 65520.0) {
    const std::uint64_t lsb = (mag >> 42) & 1u;
    mag += 0x000001ffffffffffull + lsb;
    mag &= ~0x000003ffffffffffull;
    return __builtin_bit_cast(double, sign | mag);
  }
  return round_to_half_slowpath(x, mag, sign);
}

// Hardware binary64 -> binary32 -> binary64; the cast performs one correct
// IEEE rounding.
inline double round_to_single(double x) noexcept {
  return static_cast<double>(static_cast<float>(x));
}

}  // namespace detail

/// Nearest representable value of fmt (round-to-nearest, ties-to-even),
/// re-expressed in binary64. round_to(x, Double) == x. Non-finite inputs
/// pass through.
inline double round_to(double x, Precision p) noexcept {
  switch (p) {
    case Precision::Half: return detail::round_to_half(x);
    case Precision::Single: return detail::round_to_single(x);
    default: return x;
  }
}

/// Rounding with event instrumentation (overflow / underflow-to-zero /
/// subnormal landing); same numerical result as the plain overload.
double round_to(double x, Precision p, RoundingStats& stats) noexcept;

enum class BinOp : std::uint8_t { Add, Sub, Mul, Div };

/// Correctly rounded fmt arithmetic for add/sub/mul/div on fmt-representable
/// operands: the op is computed in binary64 and rounded once to fmt. Sums,
/// differences and products of binary16/binary32 operands are exact in
/// binary64; for quotients the extra rounding is harmless because for results
/// of arithmetic on p-digit operands an intermediate precision of at least
/// 2p + 2 digits cannot displace the final rounding, and 53 >= 2*24 + 2.
double rounded_binop(BinOp op, double a, double b, Precision p) noexcept;
double rounded_binop(BinOp op, double a, double b, Precision p, RoundingStats& stats) noexcept;

}  // namespace gadi
