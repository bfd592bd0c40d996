#include "gadi/precision.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

namespace gadi {

const char* name(Precision p) {
  switch (p) {
    case Precision::Half: return "half";
    case Precision::Single: return "single";
    default: return "double";
  }
}

Precision precision_from_name(const std::string& s) {
  if (s == "half" || s == "fp16" || s == "h") return Precision::Half;
  if (s == "single" || s == "fp32" || s == "float" || s == "s") return Precision::Single;
  if (s == "double" || s == "fp64" || s == "d") return Precision::Double;
  throw std::invalid_argument("unknown precision name: " + s);
}

const FloatFormat& format(Precision p) {
  static const FloatFormat kHalf{Precision::Half, 0x1p-11, 65504.0, 0x1p-14, 10, 5};
  static const FloatFormat kSingle{Precision::Single, 0x1p-24, 0x1.fffffep+127, 0x1p-126, 23, 8};
  static const FloatFormat kDouble{Precision::Double, 0x1p-53, 0x1.fffffffffffffp+1023,
                                   0x1p-1022, 52, 11};
  switch (p) {
    case Precision::Half: return kHalf;
    case Precision::Single: return kSingle;
    default: return kDouble;
  }
}

namespace detail {

double round_to_half_slowpath(double x, std::uint64_t mag, std::uint64_t sign) noexcept {
  if (mag >= 0x7ff0000000000000ull) return x;  // inf / nan pass through
  // Overflow threshold: the midpoint between 65504 (half max) and 65536.
  if (std::bit_cast<double>(mag) >= 65520.0)
    return std::bit_cast<double>(sign | 0x7ff0000000000000ull);

  // Subnormal-half territory (the fast path handled normals): quantum 2^-24.
  const int e = static_cast<int>(mag >> 52) - 1023;  // unbiased exponent
  if (e <= -26) return std::bit_cast<double>(sign);  // |x| < 2^-25: rounds to zero
  if (e == -25) {
    // |x| in [2^-25, 2^-24): 2^-25 exactly is a tie broken to zero (even).
    if (mag == 0x3e60000000000000ull) return std::bit_cast<double>(sign);
    return std::bit_cast<double>(sign | 0x3e70000000000000ull);  // 2^-24
  }
  // e in [-24, -15]: clear (42 + (-14 - e)) low bits, i.e. round the value to
  // a multiple of 2^-24.
  const int clear = 42 + (-14 - e);
  const std::uint64_t lsb = (mag >> clear) & 1u;
  mag += ((1ull << (clear - 1)) - 1ull) + lsb;
  mag &= ~((1ull << clear) - 1ull);
  return std::bit_cast<double>(sign | mag);
}

}  // namespace detail

double round_to(double x, Precision p, RoundingStats& stats) noexcept {
  stats.add_ops(p, 1);
  const double r = round_to(x, p);
  if (std::isfinite(x)) {
    if (std::isinf(r)) {
      ++stats.overflow_count;
    } else if (x != 0.0 && r == 0.0) {
      ++stats.underflow_to_zero_count;
    } else if (r != 0.0 && std::fabs(r) < format(p).min_normal) {
      ++stats.subnormal_count;
    }
  }
  return r;
}

namespace {

inline double raw_op(BinOp op, double a, double b) noexcept {
  switch (op) {
    case BinOp::Add: return a + b;
    case BinOp::Sub: return a - b;
    case BinOp::Mul: return a * b;
    default: return a / b;
  }
}

}  // namespace

double rounded_binop(BinOp op, double a, double b, Precision p) noexcept {
  return round_to(raw_op(op, a, b), p);
}

double rounded_binop(BinOp op, double a, double b, Precision p, RoundingStats& stats) noexcept {
  return round_to(raw_op(op, a, b), p, stats);
}

}  // namespace gadi
