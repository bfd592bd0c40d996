#pragma once

// Hardware-accelerated binary16 rounding for values that are exact float
// results of arithmetic on binary16 operands. For such values the
// float->half conversion is the correctly rounded binary16 result even
// though two roundings happen (intermediate precision 24 >= 2*11 + 2 digits,
// the double-rounding-innocuous threshold for p-digit operand arithmetic).
// Arbitrary binary64 values must keep using detail::round_to_half.

#include "gadi/precision.hpp"

#if defined(__F16C__)
#include <immintrin.h>
#define GADI_HAVE_F16C 1
#endif

namespace gadi::detail {

#ifdef GADI_HAVE_F16C

inline float round16_result(float v) noexcept {
  return _cvtsh_ss(_cvtss_sh(v, _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC));
}

#ifdef __AVX2__
// x[t] = round16(x[t] - round16(l[t] * s)) over a contiguous span, 8 lanes at
// a time; x and l carry binary16 values in binary32 slots.
inline void half_span_update(float* x, const float* l, float s, long long len) noexcept {
  const __m256 vs = _mm256_set1_ps(s);
  long long t = 0;
  for (; t + 8 <= len; t += 8) {
    __m256 vl = _mm256_loadu_ps(l + t);
    __m256 prod = _mm256_mul_ps(vl, vs);
    prod = _mm256_cvtph_ps(_mm256_cvtps_ph(prod, _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC));
    __m256 vx = _mm256_loadu_ps(x + t);
    vx = _mm256_sub_ps(vx, prod);
    vx = _mm256_cvtph_ps(_mm256_cvtps_ph(vx, _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC));
    _mm256_storeu_ps(x + t, vx);
  }
  for (; t < len; ++t) x[t] = round16_result(x[t] - round16_result(l[t] * s));
}
#else
inline void half_span_update(float* x, const float* l, float s, long long len) noexcept {
  for (long long t = 0; t < len; ++t) x[t] = round16_result(x[t] - round16_result(l[t] * s));
}
#endif

#else  // no F16C: software rounding through binary64

inline float round16_result(float v) noexcept {
  return static_cast<float>(round_to_half(static_cast<double>(v)));
}

inline void half_span_update(float* x, const float* l, float s, long long len) noexcept {
  for (long long t = 0; t < len; ++t) {
    const double prod = round_to_half(static_cast<double>(l[t]) * static_cast<double>(s));
    x[t] = static_cast<float>(round_to_half(static_cast<double>(x[t]) - prod));
  }
}

#endif

}  // namespace gadi::detail
