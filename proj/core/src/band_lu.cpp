#include "gadi/band_lu.hpp"

#include <algorithm>
#include <cmath>

#include "gadi/errors.hpp"
#include "gadi/fp16_fast.hpp"

namespace gadi {

namespace {

struct PolDouble {
  using T = double;
  static T add(T a, T b) { return a + b; }
  static T sub(T a, T b) { return a - b; }
  static T mul(T a, T b) { return a * b; }
  static T div(T a, T b) { return a / b; }
  static T from_double(double x) { return x; }
  // x[t] -= l[t] * s over a contiguous span, one rounding per op.
  static void span_update(T* x, const T* l, T s, index_t len) {
    for (index_t t = 0; t < len; ++t) x[t] = x[t] - l[t] * s;
  }
};

// Native binary32 arithmetic is exactly one IEEE rounding per op, i.e. the
// emulated single-precision semantics.
struct PolSingle {
  using T = float;
  static T add(T a, T b) { return a + b; }
  static T sub(T a, T b) { return a - b; }
  static T mul(T a, T b) { return a * b; }
  static T div(T a, T b) { return a / b; }
  static T from_double(double x) { return static_cast<float>(x); }
  static void span_update(T* x, const T* l, T s, index_t len) {
    for (index_t t = 0; t < len; ++t) x[t] = x[t] - l[t] * s;
  }
};

// Binary16 values carried exactly in binary32 slots. Sums, differences,
// products and quotients of binary16 operands round through binary32
// identically to direct binary16 rounding, so the float-domain path (and its
// F16C acceleration) is bit-exact.
struct PolHalf {
  using T = float;
  static T add(T a, T b) { return detail::round16_result(a + b); }
  static T sub(T a, T b) { return detail::round16_result(a - b); }
  static T mul(T a, T b) { return detail::round16_result(a * b); }
  static T div(T a, T b) { return detail::round16_result(a / b); }
  // Arbitrary binary64 input: must round once, through the software path.
  static T from_double(double x) { return static_cast<T>(detail::round_to_half(x)); }
  static void span_update(T* x, const T* l, T s, index_t len) {
    detail::half_span_update(x, l, s, len);
  }
};

}  // namespace

BandLU::BandLU(const SparseMatrix& A, Precision fmt, RoundingStats* stats) : fmt_(fmt) {
  if (A.n_rows() != A.n_cols()) throw ContractViolation("BandLU: square matrix required");
  n_ = A.n_rows();
  kl_ = A.lower_bandwidth();
  ku_ = A.upper_bandwidth();
  ldab_ = 2 * kl_ + ku_ + 1;
  ipiv_.assign(n_, 0);
  switch (fmt) {
    case Precision::Double: factor<PolDouble>(A, stats); break;
    case Precision::Single: factor<PolSingle>(A, stats); break;
    case Precision::Half: factor<PolHalf>(A, stats); break;
  }
}

template <class Policy>
void BandLU::factor(const SparseMatrix& A, RoundingStats* stats) {
  using T = typename Policy::T;
  std::vector<T>& ab = [&]() -> std::vector<T>& {
    if constexpr (std::is_same_v<T, double>) return ab_d_;
    else return ab_f_;
  }();
  ab.assign(static_cast<size_t>(ldab_) * n_, T(0));

  // band index of A(i,j) inside column j
  auto at = [&](index_t i, index_t j) -> T& { return ab[j * ldab_ + (kl_ + ku_ + i - j)]; };

  std::uint64_t round_ops = 0;
  for (index_t i = 0; i < n_; ++i)
    for (index_t k = A.row_ptr()[i]; k < A.row_ptr()[i + 1]; ++k) {
      at(i, A.col_idx()[k]) = Policy::from_double(A.values()[k]);
      ++round_ops;
    }

  const double tiny = format(fmt_).min_normal;
  const index_t band_cols = kl_ + ku_;  // widest trailing update window

  for (index_t j = 0; j < n_; ++j) {
    // pivot search in column j, rows j..j+kl
    const index_t ilast = std::min(n_ - 1, j + kl_);
    index_t p = j;
    double pmax = std::fabs(static_cast<double>(at(j, j)));
    for (index_t i = j + 1; i <= ilast; ++i) {
      const double v = std::fabs(static_cast<double>(at(i, j)));
      if (v > pmax) {
        pmax = v;
        p = i;
      }
    }
    if (pmax < tiny) throw SingularInPrecision("pivot below the normal range of " +
                                               std::string(name(fmt_)) + " at column " +
                                               std::to_string(j));
    ipiv_[j] = p;
    const index_t klast = std::min(n_ - 1, j + band_cols);
    if (p != j) {
      for (index_t k = j; k <= klast; ++k) std::swap(at(j, k), at(p, k));
    }
    const T piv = at(j, j);
    // multipliers
    for (index_t i = j + 1; i <= ilast; ++i) at(i, j) = Policy::div(at(i, j), piv);
    round_ops += ilast - j;
    // trailing update, column-wise so the inner loop is contiguous
    for (index_t k = j + 1; k <= klast; ++k) {
      const T ajk = at(j, k);
      if (ajk == T(0)) continue;
      Policy::span_update(&at(j + 1, k), &at(j + 1, j), ajk, ilast - j);
      round_ops += 2 * static_cast<std::uint64_t>(ilast - j);
    }
  }
  if (stats) stats->add_ops(fmt_, round_ops);

  for (const T v : ab)
    if (!std::isfinite(static_cast<double>(v)))
      throw OverflowDetected("non-finite entry produced during banded elimination");
}

template <class Policy>
Vector BandLU::solve_impl(const Vector& rhs, RoundingStats* stats) const {
  using T = typename Policy::T;
  const std::vector<T>& ab = [&]() -> const std::vector<T>& {
    if constexpr (std::is_same_v<T, double>) return ab_d_;
    else return ab_f_;
  }();
  auto at = [&](index_t i, index_t j) -> T { return ab[j * ldab_ + (kl_ + ku_ + i - j)]; };

  std::vector<T> x(n_);
  for (index_t i = 0; i < n_; ++i) x[i] = Policy::from_double(rhs[i]);

  // forward: apply interchanges and L sweeps column by column
  for (index_t j = 0; j < n_; ++j) {
    if (ipiv_[j] != j) std::swap(x[j], x[ipiv_[j]]);
    const T xj = x[j];
    if (xj == T(0)) continue;
    const index_t ilast = std::min(n_ - 1, j + kl_);
    if (ilast > j)  // entries (j+1..ilast, j) are contiguous in the band column
      Policy::span_update(&x[j + 1], &ab[j * ldab_ + (kl_ + ku_ + 1)], xj, ilast - j);
  }
  // back substitution with U (upper bandwidth ku+kl after pivoting)
  const index_t ubw = kl_ + ku_;
  for (index_t j = n_ - 1; j >= 0; --j) {
    const T xj = Policy::div(x[j], at(j, j));
    x[j] = xj;
    if (xj != T(0)) {
      const index_t ifirst = std::max<index_t>(0, j - ubw);
      Policy::span_update(&x[ifirst], &ab[j * ldab_ + (kl_ + ku_ + ifirst - j)], xj, j - ifirst);
    }
  }

  if (stats) stats->add_ops(fmt_, 2 * static_cast<std::uint64_t>(n_) * (kl_ + ubw + 1));
  Vector out(n_);
  for (index_t i = 0; i < n_; ++i) out[i] = static_cast<double>(x[i]);
  return out;
}

Vector BandLU::solve(const Vector& rhs, RoundingStats* stats) const {
  if (rhs.size() != static_cast<size_t>(n_)) throw ContractViolation("BandLU::solve: size mismatch");
  switch (fmt_) {
    case Precision::Double: return solve_impl<PolDouble>(rhs, stats);
    case Precision::Single: return solve_impl<PolSingle>(rhs, stats);
    default: return solve_impl<PolHalf>(rhs, stats);
  }
}

Vector BandLU::solve_transposed(const Vector& rhs) const {
  if (fmt_ != Precision::Double)
    throw ContractViolation("solve_transposed supports binary64 factorizations only");
  if (rhs.size() != static_cast<size_t>(n_)) throw ContractViolation("solve_transposed: size mismatch");
  auto at = [&](index_t i, index_t j) -> double { return ab_d_[j * ldab_ + (kl_ + ku_ + i - j)]; };
  // A = P^T L U, so A^T y = rhs solves as U^T t = rhs, L^T s = t, y = P^T s.
  Vector x = rhs;
  const index_t ubw = kl_ + ku_;
  for (index_t j = 0; j < n_; ++j) {  // U^T is lower triangular
    double acc = x[j];
    const index_t ifirst = std::max<index_t>(0, j - ubw);
    for (index_t i = ifirst; i < j; ++i) acc -= at(i, j) * x[i];
    x[j] = acc / at(j, j);
  }
  for (index_t j = n_ - 1; j >= 0; --j) {  // L^T is unit upper triangular
    double acc = x[j];
    const index_t ilast = std::min(n_ - 1, j + kl_);
    for (index_t i = j + 1; i <= ilast; ++i) acc -= at(i, j) * x[i];
    x[j] = acc;
  }
  for (index_t j = n_ - 1; j >= 0; --j)
    if (ipiv_[j] != j) std::swap(x[j], x[ipiv_[j]]);
  return x;
}

double BandLU::factored_entry(index_t i, index_t j) const {
  if (i < 0 || j < 0 || i >= n_ || j >= n_) return 0.0;
  const index_t r = kl_ + ku_ + i - j;
  if (r < 0 || r >= ldab_) return 0.0;
  if (fmt_ == Precision::Double) return ab_d_[j * ldab_ + r];
  return static_cast<double>(ab_f_[j * ldab_ + r]);
}

std::vector<double> BandLU::reconstruct() const {
  // The elimination computed U = M_{n-1} P_{n-1} ... M_0 P_0 A, so
  // A = P_0^T M_0^{-1} ... P_{n-1}^T M_{n-1}^{-1} U with
  // M_j^{-1} = I + sum_{i>j} l_ij e_i e_j^T.
  const index_t ubw = kl_ + ku_;
  std::vector<double> M(static_cast<size_t>(n_) * n_, 0.0);
  for (index_t i = 0; i < n_; ++i)
    for (index_t j = i; j <= std::min(n_ - 1, i + ubw); ++j) M[i * n_ + j] = factored_entry(i, j);
  for (index_t j = n_ - 1; j >= 0; --j) {
    const index_t ilast = std::min(n_ - 1, j + kl_);
    for (index_t i = j + 1; i <= ilast; ++i) {
      const double l = factored_entry(i, j);
      if (l == 0.0) continue;
      for (index_t c = 0; c < n_; ++c) M[i * n_ + c] += l * M[j * n_ + c];
    }
    if (ipiv_[j] != j)
      for (index_t c = 0; c < n_; ++c) std::swap(M[j * n_ + c], M[ipiv_[j] * n_ + c]);
  }
  return M;
}

}  // namespace gadi
