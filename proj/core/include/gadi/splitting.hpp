#pragma once

// Splittings A = M + N, the regularized operators H = alpha*I + M and
// S = alpha*I + N, and the regularized condition quantities that govern the
// convergence factors.

#include "gadi/precision.hpp"
#include "gadi/sparse.hpp"

namespace gadi {

enum class SplitKind : std::uint8_t { Hss, Explicit, SylvesterAB };

struct Splitting {
  SparseMatrix M;
  SparseMatrix N;
  SplitKind kind = SplitKind::Hss;
};

/// M = (A + A^T)/2, N = (A - A^T)/2 in binary64; M is exactly symmetric and
/// N exactly skew-symmetric.
Splitting hss_split(const SparseMatrix& A);

/// User-supplied splitting; verifies M + N = A to within 1 ulp per entry.
Splitting explicit_splitting(const SparseMatrix& A, SparseMatrix M, SparseMatrix N);

struct RegularizedPair {
  SparseMatrix H;  // alpha*I + M
  SparseMatrix S;  // alpha*I + N
  double alpha = 0.0;
  double omega = 0.0;
  double p = 0.0;  // (2 - omega) * alpha
};

/// Requires alpha > 0 and omega in [0, 2).
RegularizedPair regularize(const Splitting& s, double alpha, double omega);

/// (alpha + sigma_max(U)) / (alpha + sigma_min(U)). Exact as the condition
/// number of alpha*I + U only when U is symmetric positive semidefinite
/// (the symmetric part of an HSS split); callers assert that usage.
double kappa2_shifted(const SparseMatrix& U, double alpha);

/// The composite quantity
///   (4a^2 + a(smax(M)+smax(N))) / (a^2 + a(smin(M)+smin(N)) + smin(M)smin(N)),
/// strictly decreasing in alpha with limit 4.
double kappa_hat(const Splitting& s, double alpha);

/// Same evaluation from precomputed singular-value extremes; lets an alpha
/// sweep reuse one sigma computation per operator.
double kappa_hat_from_sigmas(double smax_m, double smin_m, double smax_n, double smin_n,
                             double alpha);

/// kappa_2 of U and of its elementwise rounding to fmt, reported for
/// empirical comparison (a singular downcast reports +inf, no error).
std::pair<double, double> downcast_condition_check(const SparseMatrix& U, Precision fmt);

}  // namespace gadi
