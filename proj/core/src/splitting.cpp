#include "gadi/splitting.hpp"

#include <cmath>
#include <limits>

#include "gadi/dense.hpp"
#include "gadi/errors.hpp"
#include "gadi/kernels.hpp"

namespace gadi {

Splitting hss_split(const SparseMatrix& A) {
  if (A.n_rows() != A.n_cols()) throw ContractViolation("hss_split: square matrix required");
  const SparseMatrix At = A.transpose();
  Splitting s;
  s.M = add(0.5, A, 0.5, At);
  s.N = add(0.5, A, -0.5, At);
  s.kind = SplitKind::Hss;
  return s;
}

Splitting explicit_splitting(const SparseMatrix& A, SparseMatrix M, SparseMatrix N) {
  if (M.n_rows() != A.n_rows() || N.n_rows() != A.n_rows() || M.n_cols() != A.n_cols() ||
      N.n_cols() != A.n_cols())
    throw ContractViolation("explicit_splitting: shape mismatch");
  const SparseMatrix sum = add(1.0, M, 1.0, N);
  for (index_t i = 0; i < A.n_rows(); ++i)
    for (index_t k = sum.row_ptr()[i]; k < sum.row_ptr()[i + 1]; ++k) {
      const double s = sum.values()[k];
      const double a = A.at(i, sum.col_idx()[k]);
      const double ulp = std::fabs(a) * std::numeric_limits<double>::epsilon();
      if (std::fabs(s - a) > ulp) throw ContractViolation("explicit_splitting: M + N != A");
    }
  return Splitting{std::move(M), std::move(N), SplitKind::Explicit};
}

RegularizedPair regularize(const Splitting& s, double alpha, double omega) {
  if (!(alpha > 0.0)) throw ParameterError("regularize: alpha must be positive");
  if (!(omega >= 0.0 && omega < 2.0)) throw ParameterError("regularize: omega must be in [0, 2)");
  RegularizedPair rp;
  rp.H = shift_diagonal(s.M, alpha);
  rp.S = shift_diagonal(s.N, alpha);
  rp.alpha = alpha;
  rp.omega = omega;
  rp.p = (2.0 - omega) * alpha;
  return rp;
}

double kappa2_shifted(const SparseMatrix& U, double alpha) {
  if (alpha < 0.0) throw ParameterError("kappa2_shifted: alpha must be non-negative");
  auto [smax, smin] = sigma_extremes(U);
  return (alpha + smax) / (alpha + smin);
}

double kappa_hat_from_sigmas(double smax_m, double smin_m, double smax_n, double smin_n,
                             double alpha) {
  const double num = 4.0 * alpha * alpha + alpha * (smax_m + smax_n);
  const double den = alpha * alpha + alpha * (smin_m + smin_n) + smin_m * smin_n;
  return num / den;
}

double kappa_hat(const Splitting& s, double alpha) {
  if (!(alpha > 0.0)) throw ParameterError("kappa_hat: alpha must be positive");
  auto [smax_m, smin_m] = sigma_extremes(s.M);
  auto [smax_n, smin_n] = sigma_extremes(s.N);
  return kappa_hat_from_sigmas(smax_m, smin_m, smax_n, smin_n, alpha);
}

std::pair<double, double> downcast_condition_check(const SparseMatrix& U, Precision fmt) {
  if (fmt == Precision::Double)
    throw ParameterError("downcast_condition_check: fmt must be coarser than double");
  auto [smax, smin] = sigma_extremes(U);
  const double before = smax / smin;
  SparseMatrix Ur = U;
  for (double& v : Ur.values()) v = round_to(v, fmt);
  auto [rmax, rmin] = sigma_extremes(Ur);
  const double after = rmin > 0.0 ? rmax / rmin : std::numeric_limits<double>::infinity();
  return {before, after};
}

}  // namespace gadi
