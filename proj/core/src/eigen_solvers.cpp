#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>
#include <memory>

#include "gadi/band_lu.hpp"
#include "gadi/dense.hpp"
#include "gadi/errors.hpp"

namespace gadi {

namespace {

using EMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

EMat to_eigen(const SparseMatrix& A) {
  EMat M = EMat::Zero(A.n_rows(), A.n_cols());
  for (index_t i = 0; i < A.n_rows(); ++i)
    for (index_t k = A.row_ptr()[i]; k < A.row_ptr()[i + 1]; ++k)
      M(i, A.col_idx()[k]) = A.values()[k];
  return M;
}

std::pair<double, double> sigma_dense(const SparseMatrix& A) {
  const index_t n = A.n_rows();
  if (A.is_symmetric()) {
    // Singular values of a symmetric matrix are its eigenvalue moduli.
    Eigen::SelfAdjointEigenSolver<EMat> es(to_eigen(A), Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw IterationLimit("symmetric eigensolver failed");
    const auto& ev = es.eigenvalues();
    double lo = std::fabs(ev(0)), hi = lo;
    for (index_t i = 1; i < n; ++i) {
      lo = std::min(lo, std::fabs(ev(i)));
      hi = std::max(hi, std::fabs(ev(i)));
    }
    return {hi, lo};
  }
  if (A.is_skew_symmetric()) {
    // -A*A is symmetric PSD with eigenvalues sigma_i^2.
    EMat D = to_eigen(A);
    EMat B = -(D * D);
    Eigen::SelfAdjointEigenSolver<EMat> es(B, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw IterationLimit("skew eigensolver failed");
    const auto& ev = es.eigenvalues();
    double lo = std::sqrt(std::max(0.0, ev(0))), hi = std::sqrt(std::max(0.0, ev(n - 1)));
    return {hi, lo};
  }
  Eigen::JacobiSVD<EMat> svd(to_eigen(A));
  const auto& sv = svd.singularValues();
  return {sv(0), sv(n - 1)};
}

// Power iteration on A^T A; returns sigma_max.
double sigma_max_power(const SparseMatrix& A, const SparseMatrix& At, double tol, int max_iters) {
  const index_t n = A.n_cols();
  Vector v(n);
  // Fixed deterministic start.
  for (index_t i = 0; i < n; ++i) v[i] = 1.0 + 0.5 * std::sin(0.7 * static_cast<double>(i + 1));
  double prev = 0.0;
  for (int it = 0; it < max_iters; ++it) {
    // w = A^T (A v), computed natively in binary64.
    Vector av(A.n_rows(), 0.0);
    for (index_t i = 0; i < A.n_rows(); ++i) {
      double acc = 0.0;
      for (index_t k = A.row_ptr()[i]; k < A.row_ptr()[i + 1]; ++k)
        acc += A.values()[k] * v[A.col_idx()[k]];
      av[i] = acc;
    }
    Vector w(n, 0.0);
    for (index_t i = 0; i < At.n_rows(); ++i) {
      double acc = 0.0;
      for (index_t k = At.row_ptr()[i]; k < At.row_ptr()[i + 1]; ++k)
        acc += At.values()[k] * av[At.col_idx()[k]];
      w[i] = acc;
    }
    double nw = 0.0;
    for (double x : w) nw += x * x;
    nw = std::sqrt(nw);
    if (nw == 0.0) return 0.0;
    const double est = std::sqrt(nw);  // ||A^T A v|| -> sigma^2 for unit v
    for (index_t i = 0; i < n; ++i) v[i] = w[i] / nw;
    if (it > 0 && std::fabs(est - prev) <= tol * est) return est;
    prev = est;
  }
  throw IterationLimit("sigma_max power iteration did not converge");
}

// Inverse iteration on (A^T A)^{-1} through a binary64 banded LU of A;
// sigma_min = 1/sqrt(lambda_max((A^T A)^{-1})).
double sigma_min_inverse_power(const SparseMatrix& A, double tol, int max_iters) {
  const index_t n = A.n_rows();
  std::unique_ptr<BandLU> lu;
  try {
    lu = std::make_unique<BandLU>(A, Precision::Double);
  } catch (const SingularInPrecision& e) {
    throw SingularMatrix(e.what());
  }
  Vector v(n);
  for (index_t i = 0; i < n; ++i) v[i] = 1.0 + 0.5 * std::cos(1.3 * static_cast<double>(i + 1));
  double nv = 0.0;
  for (double x : v) nv += x * x;
  nv = std::sqrt(nv);
  for (double& x : v) x /= nv;
  double prev = 0.0;
  for (int it = 0; it < max_iters; ++it) {
    Vector z = lu->solve_transposed(v);
    Vector w = lu->solve(z);
    double nw = 0.0;
    for (double x : w) nw += x * x;
    nw = std::sqrt(nw);
    if (nw == 0.0) throw SingularMatrix("inverse iteration produced a zero vector");
    const double est = 1.0 / std::sqrt(nw);  // sigma_min estimate for unit v
    for (index_t i = 0; i < n; ++i) v[i] = w[i] / nw;
    if (it > 0 && std::fabs(est - prev) <= tol * est) return est;
    prev = est;
  }
  throw IterationLimit("sigma_min inverse iteration did not converge");
}

}  // namespace

std::pair<double, double> sigma_extremes(const SparseMatrix& A) {
  if (A.n_rows() != A.n_cols()) throw ContractViolation("sigma_extremes: square matrix required");
  if (A.n_rows() == 0) throw ContractViolation("sigma_extremes: empty matrix");
  if (A.n_rows() <= kDenseCap) {
    auto [hi, lo] = sigma_dense(A);
    return {hi, lo};
  }
  const SparseMatrix At = A.transpose();
  const double smax = sigma_max_power(A, At, 1e-8, 20000);
  const double smin = sigma_min_inverse_power(A, 1e-8, 20000);
  return {smax, smin};
}

double spectral_radius(const DenseMatrix& T) {
  if (T.n_rows() != T.n_cols()) throw ContractViolation("spectral_radius: square matrix required");
  const index_t n = T.n_rows();
  if (n == 0) return 0.0;
  Eigen::Map<const EMat> M(T.data().data(), n, n);
  Eigen::EigenSolver<Eigen::MatrixXd> es(Eigen::MatrixXd(M), /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success) throw IterationLimit("dense eigensolver did not converge");
  double rho = 0.0;
  for (index_t i = 0; i < n; ++i) rho = std::max(rho, std::abs(es.eigenvalues()(i)));
  return rho;
}

}  // namespace gadi
