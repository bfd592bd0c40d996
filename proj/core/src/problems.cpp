#include "gadi/problems.hpp"

#include "gadi/errors.hpp"
#include "gadi/kernels.hpp"

namespace gadi {

ConvDiff3DProblem build_convdiff3d(const ConvDiff3DSpec& spec) {
  const index_t n = spec.n;
  if (n < 2) throw ContractViolation("convdiff3d: n >= 2 required");
  const index_t nn = n * n, N = n * n * n;
  const double t1 = spec.t1(), t2 = spec.t2(), t3 = spec.t3();

  // Index (i, j, k) -> i*n^2 + j*n + k; x varies slowest.
  std::vector<index_t> rp(N + 1, 0);
  std::vector<index_t> ci;
  std::vector<double> v;
  ci.reserve(7 * N);
  v.reserve(7 * N);
  for (index_t i = 0; i < n; ++i)
    for (index_t j = 0; j < n; ++j)
      for (index_t k = 0; k < n; ++k) {
        const index_t row = i * nn + j * n + k;
        auto push = [&](index_t col, double val) {
          ci.push_back(col);
          v.push_back(val);
        };
        if (i > 0) push(row - nn, t2);
        if (j > 0) push(row - n, t2);
        if (k > 0) push(row - 1, t2);
        push(row, t1);
        if (k + 1 < n) push(row + 1, t3);
        if (j + 1 < n) push(row + n, t3);
        if (i + 1 < n) push(row + nn, t3);
        rp[row + 1] = static_cast<index_t>(ci.size());
      }

  ConvDiff3DProblem p;
  p.A = SparseMatrix(N, N, std::move(rp), std::move(ci), std::move(v));
  p.x_exact.assign(N, 1.0);
  p.b = matvec(p.A, p.x_exact, Precision::Double);
  return p;
}

SylvesterProblem build_sylvester(const SylvesterSpec& spec) {
  const index_t n = spec.n;
  if (n < 2) throw ContractViolation("sylvester: n >= 2 required");
  if (!(spec.r > 0.0)) throw ContractViolation("sylvester: r > 0 required");
  const double sh = spec.shift();
  // Tridiag(-1,2,-1) + 2r*Tridiag(0.5,0,-0.5) + shift*I
  SylvesterProblem p;
  p.A = SparseMatrix::tridiag(n, -1.0 - spec.r, 2.0 + sh, -1.0 + spec.r);
  p.B = p.A;
  p.X_exact = DenseMatrix(n, n, 1.0);
  // C = -(A X + X B): with X = ones, (A*ones)_i row sums and (ones*B)_j col sums.
  Vector row_sum(n, 0.0), col_sum(n, 0.0);
  for (index_t i = 0; i < n; ++i)
    for (index_t k = p.A.row_ptr()[i]; k < p.A.row_ptr()[i + 1]; ++k) {
      row_sum[i] += p.A.values()[k];
      col_sum[p.A.col_idx()[k]] += p.A.values()[k];
    }
  p.C_rhs = DenseMatrix(n, n);
  for (index_t i = 0; i < n; ++i)
    for (index_t j = 0; j < n; ++j) p.C_rhs(i, j) = -(row_sum[i] + col_sum[j]);
  return p;
}

Vector vec(const DenseMatrix& X) {
  Vector x(static_cast<size_t>(X.n_rows()) * X.n_cols());
  for (index_t j = 0; j < X.n_cols(); ++j)
    for (index_t i = 0; i < X.n_rows(); ++i) x[j * X.n_rows() + i] = X(i, j);
  return x;
}

DenseMatrix unvec(const Vector& x, index_t m, index_t n) {
  DenseMatrix X(m, n);
  for (index_t j = 0; j < n; ++j)
    for (index_t i = 0; i < m; ++i) X(i, j) = x[j * m + i];
  return X;
}

}  // namespace gadi
