#include <cmath>

#include "gadi/errors.hpp"
#include "gadi/kernels.hpp"
#include "gadi/problems.hpp"

namespace gadi {

SylvesterOperator::SylvesterOperator(const SparseMatrix& A, const SparseMatrix& B, DenseMatrix G,
                                     Precision u_f)
    : A_(A), Bt_(B.transpose()), G_(std::move(G)), u_f_(u_f) {
  if (A.n_rows() != A.n_cols() || B.n_rows() != B.n_cols())
    throw ContractViolation("SylvesterOperator: square coefficients required");
  m_ = A.n_rows();
  n_ = B.n_rows();
  if (G_.n_rows() != m_ || G_.n_cols() != n_)
    throw ContractViolation("SylvesterOperator: right-hand side shape mismatch");
}

Vector SylvesterOperator::apply(const Vector& x) const {
  const DenseMatrix X = unvec(x, m_, n_);
  DenseMatrix R(m_, n_);
  // A X: sparse times each column of X.
  for (index_t j = 0; j < n_; ++j)
    for (index_t i = 0; i < m_; ++i) {
      double acc = 0.0;
      for (index_t k = A_.row_ptr()[i]; k < A_.row_ptr()[i + 1]; ++k)
        acc += A_.values()[k] * X(A_.col_idx()[k], j);
      R(i, j) = acc;
    }
  // + X B: row i of X times B, via (B^T X^T).
  for (index_t i = 0; i < m_; ++i)
    for (index_t j = 0; j < n_; ++j) {
      double acc = 0.0;
      for (index_t k = Bt_.row_ptr()[j]; k < Bt_.row_ptr()[j + 1]; ++k)
        acc += Bt_.values()[k] * X(i, Bt_.col_idx()[k]);
      R(i, j) += acc;
    }
  return vec(R);
}

Vector SylvesterOperator::residual_uf(const Vector& x, RoundingStats& stats) const {
  const DenseMatrix X = unvec(x, m_, n_);
  DenseMatrix R(m_, n_);
  // R = G - A X - X B with every scalar op in u_f.
  auto fsub = [&](double a, double b) { return rounded_binop(BinOp::Sub, a, b, u_f_); };
  auto fmul = [&](double a, double b) { return rounded_binop(BinOp::Mul, a, b, u_f_); };
  for (index_t j = 0; j < n_; ++j)
    for (index_t i = 0; i < m_; ++i) {
      double acc = G_(i, j);
      for (index_t k = A_.row_ptr()[i]; k < A_.row_ptr()[i + 1]; ++k)
        acc = fsub(acc, fmul(A_.values()[k], X(A_.col_idx()[k], j)));
      for (index_t k = Bt_.row_ptr()[j]; k < Bt_.row_ptr()[j + 1]; ++k)
        acc = fsub(acc, fmul(Bt_.values()[k], X(i, Bt_.col_idx()[k])));
      R(i, j) = acc;
    }
  stats.add_ops(u_f_, 2 * static_cast<std::uint64_t>(n_) * (A_.nnz() + Bt_.nnz()));
  return vec(R);
}

double SylvesterOperator::true_residual_norm(const Vector& x) const {
  Vector lx = apply(x);
  Vector g = vec(G_);
  for (size_t i = 0; i < g.size(); ++i) g[i] -= lx[i];
  return norm2_64(g);  // Frobenius norm of the matricized residual
}

void SylvesterOperator::prepare(double alpha, double omega, Precision u_r,
                                const InnerSolverSpec& spec, RoundingStats& stats) {
  (void)omega;
  (void)spec;
  u_r_ = u_r;
  fa_ = factorize(shift_diagonal(A_, alpha), u_r, "alpha*I + A", &stats);
  fbt_ = factorize(shift_diagonal(Bt_, alpha), u_r, "alpha*I + B^T", &stats);
}

InnerResult SylvesterOperator::solve_H(const Vector& rhat, RoundingStats& stats) {
  // (alpha I + A) Z = R, column by column against one factorization.
  const DenseMatrix R = unvec(rhat, m_, n_);
  DenseMatrix Z(m_, n_);
  InnerResult res;
  Vector col(m_);
  for (index_t j = 0; j < n_; ++j) {
    for (index_t i = 0; i < m_; ++i) col[i] = R(i, j);
    Vector z = solve_factored(*fa_, col, &stats);
    if (!all_finite(z)) res.status = InnerStatus::Overflow;
    for (index_t i = 0; i < m_; ++i) Z(i, j) = z[i];
  }
  res.x = vec(Z);
  return res;
}

InnerResult SylvesterOperator::solve_S(const Vector& pz, RoundingStats& stats) {
  // (alpha I + B^T (x) I) vec Y = vec(Y (alpha I + B)): row-wise solves with
  // alpha*I + B^T.
  const DenseMatrix P = unvec(pz, m_, n_);
  DenseMatrix Y(m_, n_);
  InnerResult res;
  Vector row(n_);
  for (index_t i = 0; i < m_; ++i) {
    for (index_t j = 0; j < n_; ++j) row[j] = P(i, j);
    Vector y = solve_factored(*fbt_, row, &stats);
    if (!all_finite(y)) res.status = InnerStatus::Overflow;
    for (index_t j = 0; j < n_; ++j) Y(i, j) = y[j];
  }
  res.x = vec(Y);
  return res;
}

SylvesterResult gadi_ab_solve(const SylvesterProblem& prob, const GadiConfig& cfg) {
  const index_t m = prob.A.n_rows(), n = prob.B.n_rows();
  // A X + X B = G with G = -C.
  DenseMatrix G(m, n);
  for (index_t i = 0; i < m; ++i)
    for (index_t j = 0; j < n; ++j) G(i, j) = -prob.C_rhs(i, j);
  SylvesterOperator op(prob.A, prob.B, std::move(G), cfg.u_f);
  Vector x0(static_cast<size_t>(m) * n, cfg.ones_start ? 1.0 : 0.0);
  GadiResult r = run_gadi_ir(op, cfg, x0);
  return SylvesterResult{unvec(r.x, m, n), std::move(r.report)};
}

}  // namespace gadi
