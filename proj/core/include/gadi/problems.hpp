#pragma once

// Experiment instances: the centered-difference 3D convection-diffusion
// system on the unit cube, and the continuous Sylvester equation
// A X + X B = G with its matricized GADI-AB solver.

#include <optional>
#include <string>

#include "gadi/dense.hpp"
#include "gadi/solver.hpp"
#include "gadi/sparse.hpp"

namespace gadi {

struct ConvDiff3DSpec {
  index_t n = 2;  // degrees of freedom per direction; system dimension n^3
  double r() const { return 1.0 / (2.0 * static_cast<double>(n) + 2.0); }
  double t1() const { return 6.0; }
  double t2() const { return -1.0 - r(); }
  double t3() const { return -1.0 + r(); }
};

struct ConvDiff3DProblem {
  SparseMatrix A;     // Tx (x) I (x) I + I (x) Ty (x) I + I (x) I (x) Tz
  Vector x_exact;     // ones(n^3)
  Vector b;           // A * x_exact in binary64
};

/// Tx = Tridiag(t2, t1, t3), Ty = Tz = Tridiag(t2, 0, t3); 7-point stencil
/// with nnz = 7n^3 - 6n^2.
ConvDiff3DProblem build_convdiff3d(const ConvDiff3DSpec& spec);

struct SylvesterSpec {
  index_t n = 2;
  double r = 1.0;  // Hermitian- vs skew-dominance weight
  double shift() const { return 100.0 / ((static_cast<double>(n) + 1.0) * (static_cast<double>(n) + 1.0)); }
};

struct SylvesterProblem {
  SparseMatrix A;       // = B = Tridiag(-1,2,-1) + 2r*Tridiag(0.5,0,-0.5) + shift*I
  SparseMatrix B;
  DenseMatrix C_rhs;    // -(A*X_exact + X_exact*B), so A X + X B + C = 0
  DenseMatrix X_exact;  // ones(n, n)
};

SylvesterProblem build_sylvester(const SylvesterSpec& spec);

/// The Sylvester map L(X) = A X + X B seen as a linear system on vec(X) with
/// the splitting M = I (x) A, N = B^T (x) I, never materializing the
/// Kronecker products. Step-2 solves (aI + A) Z = R column-wise against one
/// reused factorization; step-3 solves (aI + B^T) row-wise.
class SylvesterOperator final : public GadiSystem {
 public:
  /// G is the right-hand side of A X + X B = G.
  SylvesterOperator(const SparseMatrix& A, const SparseMatrix& B, DenseMatrix G, Precision u_f);

  index_t dim() const override { return m_ * n_; }
  Vector residual_uf(const Vector& x, RoundingStats& stats) const override;
  double true_residual_norm(const Vector& x) const override;
  void prepare(double alpha, double omega, Precision u_r, const InnerSolverSpec& spec,
               RoundingStats& stats) override;
  void set_inner_stop_norm(double stop_norm) override { stop_norm_ = stop_norm; }
  InnerResult solve_H(const Vector& rhat, RoundingStats& stats) override;
  InnerResult solve_S(const Vector& pz, RoundingStats& stats) override;

  /// vec(A X + X B), binary64; the dense Kronecker oracle target.
  Vector apply(const Vector& x) const;

  index_t rows() const { return m_; }
  index_t cols() const { return n_; }

 private:
  const SparseMatrix& A_;
  const SparseMatrix Bt_;
  DenseMatrix G_;
  Precision u_f_;
  Precision u_r_ = Precision::Double;
  index_t m_ = 0, n_ = 0;
  std::optional<Factorization> fa_, fbt_;
  double stop_norm_ = 1.0;
};

/// GADI-IR on the Sylvester equation with splitting matrices taken directly
/// from the coefficient pair (A, B). Returns the solution as a dense X plus
/// the usual report; residuals are Frobenius norms of G - A X - X B (equal to
/// the 2-norm of the vec-residual).
struct SylvesterResult {
  DenseMatrix X;
  SolveReport report;
};
SylvesterResult gadi_ab_solve(const SylvesterProblem& prob, const GadiConfig& cfg);

// vec/unvec with column-major stacking: vec(X)[j*m + i] = X(i, j).
Vector vec(const DenseMatrix& X);
DenseMatrix unvec(const Vector& x, index_t m, index_t n);

}  // namespace gadi
