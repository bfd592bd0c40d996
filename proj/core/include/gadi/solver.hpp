#pragma once

// The GADI-IR outer loop (three-precision iterative refinement over a
// splitting A = M + N), the uniform-binary64 reference iteration it refines,
// and the iteration-matrix constructor used for convergence diagnostics.

#include <memory>
#include <vector>

#include "gadi/dense.hpp"
#include "gadi/inner_solver.hpp"
#include "gadi/precision.hpp"
#include "gadi/splitting.hpp"

namespace gadi {

struct GadiConfig {
  double alpha = 1.0;
  double omega = 1.0;  // the experiments all run omega = 1
  double xi = 0.0;     // outer squared-relative tolerance; 0 picks default_xi(u)
  Precision u_r = Precision::Double;  // inner-solve precision
  Precision u = Precision::Double;    // solution-update precision
  Precision u_f = Precision::Double;  // residual precision
  InnerSolverSpec inner;
  int max_outer_iters = 20000;
  double divergence_factor = 1e6;
  // Stop after this many outer iterations without relative-residual progress;
  // 0 disables. Reduced-precision runs flatten at their accuracy floor long
  // before any feasible xi, and the flattened value is the reportable result.
  int stall_window = 0;
  bool ones_start = false;  // x(0) = ones instead of the zero vector
  // Scale the residual by an exact power of two into the u_r normal range
  // before rounding, and fold the inverse scale into the update. Exact in
  // binary64, so it changes nothing above half precision; in half it keeps
  // the rounded residual out of the subnormal range, where the relative
  // rounding model no longer holds and the iteration floors out early.
  bool residual_scaling = true;
};

/// 1e-26 when the update precision is double (residual target 1e-13), 1e-8
/// for single (target 1e-4), 1e-4 for half.
double default_xi(Precision u);

enum class SolveStatus : std::uint8_t {
  Converged,
  MaxIters,
  Diverged,
  OverflowDetected,
  SingularInPrecision,
  Stalled,
};
const char* name(SolveStatus s);

struct SolveReport {
  SolveStatus status = SolveStatus::MaxIters;
  int outer_iters = 0;
  /// ||b - A x(k)||_2 / ||b - A x(0)||_2 in binary64, one entry per step,
  /// history[0] = 1.
  std::vector<double> rel_residual_history{1.0};
  double final_rres = 1.0;
  long long inner_iter_totals = 0;
  int inner_stagnations = 0;
  RoundingStats rounding;
};

struct GadiResult {
  Vector x;
  SolveReport report;
};

/// One linear system viewed through the pieces the outer loop needs. The CSR
/// implementation lives behind gadi_ir_solve; the Sylvester operator provides
/// a matricized implementation.
class GadiSystem {
 public:
  virtual ~GadiSystem() = default;
  virtual index_t dim() const = 0;
  /// b - A x computed entirely in u_f (the first residual stage; the outer
  /// loop applies the u_r rounding).
  virtual Vector residual_uf(const Vector& x, RoundingStats& stats) const = 0;
  /// Binary64 ||b - A x||_2.
  virtual double true_residual_norm(const Vector& x) const = 0;
  /// Build (or rebuild) the inner solvers for the regularized operators.
  virtual void prepare(double alpha, double omega, Precision u_r, const InnerSolverSpec& spec,
                       RoundingStats& stats) = 0;
  virtual void set_inner_stop_norm(double stop_norm) = 0;
  virtual InnerResult solve_H(const Vector& rhat, RoundingStats& stats) = 0;
  virtual InnerResult solve_S(const Vector& pz, RoundingStats& stats) = 0;
};

/// Drive Algorithm GADI-IR over any GadiSystem. Error conditions come back as
/// report statuses, never exceptions.
GadiResult run_gadi_ir(GadiSystem& sys, const GadiConfig& cfg, const Vector& x0);

/// GADI-IR on a CSR system with the given splitting. x0 defaults to the zero
/// vector (cfg.ones_start selects the ones vector).
GadiResult gadi_ir_solve(const SparseMatrix& A, const Vector& b, const Splitting& s,
                         const GadiConfig& cfg, const Vector* x0 = nullptr);

/// Uniform-binary64 two-half-step reference iteration:
///   (aI + M) x(k+1/2) = (aI - N) x(k) + b
///   (aI + N) x(k+1)   = (N - (1-w) a I) x(k) + (2-w) a x(k+1/2)
/// Stops when ||b - A x||/||b - A x0|| <= tol.
GadiResult gadi_reference_solve(const SparseMatrix& A, const Vector& b, const Splitting& s,
                                double alpha, double omega, double tol, int max_iters,
                                const Vector* x0 = nullptr);

/// T(a, w) = (aI + N)^-1 (aI + M)^-1 (a^2 I + M N - (1-w) a A), dense, n <=
/// dense_cap.
DenseMatrix iteration_matrix(const SparseMatrix& A, const Splitting& s, double alpha, double omega);

}  // namespace gadi
