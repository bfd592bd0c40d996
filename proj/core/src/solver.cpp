#include "gadi/solver.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <optional>

#include "gadi/errors.hpp"
#include "gadi/kernels.hpp"

namespace gadi {

double default_xi(Precision u) {
  switch (u) {
    case Precision::Double: return 1e-26;
    case Precision::Single: return 1e-8;
    default: return 1e-4;
  }
}

const char* name(SolveStatus s) {
  switch (s) {
    case SolveStatus::Converged: return "Converged";
    case SolveStatus::MaxIters: return "MaxIters";
    case SolveStatus::Diverged: return "Diverged";
    case SolveStatus::OverflowDetected: return "OverflowDetected";
    case SolveStatus::SingularInPrecision: return "SingularInPrecision";
    default: return "Stalled";
  }
}

namespace {

void validate(const GadiConfig& cfg) {
  if (!(cfg.alpha > 0.0)) throw ParameterError("alpha must be positive");
  if (!(cfg.omega >= 0.0 && cfg.omega < 2.0)) throw ParameterError("omega must be in [0, 2)");
  if (cfg.xi < 0.0) throw ParameterError("xi must be positive");
  if (cfg.max_outer_iters < 1) throw ParameterError("max_outer_iters must be >= 1");
  const double uu = unit_roundoff(cfg.u), uf = unit_roundoff(cfg.u_f), ur = unit_roundoff(cfg.u_r);
  if (!(uu <= uf && uf <= ur)) throw ParameterError("precision triple must satisfy u <= u_f <= u_r");
}

}  // namespace

namespace {

// Exponent putting max|s_i| into [1, 2) when scaling by 2^-e; 0 when scaling
// is disabled or the residual is empty of finite structure.
int scaling_exponent(const Vector& s, bool enabled) {
  if (!enabled) return 0;
  const double m = inf_norm(s);
  if (m == 0.0 || !std::isfinite(m)) return 0;
  return std::ilogb(m);
}

}  // namespace

GadiResult run_gadi_ir(GadiSystem& sys, const GadiConfig& cfg, const Vector& x0) {
  validate(cfg);
  const double xi = cfg.xi > 0.0 ? cfg.xi : default_xi(cfg.u);

  GadiResult out;
  SolveReport& rep = out.report;
  RoundingStats& stats = rep.rounding;

  Vector x = round_vec(x0, cfg.u, stats);
  out.x = x;
  const double nt0 = sys.true_residual_norm(x);
  if (nt0 == 0.0) {
    rep.status = SolveStatus::Converged;
    rep.final_rres = 0.0;
    return out;
  }

  try {
    sys.prepare(cfg.alpha, cfg.omega, cfg.u_r, cfg.inner, stats);
  } catch (const SingularInPrecision&) {
    rep.status = SolveStatus::SingularInPrecision;
    return out;
  } catch (const OverflowDetected&) {
    rep.status = SolveStatus::OverflowDetected;
    return out;
  }

  // Step 1 in two stages: s in u_f, then the u_r rounding of the (exactly
  // power-of-two scaled) residual.
  auto rounded_scaled_residual = [&](const Vector& xk, int& e) {
    Vector s = sys.residual_uf(xk, stats);
    e = scaling_exponent(s, cfg.residual_scaling);
    if (e != 0)
      for (double& v : s) v = std::ldexp(v, -e);
    return round_vec(s, cfg.u_r, stats);
  };

  int e = 0;
  Vector rhat = rounded_scaled_residual(x, e);
  // ||r(0)||_2 in binary64 on the u_r-rounded residual, unscaled.
  const double g0 = std::ldexp(norm2_64(rhat), e);
  // The inner tolerance reference eps*||r(0)|| expressed in the current
  // residual-scaling frame; refreshed whenever the frame changes.
  sys.set_inner_stop_norm(std::ldexp(g0, -e));
  const double p_rounded = round_to((2.0 - cfg.omega) * cfg.alpha, cfg.u_r, stats);

  double best = 1.0;
  int best_iter = 0;

  for (int k = 0;; ++k) {
    const double rres = rep.rel_residual_history.back();
    rep.final_rres = rres;
    rep.outer_iters = k;

    const double gn = std::ldexp(norm2_64(rhat), e);
    const bool guard_met = gn * gn <= g0 * g0 * xi;
    const bool true_met = rres * rres <= xi;
    if (guard_met && true_met) {
      rep.status = SolveStatus::Converged;
      return out;
    }
    if (guard_met) {
      // The u_r image of the residual dropped below the target while the true
      // residual did not: the iteration has hit its precision floor.
      rep.status = SolveStatus::Stalled;
      return out;
    }
    if (!std::isfinite(rres)) {
      rep.status = SolveStatus::OverflowDetected;
      return out;
    }
    if (rres > cfg.divergence_factor) {
      rep.status = SolveStatus::Diverged;
      return out;
    }
    if (cfg.stall_window > 0) {
      if (rres < best * (1.0 - 1e-3)) {
        best = rres;
        best_iter = k;
      } else if (k - best_iter >= cfg.stall_window) {
        rep.status = SolveStatus::Stalled;
        return out;
      }
    }
    if (k >= cfg.max_outer_iters) {
      rep.status = SolveStatus::MaxIters;
      return out;
    }

    InnerResult z = sys.solve_H(rhat, stats);
    rep.inner_iter_totals += z.iters;
    if (z.status == InnerStatus::Overflow) {
      rep.status = SolveStatus::OverflowDetected;
      return out;
    }
    if (z.status == InnerStatus::Stagnated) ++rep.inner_stagnations;

    const Vector pz = scale(p_rounded, z.x, cfg.u_r, &stats);
    InnerResult y = sys.solve_S(pz, stats);
    rep.inner_iter_totals += y.iters;
    if (y.status == InnerStatus::Overflow) {
      rep.status = SolveStatus::OverflowDetected;
      return out;
    }
    if (y.status == InnerStatus::Stagnated) ++rep.inner_stagnations;

    // Undo the residual scaling exactly, then x <- x + y with adds in u.
    if (e != 0)
      for (double& v : y.x) v = std::ldexp(v, e);
    x = axpy(1.0, y.x, x, cfg.u, &stats);
    out.x = x;
    if (!all_finite(x)) {
      rep.rel_residual_history.push_back(sys.true_residual_norm(x) / nt0);
      rep.outer_iters = k + 1;
      rep.final_rres = rep.rel_residual_history.back();
      rep.status = SolveStatus::OverflowDetected;
      return out;
    }
    rhat = rounded_scaled_residual(x, e);
    sys.set_inner_stop_norm(std::ldexp(g0, -e));
    rep.rel_residual_history.push_back(sys.true_residual_norm(x) / nt0);
  }
}

namespace {

class CsrGadiSystem final : public GadiSystem {
 public:
  CsrGadiSystem(const SparseMatrix& A, const Vector& b, const Splitting& s, Precision u_f)
      : A_(A), b_(b), split_(s), u_f_(u_f) {}

  index_t dim() const override { return A_.n_rows(); }

  Vector residual_uf(const Vector& x, RoundingStats& stats) const override {
    return residual(A_, x, b_, u_f_, Precision::Double, &stats);
  }

  double true_residual_norm(const Vector& x) const override {
    Vector r = residual(A_, x, b_, Precision::Double, Precision::Double);
    return norm2_64(r);
  }

  void prepare(double alpha, double omega, Precision u_r, const InnerSolverSpec& spec,
               RoundingStats& stats) override {
    u_r_ = u_r;
    spec_ = spec;
    reg_ = regularize(split_, alpha, omega);
    if (spec.method == InnerMethod::LuDirect) {
      fh_ = factorize(reg_->H, u_r, "H", &stats);
      fs_ = factorize(reg_->S, u_r, "S", &stats);
    }
  }

  void set_inner_stop_norm(double stop_norm) override { stop_norm_ = stop_norm; }

  InnerResult solve_H(const Vector& rhat, RoundingStats& stats) override {
    // cg is valid here: H = alpha*I + M is symmetric positive definite for
    // the splittings this path serves.
    return inner_solve(reg_->H, fh_, rhat, spec_.method, stats);
  }
  InnerResult solve_S(const Vector& pz, RoundingStats& stats) override {
    // S = alpha*I + N is not symmetric; a cg request degrades to gmres.
    const InnerMethod m = spec_.method == InnerMethod::Cg ? InnerMethod::Gmres : spec_.method;
    return inner_solve(reg_->S, fs_, pz, m, stats);
  }

 private:
  InnerResult inner_solve(const SparseMatrix& M, const std::optional<Factorization>& f,
                          const Vector& rhs, InnerMethod method, RoundingStats& stats) {
    if (method == InnerMethod::LuDirect) {
      InnerResult r;
      r.x = solve_factored(*f, rhs, &stats);
      if (!all_finite(r.x)) r.status = InnerStatus::Overflow;
      return r;
    }
    InnerSolverSpec spec = spec_;
    spec.method = method;
    return krylov_solve(M, rhs, spec, u_r_, stop_norm_, &stats);
  }

  const SparseMatrix& A_;
  const Vector& b_;
  const Splitting& split_;
  Precision u_f_;
  Precision u_r_ = Precision::Double;
  InnerSolverSpec spec_;
  std::optional<RegularizedPair> reg_;
  std::optional<Factorization> fh_, fs_;
  double stop_norm_ = 1.0;
};

}  // namespace

GadiResult gadi_ir_solve(const SparseMatrix& A, const Vector& b, const Splitting& s,
                         const GadiConfig& cfg, const Vector* x0) {
  if (A.n_rows() != A.n_cols() || b.size() != static_cast<size_t>(A.n_rows()))
    throw ContractViolation("gadi_ir_solve: dimension mismatch");
  CsrGadiSystem sys(A, b, s, cfg.u_f);
  Vector start(A.n_rows(), cfg.ones_start ? 1.0 : 0.0);
  if (x0) start = *x0;
  return run_gadi_ir(sys, cfg, start);
}

GadiResult gadi_reference_solve(const SparseMatrix& A, const Vector& b, const Splitting& s,
                                double alpha, double omega, double tol, int max_iters,
                                const Vector* x0) {
  if (!(alpha > 0.0)) throw ParameterError("alpha must be positive");
  if (!(omega >= 0.0 && omega < 2.0)) throw ParameterError("omega must be in [0, 2)");
  const index_t n = A.n_rows();
  if (n != A.n_cols() || b.size() != static_cast<size_t>(n))
    throw ContractViolation("gadi_reference_solve: dimension mismatch");

  GadiResult out;
  SolveReport& rep = out.report;

  const RegularizedPair reg = regularize(s, alpha, omega);
  // First line uses aI - N, second uses N - (1-w) a I.
  const SparseMatrix C1 = add(-1.0, s.N, alpha, SparseMatrix::identity(n));
  const SparseMatrix C2 = add(1.0, s.N, -(1.0 - omega) * alpha, SparseMatrix::identity(n));
  const double p = (2.0 - omega) * alpha;

  std::optional<BandLU> fh, fs;
  try {
    fh.emplace(reg.H, Precision::Double);
    fs.emplace(reg.S, Precision::Double);
  } catch (const SingularInPrecision&) {
    rep.status = SolveStatus::SingularInPrecision;
    out.x.assign(n, 0.0);
    return out;
  }

  Vector x(n, 0.0);
  if (x0) x = *x0;
  out.x = x;
  Vector r = sub_64(b, matvec(A, x, Precision::Double));
  const double n0 = norm2_64(r);
  if (n0 == 0.0) {
    rep.status = SolveStatus::Converged;
    rep.final_rres = 0.0;
    return out;
  }

  for (int k = 0;; ++k) {
    const double rres = rep.rel_residual_history.back();
    rep.final_rres = rres;
    rep.outer_iters = k;
    if (rres <= tol) {
      rep.status = SolveStatus::Converged;
      return out;
    }
    if (!std::isfinite(rres)) {
      rep.status = SolveStatus::OverflowDetected;
      return out;
    }
    if (rres > 1e6) {
      rep.status = SolveStatus::Diverged;
      return out;
    }
    if (k >= max_iters) {
      rep.status = SolveStatus::MaxIters;
      return out;
    }

    Vector rhs1 = matvec(C1, x, Precision::Double);
    for (index_t i = 0; i < n; ++i) rhs1[i] += b[i];
    const Vector xh = fh->solve(rhs1);
    Vector rhs2 = matvec(C2, x, Precision::Double);
    for (index_t i = 0; i < n; ++i) rhs2[i] += p * xh[i];
    x = fs->solve(rhs2);
    out.x = x;

    r = sub_64(b, matvec(A, x, Precision::Double));
    rep.rel_residual_history.push_back(norm2_64(r) / n0);
  }
}

DenseMatrix iteration_matrix(const SparseMatrix& A, const Splitting& s, double alpha,
                             double omega) {
  const index_t n = A.n_rows();
  if (n != A.n_cols()) throw ContractViolation("iteration_matrix: square matrix required");
  if (n > kDenseCap) throw ContractViolation("iteration_matrix: n exceeds dense_cap");
  using EMat = Eigen::MatrixXd;
  auto dense = [&](const SparseMatrix& S) {
    EMat D = EMat::Zero(n, n);
    for (index_t i = 0; i < n; ++i)
      for (index_t k = S.row_ptr()[i]; k < S.row_ptr()[i + 1]; ++k)
        D(i, S.col_idx()[k]) = S.values()[k];
    return D;
  };
  const EMat M = dense(s.M), N = dense(s.N), Ad = dense(A);
  const EMat I = EMat::Identity(n, n);
  const EMat K = alpha * alpha * I + M * N - (1.0 - omega) * alpha * Ad;
  Eigen::FullPivLU<EMat> luM(alpha * I + M);
  if (!luM.isInvertible()) throw SingularMatrix("alpha*I + M is singular");
  Eigen::FullPivLU<EMat> luN(alpha * I + N);
  if (!luN.isInvertible()) throw SingularMatrix("alpha*I + N is singular");
  const EMat T = luN.solve(luM.solve(K));
  DenseMatrix out(n, n);
  for (index_t i = 0; i < n; ++i)
    for (index_t j = 0; j < n; ++j) out(i, j) = T(i, j);
  return out;
}

}  // namespace gadi
