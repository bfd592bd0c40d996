#include "gadi/inner_solver.hpp"

#include <cmath>

#include "gadi/errors.hpp"
#include "gadi/kernels.hpp"

namespace gadi {

InnerMethod inner_method_from_name(const std::string& s) {
  if (s == "lu" || s == "lu_direct" || s == "direct") return InnerMethod::LuDirect;
  if (s == "cg") return InnerMethod::Cg;
  if (s == "gmres") return InnerMethod::Gmres;
  throw ParameterError("unknown inner method: " + s);
}

const char* name(InnerMethod m) {
  switch (m) {
    case InnerMethod::LuDirect: return "lu_direct";
    case InnerMethod::Cg: return "cg";
    default: return "gmres";
  }
}

Factorization factorize(const SparseMatrix& A, Precision fmt, std::string label,
                        RoundingStats* stats) {
  Factorization f;
  f.fmt = fmt;
  f.for_matrix = std::move(label);
  f.lu = std::make_shared<BandLU>(A, fmt, stats);
  return f;
}

Vector solve_factored(const Factorization& f, const Vector& rhs, RoundingStats* stats) {
  if (!f.lu) throw ContractViolation("solve_factored: empty factorization");
  return f.lu->solve(rhs, stats);
}

namespace {

SparseMatrix rounded_copy(const SparseMatrix& A, Precision fmt) {
  SparseMatrix R = A;
  for (double& v : R.values()) v = round_to(v, fmt);
  return R;
}

InnerResult cg_solve(const SparseMatrix& A, const Vector& rhs, const InnerSolverSpec& spec,
                     Precision fmt, double stop_norm, RoundingStats* stats) {
  const SparseMatrix Af = rounded_copy(A, fmt);
  const double target = spec.tol_epsilon * stop_norm;
  InnerResult res;
  Vector x(rhs.size(), 0.0);
  Vector r = round_vec(rhs, fmt);
  Vector p = r;
  double rs = dot(r, r, fmt, stats);
  for (int it = 0; it < spec.max_inner_iters; ++it) {
    if (norm2_64(r) <= target) {
      res.x = std::move(x);
      res.iters = it;
      return res;
    }
    Vector Ap = matvec(Af, p, fmt, stats);
    const double pap = dot(p, Ap, fmt, stats);
    if (pap == 0.0 || !std::isfinite(pap)) break;
    const double a = rounded_binop(BinOp::Div, rs, pap, fmt);
    x = axpy(a, p, x, fmt, stats);
    r = axpy(-a, Ap, r, fmt, stats);
    const double rs_new = dot(r, r, fmt, stats);
    if (!std::isfinite(rs_new) || !all_finite(r)) {
      res.x = std::move(x);
      res.iters = it + 1;
      res.status = InnerStatus::Overflow;
      return res;
    }
    const double beta = rounded_binop(BinOp::Div, rs_new, rs, fmt);
    p = axpy(beta, p, r, fmt, stats);
    rs = rs_new;
  }
  res.x = std::move(x);
  res.iters = spec.max_inner_iters;
  res.status = all_finite(res.x) ? InnerStatus::Stagnated : InnerStatus::Overflow;
  return res;
}

InnerResult gmres_solve(const SparseMatrix& A, const Vector& rhs, const InnerSolverSpec& spec,
                        Precision fmt, double stop_norm, RoundingStats* stats) {
  const SparseMatrix Af = rounded_copy(A, fmt);
  const double target = spec.tol_epsilon * stop_norm;
  const int m = std::max(1, spec.restart);
  const index_t n = static_cast<index_t>(rhs.size());

  InnerResult res;
  Vector x(n, 0.0);
  int total_iters = 0;

  while (total_iters < spec.max_inner_iters) {
    Vector r = residual(Af, x, rhs, fmt, fmt, stats);
    if (!all_finite(r)) {
      res.x = std::move(x);
      res.iters = total_iters;
      res.status = InnerStatus::Overflow;
      return res;
    }
    const double beta = norm2(r, fmt, stats);
    if (norm2_64(r) <= target) {
      res.x = std::move(x);
      res.iters = total_iters;
      return res;
    }
    if (beta == 0.0) break;

    std::vector<Vector> V;
    V.push_back(scale(1.0 / beta, r, fmt, stats));
    std::vector<std::vector<double>> Hc(m + 1, std::vector<double>(m, 0.0));
    std::vector<double> cs(m, 0.0), sn(m, 0.0), g(m + 1, 0.0);
    g[0] = beta;
    int j = 0;
    bool happy = false;
    for (; j < m && total_iters < spec.max_inner_iters; ++j, ++total_iters) {
      Vector w = matvec(Af, V[j], fmt, stats);
      for (int i = 0; i <= j; ++i) {
        const double h = dot(w, V[i], fmt, stats);
        Hc[i][j] = h;
        w = axpy(-h, V[i], w, fmt, stats);
      }
      const double h1 = norm2(w, fmt, stats);
      Hc[j + 1][j] = h1;
      if (!std::isfinite(h1)) {
        res.x = std::move(x);
        res.iters = total_iters;
        res.status = InnerStatus::Overflow;
        return res;
      }
      if (h1 != 0.0) V.push_back(scale(1.0 / h1, w, fmt, stats));
      // apply accumulated rotations to the new column, in fmt
      for (int i = 0; i < j; ++i) {
        const double t1 = rounded_binop(BinOp::Add, round_to(cs[i] * Hc[i][j], fmt),
                                        round_to(sn[i] * Hc[i + 1][j], fmt), fmt);
        const double t2 = rounded_binop(BinOp::Sub, round_to(cs[i] * Hc[i + 1][j], fmt),
                                        round_to(sn[i] * Hc[i][j], fmt), fmt);
        Hc[i][j] = t1;
        Hc[i + 1][j] = t2;
      }
      const double a = Hc[j][j], b = Hc[j + 1][j];
      const double denom = round_to(std::hypot(a, b), fmt);
      if (denom == 0.0) {
        happy = true;
        ++j;
        ++total_iters;
        break;
      }
      cs[j] = rounded_binop(BinOp::Div, a, denom, fmt);
      sn[j] = rounded_binop(BinOp::Div, b, denom, fmt);
      Hc[j][j] = denom;
      Hc[j + 1][j] = 0.0;
      const double gj = g[j];
      g[j] = round_to(cs[j] * gj, fmt);
      g[j + 1] = round_to(-sn[j] * gj, fmt);
      if (std::fabs(g[j + 1]) <= target || h1 == 0.0) {
        happy = true;
        ++j;
        ++total_iters;
        break;
      }
    }
    // back-solve the j x j triangular system in fmt
    std::vector<double> y(j, 0.0);
    for (int i = j - 1; i >= 0; --i) {
      double acc = g[i];
      for (int k = i + 1; k < j; ++k)
        acc = rounded_binop(BinOp::Sub, acc, round_to(Hc[i][k] * y[k], fmt), fmt);
      y[i] = rounded_binop(BinOp::Div, acc, Hc[i][i], fmt);
    }
    for (int i = 0; i < j; ++i) x = axpy(y[i], V[i], x, fmt, stats);
    if (!all_finite(x)) {
      res.x = std::move(x);
      res.iters = total_iters;
      res.status = InnerStatus::Overflow;
      return res;
    }
    if (happy) {
      Vector rr = residual(Af, x, rhs, fmt, fmt, stats);
      if (norm2_64(rr) <= target) {
        res.x = std::move(x);
        res.iters = total_iters;
        return res;
      }
    }
  }
  res.x = std::move(x);
  res.iters = total_iters;
  res.status = all_finite(res.x) ? InnerStatus::Stagnated : InnerStatus::Overflow;
  return res;
}

}  // namespace

InnerResult krylov_solve(const SparseMatrix& A, const Vector& rhs, const InnerSolverSpec& spec,
                         Precision fmt, double stop_norm, RoundingStats* stats) {
  if (A.n_rows() != A.n_cols() || rhs.size() != static_cast<size_t>(A.n_rows()))
    throw ContractViolation("krylov_solve: dimension mismatch");
  if (spec.method == InnerMethod::Cg) return cg_solve(A, rhs, spec, fmt, stop_norm, stats);
  return gmres_solve(A, rhs, spec, fmt, stop_norm, stats);
}

}  // namespace gadi
