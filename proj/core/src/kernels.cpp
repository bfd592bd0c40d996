#include "gadi/kernels.hpp"

#include <cmath>

#include "gadi/errors.hpp"

namespace gadi {

namespace {

inline void check_len(size_t a, size_t b, const char* what) {
  if (a != b) throw ContractViolation(std::string(what) + ": length mismatch");
}

template <Precision P>
struct Ops {
  static double add(double a, double b) { return round_to(a + b, P); }
  static double sub(double a, double b) { return round_to(a - b, P); }
  static double mul(double a, double b) { return round_to(a * b, P); }
  static double div(double a, double b) { return round_to(a / b, P); }
  static double sqrt(double a) { return round_to(std::sqrt(a), P); }
};

template <>
struct Ops<Precision::Double> {
  static double add(double a, double b) { return a + b; }
  static double sub(double a, double b) { return a - b; }
  static double mul(double a, double b) { return a * b; }
  static double div(double a, double b) { return a / b; }
  static double sqrt(double a) { return std::sqrt(a); }
};

template <Precision P>
double pairwise_sum(const double* t, size_t n) {
  if (n == 1) return t[0];
  if (n == 2) return Ops<P>::add(t[0], t[1]);
  const size_t h = n / 2;
  return Ops<P>::add(pairwise_sum<P>(t, h), pairwise_sum<P>(t + h, n - h));
}

template <Precision P>
Vector matvec_impl(const SparseMatrix& A, const Vector& x) {
  Vector y(A.n_rows());
  const auto& rp = A.row_ptr();
  const auto& ci = A.col_idx();
  const auto& v = A.values();
  for (index_t i = 0; i < A.n_rows(); ++i) {
    double acc = 0.0;
    for (index_t k = rp[i]; k < rp[i + 1]; ++k)
      acc = Ops<P>::add(acc, Ops<P>::mul(v[k], x[ci[k]]));
    y[i] = acc;
  }
  return y;
}

template <Precision P>
Vector residual_stage1(const SparseMatrix& A, const Vector& x, const Vector& b) {
  Vector s(A.n_rows());
  const auto& rp = A.row_ptr();
  const auto& ci = A.col_idx();
  const auto& v = A.values();
  for (index_t i = 0; i < A.n_rows(); ++i) {
    double acc = b[i];
    for (index_t k = rp[i]; k < rp[i + 1]; ++k)
      acc = Ops<P>::sub(acc, Ops<P>::mul(v[k], x[ci[k]]));
    s[i] = acc;
  }
  return s;
}

template <Precision P>
double norm2_impl(const Vector& x) {
  double m = 0.0;
  for (double xi : x) m = std::max(m, std::fabs(xi));
  if (m == 0.0 || !std::isfinite(m)) return m;
  Vector sq(x.size());
  for (size_t i = 0; i < x.size(); ++i) {
    const double q = Ops<P>::div(x[i], m);
    sq[i] = Ops<P>::mul(q, q);
  }
  return Ops<P>::mul(m, Ops<P>::sqrt(pairwise_sum<P>(sq.data(), sq.size())));
}

template <Precision P>
double dot_impl(const Vector& x, const Vector& y) {
  if (x.empty()) return 0.0;
  Vector t(x.size());
  for (size_t i = 0; i < x.size(); ++i) t[i] = Ops<P>::mul(x[i], y[i]);
  return pairwise_sum<P>(t.data(), t.size());
}

template <template <Precision> class F, class... Args>
auto dispatch(Precision p, Args&&... args) {
  switch (p) {
    case Precision::Half: return F<Precision::Half>::run(std::forward<Args>(args)...);
    case Precision::Single: return F<Precision::Single>::run(std::forward<Args>(args)...);
    default: return F<Precision::Double>::run(std::forward<Args>(args)...);
  }
}

template <Precision P>
struct MatvecF { static Vector run(const SparseMatrix& A, const Vector& x) { return matvec_impl<P>(A, x); } };
template <Precision P>
struct Stage1F { static Vector run(const SparseMatrix& A, const Vector& x, const Vector& b) { return residual_stage1<P>(A, x, b); } };
template <Precision P>
struct Norm2F { static double run(const Vector& x) { return norm2_impl<P>(x); } };
template <Precision P>
struct DotF { static double run(const Vector& x, const Vector& y) { return dot_impl<P>(x, y); } };

}  // namespace

Vector round_vec(const Vector& x, Precision p) {
  Vector r(x.size());
  for (size_t i = 0; i < x.size(); ++i) r[i] = round_to(x[i], p);
  return r;
}

Vector round_vec(const Vector& x, Precision p, RoundingStats& stats) {
  Vector r(x.size());
  for (size_t i = 0; i < x.size(); ++i) r[i] = round_to(x[i], p, stats);
  return r;
}

Vector matvec(const SparseMatrix& A, const Vector& x, Precision p, RoundingStats* stats) {
  check_len(x.size(), static_cast<size_t>(A.n_cols()), "matvec");
  Vector y = dispatch<MatvecF>(p, A, x);
  if (stats) {
    stats->add_ops(p, 2 * static_cast<std::uint64_t>(A.nnz()));
    for (double yi : y)
      if (std::isinf(yi)) ++stats->overflow_count;
  }
  return y;
}

Vector residual(const SparseMatrix& A, const Vector& x, const Vector& b, Precision u_f,
                Precision u_r, RoundingStats* stats) {
  check_len(x.size(), static_cast<size_t>(A.n_cols()), "residual");
  check_len(b.size(), static_cast<size_t>(A.n_rows()), "residual");
  Vector s = dispatch<Stage1F>(u_f, A, x, b);
  if (stats) {
    stats->add_ops(u_f, 2 * static_cast<std::uint64_t>(A.nnz()));
    return round_vec(s, u_r, *stats);
  }
  return round_vec(s, u_r);
}

Vector axpy(double alpha, const Vector& x, const Vector& y, Precision p, RoundingStats* stats) {
  check_len(x.size(), y.size(), "axpy");
  Vector z(x.size());
  switch (p) {
    case Precision::Half:
      for (size_t i = 0; i < x.size(); ++i)
        z[i] = Ops<Precision::Half>::add(y[i], Ops<Precision::Half>::mul(alpha, x[i]));
      break;
    case Precision::Single:
      for (size_t i = 0; i < x.size(); ++i)
        z[i] = Ops<Precision::Single>::add(y[i], Ops<Precision::Single>::mul(alpha, x[i]));
      break;
    default:
      for (size_t i = 0; i < x.size(); ++i) z[i] = y[i] + alpha * x[i];
  }
  if (stats) stats->add_ops(p, 2 * x.size());
  return z;
}

Vector scale(double alpha, const Vector& x, Precision p, RoundingStats* stats) {
  Vector z(x.size());
  for (size_t i = 0; i < x.size(); ++i) z[i] = rounded_binop(BinOp::Mul, alpha, x[i], p);
  if (stats) stats->add_ops(p, x.size());
  return z;
}

double dot(const Vector& x, const Vector& y, Precision p, RoundingStats* stats) {
  check_len(x.size(), y.size(), "dot");
  if (stats) stats->add_ops(p, 2 * x.size());
  return dispatch<DotF>(p, x, y);
}

double norm2(const Vector& x, Precision p, RoundingStats* stats) {
  if (stats) stats->add_ops(p, 3 * x.size() + 2);
  return dispatch<Norm2F>(p, x);
}

double norm2_64(const Vector& x) {
  double m = 0.0;
  for (double xi : x) m = std::max(m, std::fabs(xi));
  if (m == 0.0 || !std::isfinite(m)) return m;
  double s = 0.0;
  for (double xi : x) {
    const double q = xi / m;
    s += q * q;
  }
  return m * std::sqrt(s);
}

double inf_norm(const Vector& x) {
  double m = 0.0;
  for (double xi : x) m = std::max(m, std::fabs(xi));
  return m;
}

bool all_finite(const Vector& x) {
  for (double xi : x)
    if (!std::isfinite(xi)) return false;
  return true;
}

Vector sub_64(const Vector& a, const Vector& b) {
  check_len(a.size(), b.size(), "sub");
  Vector r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

}  // namespace gadi
