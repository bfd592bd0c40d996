#include "gadi/bounds.hpp"

#include <cmath>
#include <limits>

#include "gadi/dense.hpp"
#include "gadi/solver.hpp"

namespace gadi {

std::pair<double, double> forward_factors(double kh, double u, double u_f, double u_r,
                                          double omega, const BoundConstants& c) {
  const double w = 2.0 - omega;
  const double phi2 = c.phi2_of_n;
  const double alpha_F = c.lambda + w * c.theta * kh + phi2 * u +
                         4.0 * w * phi2 * kh * u * (1.0 + u_r) * (1.0 + u_f) +
                         4.0 * w * kh * u_r + 4.0 * w * (1.0 + u_r) * u_f * kh;
  const double beta_F = phi2 * u + 4.0 * w * phi2 * kh * u * (1.0 + u_r) * u_f +
                        8.0 * w * (1.0 + u_r) * u_f * kh;
  return {alpha_F, beta_F};
}

std::pair<double, double> backward_factors(double kh, double u, double u_f, double u_r,
                                           double omega, const BoundConstants& c) {
  const double w = 2.0 - omega;
  const double phi2 = c.phi2_of_n;
  const double alpha_B =
      c.gamma * (c.lambda + w * c.eta * kh + 4.0 * w * kh * u_r + 4.0 * w * kh * (1.0 + u_r) * u_f);
  const double denom = 1.0 - phi2 * u;
  const double beta_B = 8.0 * w * c.gamma * kh * (1.0 + u_r) * u_f + phi2 * c.gamma * u +
                        (denom > 0.0 ? phi2 / denom * u * (1.0 + (1.0 + phi2 * u) * c.gamma)
                                     : std::numeric_limits<double>::infinity());
  return {alpha_B, beta_B};
}

namespace {

// phi(n) kappa u_r / (1 - phi(n) kappa u_r), +inf once the lemma hypothesis
// phi(n) kappa u_r < 1/2 fails.
double lemma_bound(double phi_n, double kappa, double u_r) {
  const double t = phi_n * kappa * u_r;
  if (t >= 0.5) return std::numeric_limits<double>::infinity();
  return t / (1.0 - t);
}

}  // namespace

BoundConstants default_constants(const SparseMatrix& A, const Splitting& s, double alpha,
                                 double omega, double u_r, double kappa2_h, double kappa2_s) {
  BoundConstants c;
  const double n = static_cast<double>(A.n_rows());
  c.phi2_of_n = n;
  c.gamma = 1.1;
  if (A.n_rows() <= kDenseCap) {
    c.lambda = spectral_radius(iteration_matrix(A, s, alpha, omega));
  } else {
    c.lambda = std::numeric_limits<double>::quiet_NaN();  // user-supplied beyond dense_cap
  }
  const double j = lemma_bound(n, kappa2_s, u_r);
  const double l = lemma_bound(n, kappa2_h, u_r);
  c.theta = j + l + j * l;
  c.eta = c.theta;
  return c;
}

BoundReport predict(const SparseMatrix& A, const Splitting& s, double alpha, double omega,
                    const Precisions& prec, const BoundConstants* constants) {
  BoundReport rep;
  auto [smax_m, smin_m] = sigma_extremes(s.M);
  auto [smax_n, smin_n] = sigma_extremes(s.N);
  rep.kappa_hat = kappa_hat_from_sigmas(smax_m, smin_m, smax_n, smin_n, alpha);
  const double kappa2_h = (alpha + smax_m) / (alpha + smin_m);
  const double kappa2_s = (alpha + smax_n) / (alpha + smin_n);

  const double u = unit_roundoff(prec.u), u_f = unit_roundoff(prec.u_f),
               u_r = unit_roundoff(prec.u_r);
  rep.constants = constants ? *constants
                            : default_constants(A, s, alpha, omega, u_r, kappa2_h, kappa2_s);

  std::tie(rep.alpha_F, rep.beta_F) = forward_factors(rep.kappa_hat, u, u_f, u_r, omega, rep.constants);
  std::tie(rep.alpha_B, rep.beta_B) = backward_factors(rep.kappa_hat, u, u_f, u_r, omega, rep.constants);
  rep.predicts_convergence = rep.alpha_F < 1.0 && rep.alpha_B < 1.0;
  rep.limiting_accuracy = rep.alpha_F < 1.0 ? rep.beta_F / (1.0 - rep.alpha_F)
                                            : std::numeric_limits<double>::infinity();
  return rep;
}

}  // namespace gadi
