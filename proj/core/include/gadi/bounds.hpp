#pragma once

// Convergence-rate and limiting-accuracy factor evaluators: given a splitting,
// alpha, and a precision triple, report whether convergence is predicted and
// to what accuracy floor. Diagnostics only; the solver never consults them.

#include "gadi/precision.hpp"
#include "gadi/splitting.hpp"

namespace gadi {

struct BoundConstants {
  double lambda = 0.0;     // contraction bound for the iteration matrix, < 1
  double theta = 0.0;      // ||J|| + ||L|| + ||J|| ||L|| aggregate (forward)
  double eta = 0.0;        // analog for the backward analysis
  double gamma = 1.1;      // iterate-norm ratio ||x(k)|| <= gamma ||x(k+1)||
  double phi2_of_n = 0.0;  // update-rounding constant phi_2(n), default n
};

struct BoundReport {
  double alpha_F = 0.0, beta_F = 0.0;
  double alpha_B = 0.0, beta_B = 0.0;
  double limiting_accuracy = 0.0;  // beta_F / (1 - alpha_F), +inf if alpha_F >= 1
  bool predicts_convergence = false;
  double kappa_hat = 0.0;
  BoundConstants constants;
};

/// alpha_F, beta_F of the forward analysis, evaluated term by term.
std::pair<double, double> forward_factors(double kappa_hat_val, double u, double u_f, double u_r,
                                          double omega, const BoundConstants& c);

/// alpha_B, beta_B of the backward analysis.
std::pair<double, double> backward_factors(double kappa_hat_val, double u, double u_f, double u_r,
                                           double omega, const BoundConstants& c);

/// Default constants for a concrete splitting: lambda from the spectral
/// radius of the iteration matrix (n <= dense_cap), theta/eta from the
/// perturbation-lemma bounds with phi(n) = n (pessimistic), gamma = 1.1,
/// phi_2(n) = n. kappa2_h/kappa2_s are the 2-norm condition numbers of the
/// regularized operators.
BoundConstants default_constants(const SparseMatrix& A, const Splitting& s, double alpha,
                                 double omega, double u_r, double kappa2_h, double kappa2_s);

struct Precisions {
  Precision u_r = Precision::Double;
  Precision u = Precision::Double;
  Precision u_f = Precision::Double;
};

/// Compose kappa_hat and both factor pairs into a report. When `constants`
/// is null the defaults above are computed from the splitting.
BoundReport predict(const SparseMatrix& A, const Splitting& s, double alpha, double omega,
                    const Precisions& prec, const BoundConstants* constants = nullptr);

}  // namespace gadi
