#pragma once

// Data-driven regularization-parameter prediction: dichotomy search for a
// relatively optimal alpha on small instances solved in reduced precision,
// Gaussian-process regression from system size to alpha, and the
// retraining-set loop that feeds predictions back as pseudo-data.

#include <functional>
#include <iosfwd>
#include <optional>

#include "gadi/inner_solver.hpp"
#include "gadi/splitting.hpp"

namespace gadi {

struct TrainingPair {
  index_t size_n = 0;     // system dimension
  double alpha_opt = 0.0;
  int iters_at_opt = 0;   // 0 marks a pseudo-pair added by retraining
};

struct TrainingSet {
  std::vector<TrainingPair> pairs;  // sizes strictly increasing
  Precision generation_precision = Precision::Single;
};

struct LinearProblem {
  SparseMatrix A;
  Vector b;
  Splitting split;
};

/// Maps a family-specific size parameter to a concrete instance.
using ProblemBuilder = std::function<LinearProblem(index_t)>;

struct DichotomySettings {
  double alpha_lo = 1e-2;
  double alpha_hi = 1e2;
  int budget = 21;         // log-grid probes between alpha_lo and alpha_hi
  double train_xi = 1e-8;  // outer tolerance of the training solves
  int max_outer = 1500;    // probes that exceed this score as non-convergent
  InnerSolverSpec inner;
};

/// Probe a fixed logarithmic grid of `budget` alphas, scoring each by the
/// outer iteration count of a uniform-precision (u_r = u = u_f = fmt) solve;
/// non-convergent probes score +inf and ties break toward smaller alpha.
/// Throws NoConvergentAlpha when every probe fails.
std::pair<double, int> alpha_bisection(const ProblemBuilder& builder, index_t size_param,
                                       Precision fmt, double alpha_lo, double alpha_hi, int budget,
                                       const DichotomySettings& settings = {});

/// One alpha_bisection per size parameter; pair sizes record the built system
/// dimensions.
TrainingSet generate_training_set(const ProblemBuilder& builder,
                                  const std::vector<index_t>& size_params, Precision fmt,
                                  const DichotomySettings& settings = {});

struct GprModel {
  std::vector<double> inputs;   // log(size)
  std::vector<double> targets;  // alpha
  double target_mean = 0.0;
  double sigma_f2 = 1.0;  // squared-exponential signal variance
  double length = 1.0;    // length scale on log(size)
  double sigma_n2 = 1e-8;
  bool fitted = false;
  std::vector<double> chol;    // lower Cholesky factor of K + sigma_n^2 I
  std::vector<double> kinv_y;  // (K + sigma_n^2 I)^{-1} (y - mean)
};

struct FitOptions {
  /// Fix the noise variance instead of searching the grid for it.
  std::optional<double> sigma_n2;
};

/// Hyperparameters by log-marginal-likelihood search over the fixed grid
///   sigma_f^2 in {0.25, 1, 4} * var(y),
///   length   in {0.5, 1, 2} * mean input spacing,
///   sigma_n^2 in {1e-10, 1e-8, 1e-6} * var(y),
/// with var(y) floored at 1e-8. Requires >= 3 pairs; throws FitError when the
/// Gram matrix is not positive definite after jitter.
GprModel fit(const TrainingSet& ts, const FitOptions& opts = {});

/// Posterior mean and predictive standard deviation at log(size); the mean is
/// clamped to at least (smallest training alpha)/10.
std::pair<double, double> predict_alpha(const GprModel& m, index_t size_n);

/// Append (size, predicted alpha) pseudo-pairs for the given sizes; sizes
/// already present are left untouched.
TrainingSet retrain_extend(const GprModel& m, const TrainingSet& ts,
                           const std::vector<index_t>& new_sizes);

// CSV with header "n,alpha,iters,precision".
void write_training_csv(std::ostream& out, const TrainingSet& ts);
TrainingSet read_training_csv(std::istream& in);

}  // namespace gadi
