#include "gadi/gpr.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "gadi/errors.hpp"
#include "gadi/solver.hpp"

namespace gadi {

std::pair<double, int> alpha_bisection(const ProblemBuilder& builder, index_t size_param,
                                       Precision fmt, double alpha_lo, double alpha_hi, int budget,
                                       const DichotomySettings& settings) {
  if (!(alpha_lo > 0.0) || !(alpha_hi > alpha_lo))
    throw ParameterError("alpha_bisection: need 0 < alpha_lo < alpha_hi");
  if (budget < 3) throw ParameterError("alpha_bisection: budget >= 3 required");

  const LinearProblem prob = builder(size_param);
  const double ratio = alpha_hi / alpha_lo;

  double best_alpha = 0.0;
  long long best_iters = std::numeric_limits<long long>::max();
  for (int i = 0; i < budget; ++i) {
    const double a =
        alpha_lo * std::pow(ratio, static_cast<double>(i) / static_cast<double>(budget - 1));
    GadiConfig cfg;
    cfg.alpha = a;
    cfg.omega = 1.0;
    cfg.xi = settings.train_xi;
    cfg.u_r = cfg.u = cfg.u_f = fmt;
    cfg.inner = settings.inner;
    cfg.max_outer_iters = settings.max_outer;
    const GadiResult res = gadi_ir_solve(prob.A, prob.b, prob.split, cfg);
    if (res.report.status == SolveStatus::Converged &&
        static_cast<long long>(res.report.outer_iters) < best_iters) {
      best_iters = res.report.outer_iters;
      best_alpha = a;
    }
  }
  if (best_alpha == 0.0)
    throw NoConvergentAlpha("no alpha in [" + std::to_string(alpha_lo) + ", " +
                            std::to_string(alpha_hi) + "] converged at size " +
                            std::to_string(size_param));
  return {best_alpha, static_cast<int>(best_iters)};
}

TrainingSet generate_training_set(const ProblemBuilder& builder,
                                  const std::vector<index_t>& size_params, Precision fmt,
                                  const DichotomySettings& settings) {
  TrainingSet ts;
  ts.generation_precision = fmt;
  for (index_t sp : size_params) {
    const index_t dim = builder(sp).A.n_rows();
    auto [alpha, iters] = alpha_bisection(builder, sp, fmt, settings.alpha_lo, settings.alpha_hi,
                                          settings.budget, settings);
    ts.pairs.push_back({dim, alpha, iters});
  }
  std::sort(ts.pairs.begin(), ts.pairs.end(),
            [](const TrainingPair& a, const TrainingPair& b) { return a.size_n < b.size_n; });
  for (size_t i = 1; i < ts.pairs.size(); ++i)
    if (ts.pairs[i].size_n == ts.pairs[i - 1].size_n)
      throw ParameterError("generate_training_set: duplicate sizes");
  return ts;
}

namespace {

double sq_exp(double x1, double x2, double sigma_f2, double length) {
  const double d = (x1 - x2) / length;
  return sigma_f2 * std::exp(-0.5 * d * d);
}

struct FitCandidate {
  double lml = -std::numeric_limits<double>::infinity();
  double sigma_f2 = 0.0, length = 0.0, sigma_n2 = 0.0;
  Eigen::MatrixXd L;
  Eigen::VectorXd kinv_y;
};

bool try_fit(const std::vector<double>& x, const Eigen::VectorXd& y, double sigma_f2,
             double length, double sigma_n2, FitCandidate& out) {
  const auto n = static_cast<Eigen::Index>(x.size());
  Eigen::MatrixXd K(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) K(i, j) = sq_exp(x[i], x[j], sigma_f2, length);
  K.diagonal().array() += sigma_n2 + 1e-12 * std::max(1.0, sigma_f2);
  Eigen::LLT<Eigen::MatrixXd> llt(K);
  if (llt.info() != Eigen::Success) return false;
  const Eigen::VectorXd a = llt.solve(y);
  double logdet = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) logdet += std::log(llt.matrixL()(i, i));
  const double lml = -0.5 * y.dot(a) - logdet - 0.5 * static_cast<double>(n) * std::log(2.0 * M_PI);
  if (!std::isfinite(lml)) return false;
  out.lml = lml;
  out.sigma_f2 = sigma_f2;
  out.length = length;
  out.sigma_n2 = sigma_n2;
  out.L = llt.matrixL();
  out.kinv_y = a;
  return true;
}

}  // namespace

GprModel fit(const TrainingSet& ts, const FitOptions& opts) {
  if (ts.pairs.size() < 3) throw FitError("fit: at least 3 training pairs required");
  GprModel m;
  for (const auto& p : ts.pairs) {
    if (!(p.alpha_opt > 0.0)) throw FitError("fit: alpha targets must be positive");
    m.inputs.push_back(std::log(static_cast<double>(p.size_n)));
    m.targets.push_back(p.alpha_opt);
  }
  const auto n = static_cast<Eigen::Index>(m.inputs.size());
  double mean = 0.0;
  for (double t : m.targets) mean += t;
  mean /= static_cast<double>(n);
  m.target_mean = mean;
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) y(i) = m.targets[i] - mean;

  double var = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) var += y(i) * y(i);
  var = std::max(var / static_cast<double>(n), 1e-8);
  const double span = m.inputs.back() - m.inputs.front();
  const double spacing = std::max(span / static_cast<double>(n - 1), 1e-3);

  FitCandidate best;
  for (double sf : {0.25 * var, 1.0 * var, 4.0 * var})
    for (double ell : {0.5 * spacing, 1.0 * spacing, 2.0 * spacing})
      for (double sn : opts.sigma_n2 ? std::vector<double>{*opts.sigma_n2}
                                     : std::vector<double>{1e-10 * var, 1e-8 * var, 1e-6 * var}) {
        FitCandidate cand;
        if (try_fit(m.inputs, y, sf, ell, sn, cand) && cand.lml > best.lml) best = std::move(cand);
      }
  if (!std::isfinite(best.lml))
    throw FitError("fit: Gram matrix not positive definite for any hyperparameter choice");

  m.sigma_f2 = best.sigma_f2;
  m.length = best.length;
  m.sigma_n2 = best.sigma_n2;
  m.chol.assign(best.L.data(), best.L.data() + n * n);
  m.kinv_y.assign(best.kinv_y.data(), best.kinv_y.data() + n);
  m.fitted = true;
  return m;
}

std::pair<double, double> predict_alpha(const GprModel& m, index_t size_n) {
  if (!m.fitted) throw FitError("predict_alpha: model not fitted");
  const auto n = static_cast<Eigen::Index>(m.inputs.size());
  const double x = std::log(static_cast<double>(size_n));
  Eigen::VectorXd ks(n);
  for (Eigen::Index i = 0; i < n; ++i) ks(i) = sq_exp(x, m.inputs[i], m.sigma_f2, m.length);
  Eigen::Map<const Eigen::VectorXd> kinv_y(m.kinv_y.data(), n);
  double mean = m.target_mean + ks.dot(kinv_y);

  Eigen::Map<const Eigen::MatrixXd> L(m.chol.data(), n, n);
  const Eigen::VectorXd v = L.triangularView<Eigen::Lower>().solve(ks);
  // Predictive variance (latent + noise).
  double var = m.sigma_f2 + m.sigma_n2 - v.squaredNorm();
  var = std::max(var, 0.0);

  double tmin = *std::min_element(m.targets.begin(), m.targets.end());
  mean = std::max(mean, tmin / 10.0);
  return {mean, std::sqrt(var)};
}

TrainingSet retrain_extend(const GprModel& m, const TrainingSet& ts,
                           const std::vector<index_t>& new_sizes) {
  if (!m.fitted) throw FitError("retrain_extend: model not fitted");
  TrainingSet out = ts;
  for (index_t s : new_sizes) {
    bool present = false;
    for (const auto& p : out.pairs) present = present || p.size_n == s;
    if (present) continue;
    auto [alpha, std_dev] = predict_alpha(m, s);
    (void)std_dev;
    out.pairs.push_back({s, alpha, 0});
  }
  std::sort(out.pairs.begin(), out.pairs.end(),
            [](const TrainingPair& a, const TrainingPair& b) { return a.size_n < b.size_n; });
  return out;
}

void write_training_csv(std::ostream& out, const TrainingSet& ts) {
  out << "n,alpha,iters,precision\n";
  char buf[96];
  for (const auto& p : ts.pairs) {
    std::snprintf(buf, sizeof(buf), "%lld,%.17g,%d,%s\n", static_cast<long long>(p.size_n),
                  p.alpha_opt, p.iters_at_opt, name(ts.generation_precision));
    out << buf;
  }
}

TrainingSet read_training_csv(std::istream& in) {
  TrainingSet ts;
  std::string line;
  if (!std::getline(in, line)) throw IoError("training csv: empty stream");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string tok;
    TrainingPair p;
    std::getline(ls, tok, ',');
    p.size_n = std::stoll(tok);
    std::getline(ls, tok, ',');
    p.alpha_opt = std::stod(tok);
    std::getline(ls, tok, ',');
    p.iters_at_opt = std::stoi(tok);
    std::getline(ls, tok, ',');
    ts.generation_precision = precision_from_name(tok);
    ts.pairs.push_back(p);
  }
  return ts;
}

}  // namespace gadi
