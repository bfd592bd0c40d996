#include <cmath>
#include <random>

#include "doctest.h"
#include "gadi/errors.hpp"
#include "gadi/kernels.hpp"
#include "gadi/problems.hpp"
#include "gadi/solver.hpp"
#include "test_util.hpp"

using namespace gadi;

TEST_CASE("gadi_ir_solve on A = I: two outer iterations") {
  auto A = SparseMatrix::identity(6);
  Vector b{1.0, -2.0, 3.0, 0.5, 0.0, 4.0};
  auto s = hss_split(A);
  for (auto [ur, u, uf] : {std::array<Precision, 3>{Precision::Double, Precision::Double, Precision::Double},
                           std::array<Precision, 3>{Precision::Half, Precision::Double, Precision::Double},
                           std::array<Precision, 3>{Precision::Half, Precision::Single, Precision::Single}}) {
    GadiConfig cfg;
    cfg.alpha = 1.0;
    cfg.omega = 1.0;
    cfg.xi = 0.1;  // T = alpha/(alpha+1) = 1/2: two halvings reach rres 1/4
    cfg.u_r = ur;
    cfg.u = u;
    cfg.u_f = uf;
    auto res = gadi_ir_solve(A, b, s, cfg);
    CHECK(res.report.status == SolveStatus::Converged);
    CHECK(res.report.outer_iters <= 2);
  }
}

TEST_CASE("report invariants: history shape, converged tolerance, monotone tail") {
  auto prob = build_convdiff3d({4});
  auto s = hss_split(prob.A);
  GadiConfig cfg;
  cfg.alpha = 0.5;
  cfg.xi = 1e-20;
  auto res = gadi_ir_solve(prob.A, prob.b, s, cfg);
  const auto& rep = res.report;
  CHECK(rep.status == SolveStatus::Converged);
  CHECK(rep.rel_residual_history.size() == static_cast<size_t>(rep.outer_iters) + 1);
  CHECK(rep.rel_residual_history[0] == 1.0);
  CHECK(rep.final_rres == rep.rel_residual_history.back());
  CHECK(rep.final_rres * rep.final_rres <= 1e-20);
  REQUIRE(rep.rel_residual_history.size() >= 5);
  for (size_t i = rep.rel_residual_history.size() - 5; i + 1 < rep.rel_residual_history.size(); ++i)
    CHECK(rep.rel_residual_history[i + 1] <= rep.rel_residual_history[i]);
  // solution actually solves the system
  Vector r = residual(prob.A, res.x, prob.b, Precision::Double, Precision::Double);
  CHECK(norm2_64(r) / norm2_64(prob.b) <= 1e-9);
}

TEST_CASE("x0 = exact solution converges in zero iterations") {
  auto prob = build_convdiff3d({3});
  auto s = hss_split(prob.A);
  GadiConfig cfg;
  cfg.alpha = 1.0;
  auto res = gadi_ir_solve(prob.A, prob.b, s, cfg, &prob.x_exact);
  CHECK(res.report.status == SolveStatus::Converged);
  CHECK(res.report.outer_iters == 0);

  auto ref = gadi_reference_solve(prob.A, prob.b, s, 1.0, 1.0, 1e-10, 100, &prob.x_exact);
  CHECK(ref.report.status == SolveStatus::Converged);
  CHECK(ref.report.outer_iters == 0);
}

TEST_CASE("gadi_reference_solve: convdiff and the scalar recurrence") {
  auto prob = build_convdiff3d({4});
  auto s = hss_split(prob.A);
  auto res = gadi_reference_solve(prob.A, prob.b, s, 0.5, 1.0, 1e-11, 20000);
  CHECK(res.report.status == SolveStatus::Converged);
  for (index_t i = 0; i < 64; ++i) CHECK(res.x[i] == doctest::Approx(1.0).epsilon(1e-8));

  // A = 2I: M = 2I, N = 0, alpha = omega = 1: error contracts by
  // (alpha^2 + 0)/((alpha+2)(alpha)) = 1/3 per step.
  auto A2 = SparseMatrix::diagonal(Vector(4, 2.0));
  auto s2 = hss_split(A2);
  Vector b{2.0, 4.0, -2.0, 6.0};
  auto r2 = gadi_reference_solve(A2, b, s2, 1.0, 1.0, 1e-12, 200);
  CHECK(r2.report.status == SolveStatus::Converged);
  const auto& h = r2.report.rel_residual_history;
  REQUIRE(h.size() >= 3);
  CHECK(h[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-10));
  CHECK(h[2] == doctest::Approx(1.0 / 9.0).epsilon(1e-9));
}

TEST_CASE("iteration_matrix: zero splitting, omega=0 2x2 hand check, convdiff rho<1") {
  // M = N = 0 (A = 0): T = I
  auto Z = SparseMatrix::from_triplets(3, 3, {});
  Splitting sz{Z, Z, SplitKind::Explicit};
  auto T0 = iteration_matrix(Z, sz, 0.7, 0.3);
  for (index_t i = 0; i < 3; ++i)
    for (index_t j = 0; j < 3; ++j) CHECK(T0(i, j) == doctest::Approx(i == j ? 1.0 : 0.0));

  // omega = 0, M = A = diag(2,5), N = 0:
  // T = (aI)^-1 (aI+M)^-1 (a^2 I + 0 - a A) = diag((a - m_i) / (a + m_i))
  auto D = SparseMatrix::diagonal({2.0, 5.0});
  Splitting sd{D, SparseMatrix::from_triplets(2, 2, {}), SplitKind::Explicit};
  const double a = 0.8;
  auto T1 = iteration_matrix(D, sd, a, 0.0);
  CHECK(T1(0, 0) == doctest::Approx((a - 2.0) / (a + 2.0)).epsilon(1e-12));
  CHECK(T1(1, 1) == doctest::Approx((a - 5.0) / (a + 5.0)).epsilon(1e-12));
  CHECK(T1(0, 1) == doctest::Approx(0.0));

  auto prob = build_convdiff3d({2});
  auto s = hss_split(prob.A);
  CHECK(spectral_radius(iteration_matrix(prob.A, s, 0.5, 1.0)) < 1.0);
}

TEST_CASE("contraction property: random splittings keep rho(T) < 1") {
  std::mt19937_64 rng(1234);
  std::uniform_real_distribution<double> ua(-2.0, 2.0), uo(0.0, 2.0);
  std::uniform_int_distribution<index_t> un(2, 20);
  for (int trial = 0; trial < 50; ++trial) {
    const index_t n = un(rng);
    auto sys = testutil::random_spd_part_system(rng, n, 0.5, 4.0, 2.0);
    const double alpha = std::pow(10.0, ua(rng));         // (0.01, 100]
    const double omega = std::min(uo(rng), 1.999);        // [0, 2)
    const double rho = spectral_radius(iteration_matrix(sys.A, sys.split, alpha, omega));
    CAPTURE(n);
    CAPTURE(alpha);
    CAPTURE(omega);
    CHECK(rho < 1.0);
  }
}

TEST_CASE("oracle equivalence: uniform-double IR matches the reference iteration") {
  for (index_t n : {2, 3, 4}) {
    auto prob = build_convdiff3d({n});
    auto s = hss_split(prob.A);
    GadiConfig cfg;
    cfg.alpha = 0.5;
    cfg.xi = 1e-26;
    cfg.inner.tol_epsilon = 1e-14;
    cfg.max_outer_iters = 50000;
    auto ir = gadi_ir_solve(prob.A, prob.b, s, cfg);
    auto ref = gadi_reference_solve(prob.A, prob.b, s, 0.5, 1.0, 1e-13, 50000);
    REQUIRE(ir.report.status == SolveStatus::Converged);
    REQUIRE(ref.report.status == SolveStatus::Converged);
    for (size_t i = 0; i < ir.x.size(); ++i)
      CHECK(ir.x[i] == doctest::Approx(ref.x[i]).epsilon(1e-10));
  }
}

TEST_CASE("divergence and overflow are detected, never silent") {
  // x* = 7e4 overflows binary16 during the u=half update stage
  auto A = SparseMatrix::diagonal(Vector(3, 0.001));
  Vector b(3, 70.0);
  auto s = hss_split(A);
  GadiConfig cfg;
  cfg.alpha = 0.001;
  cfg.u_r = cfg.u = cfg.u_f = Precision::Half;
  cfg.xi = 1e-4;
  cfg.max_outer_iters = 4000;
  auto res = gadi_ir_solve(A, b, s, cfg);
  CHECK(res.report.status == SolveStatus::OverflowDetected);
  CHECK(res.report.rel_residual_history.size() ==
        static_cast<size_t>(res.report.outer_iters) + 1);

  // max_outer cap is reported as MaxIters
  auto prob = build_convdiff3d({3});
  auto s2 = hss_split(prob.A);
  GadiConfig slow;
  slow.alpha = 0.01;
  slow.xi = 1e-26;
  slow.max_outer_iters = 5;
  auto capped = gadi_ir_solve(prob.A, prob.b, s2, slow);
  CHECK(capped.report.status == SolveStatus::MaxIters);
  CHECK(capped.report.outer_iters == 5);

  // stall window fires when the residual stops improving (half floor, no scaling)
  GadiConfig st;
  st.alpha = 10.0;
  st.u_r = Precision::Half;
  st.xi = 1e-26;
  st.stall_window = 200;
  st.max_outer_iters = 20000;
  st.residual_scaling = false;
  auto stalled = gadi_ir_solve(prob.A, prob.b, s2, st);
  CHECK(stalled.report.status == SolveStatus::Stalled);
  CHECK(stalled.report.final_rres > 1e-13);
}

TEST_CASE("krylov inner solves drive the outer loop below the scaled target") {
  // cg serves the SPD H; the skew-shifted S degrades to gmres. With residual
  // scaling the inner stop norm follows the scaling frame, so a tight inner
  // epsilon lets the refinement run deep.
  auto prob = build_convdiff3d({4});
  auto s = hss_split(prob.A);
  GadiConfig cfg;
  cfg.alpha = 0.5;
  cfg.xi = 1e-18;
  cfg.inner.method = InnerMethod::Cg;
  cfg.inner.tol_epsilon = 1e-12;
  cfg.inner.max_inner_iters = 3000;
  cfg.max_outer_iters = 10000;
  cfg.residual_scaling = true;
  auto res = gadi_ir_solve(prob.A, prob.b, s, cfg);
  CHECK(res.report.status == SolveStatus::Converged);
  CHECK(res.report.final_rres <= 1e-9);
  CHECK(res.report.inner_iter_totals > 0);
}

TEST_CASE("solves are bitwise deterministic") {
  auto prob = build_convdiff3d({5});
  auto s = hss_split(prob.A);
  GadiConfig cfg;
  cfg.alpha = 0.5;
  cfg.u_r = Precision::Half;
  cfg.xi = 1e-20;
  cfg.stall_window = 300;
  cfg.residual_scaling = false;
  auto a = gadi_ir_solve(prob.A, prob.b, s, cfg);
  auto b = gadi_ir_solve(prob.A, prob.b, s, cfg);
  CHECK(a.x == b.x);
  CHECK(a.report.outer_iters == b.report.outer_iters);
  CHECK(a.report.rel_residual_history == b.report.rel_residual_history);
}

TEST_CASE("config validation") {
  auto prob = build_convdiff3d({2});
  auto s = hss_split(prob.A);
  GadiConfig cfg;
  cfg.alpha = -1.0;
  CHECK_THROWS_AS(gadi_ir_solve(prob.A, prob.b, s, cfg), ParameterError);
  cfg.alpha = 1.0;
  cfg.omega = 2.0;
  CHECK_THROWS_AS(gadi_ir_solve(prob.A, prob.b, s, cfg), ParameterError);
  cfg.omega = 1.0;
  cfg.u = Precision::Half;
  cfg.u_f = Precision::Double;  // violates u <= u_f <= u_r
  cfg.u_r = Precision::Double;
  CHECK_THROWS_AS(gadi_ir_solve(prob.A, prob.b, s, cfg), ParameterError);
}

TEST_CASE("limiting accuracy: the floor follows u, the rate follows u_r") {
  // At alpha = 10 on a small instance, u = double runs reach far lower
  // residuals than u = single runs regardless of u_r.
  auto prob = build_convdiff3d({6});
  auto s = hss_split(prob.A);
  auto run = [&](Precision ur, Precision u, Precision uf, double xi) {
    GadiConfig cfg;
    cfg.alpha = 10.0;
    cfg.xi = xi;
    cfg.u_r = ur;
    cfg.u = u;
    cfg.u_f = uf;
    cfg.max_outer_iters = 20000;
    cfg.stall_window = 400;
    return gadi_ir_solve(prob.A, prob.b, s, cfg);
  };
  auto hdd = run(Precision::Half, Precision::Double, Precision::Double, 1e-20);
  auto sdd = run(Precision::Single, Precision::Double, Precision::Double, 1e-20);
  auto sss = run(Precision::Single, Precision::Single, Precision::Single, 1e-8);
  CHECK(hdd.report.status == SolveStatus::Converged);
  CHECK(sdd.report.status == SolveStatus::Converged);
  CHECK(sss.report.final_rres >= 1e4 * hdd.report.final_rres);
  CHECK(sss.report.final_rres >= 1e4 * sdd.report.final_rres);
}
