#include <benchmark/benchmark.h>

#include "gadi/problems.hpp"
#include "gadi/solver.hpp"

using namespace gadi;

// Full GADI-IR iterations per second on a mid-size instance, per inner
// precision. Reported time covers one outer iteration on average.
static void BM_GadiIrOuterIteration(benchmark::State& state) {
  auto prob = build_convdiff3d({12});
  auto s = hss_split(prob.A);
  GadiConfig cfg;
  cfg.alpha = 0.5;
  cfg.u_r = state.range(0) == 0 ? Precision::Half : Precision::Double;
  cfg.xi = 1e-30;  // unreachable: run exactly max_outer_iters iterations
  cfg.max_outer_iters = 32;
  cfg.residual_scaling = true;
  long long iters = 0;
  for (auto _ : state) {
    auto res = gadi_ir_solve(prob.A, prob.b, s, cfg);
    iters += res.report.outer_iters;
    benchmark::DoNotOptimize(res.x.data());
  }
  state.SetItemsProcessed(iters);
  state.SetLabel(cfg.u_r == Precision::Half ? "u_r=half" : "u_r=double");
}
BENCHMARK(BM_GadiIrOuterIteration)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

static void BM_SylvesterOuterIteration(benchmark::State& state) {
  auto prob = build_sylvester({64, 0.1});
  GadiConfig cfg;
  cfg.alpha = 0.5;
  cfg.u_r = Precision::Half;
  cfg.xi = 1e-30;
  cfg.max_outer_iters = 64;
  cfg.residual_scaling = true;
  long long iters = 0;
  for (auto _ : state) {
    auto res = gadi_ab_solve(prob, cfg);
    iters += res.report.outer_iters;
    benchmark::DoNotOptimize(res.X.data().data());
  }
  state.SetItemsProcessed(iters);
}
BENCHMARK(BM_SylvesterOuterIteration)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
