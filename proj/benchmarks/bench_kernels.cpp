#include <benchmark/benchmark.h>

#include "gadi/inner_solver.hpp"
#include "gadi/kernels.hpp"
#include "gadi/problems.hpp"
#include "gadi/splitting.hpp"

using namespace gadi;

namespace {

Precision arg_precision(int64_t i) {
  switch (i) {
    case 0: return Precision::Half;
    case 1: return Precision::Single;
    default: return Precision::Double;
  }
}

}  // namespace

static void BM_Matvec(benchmark::State& state) {
  auto prob = build_convdiff3d({16});
  const Vector x(prob.A.n_rows(), 1.0);
  const Precision p = arg_precision(state.range(0));
  for (auto _ : state) {
    auto y = matvec(prob.A, x, p);
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(state.iterations() * 2 * prob.A.nnz());
  state.SetLabel(name(p));
}
BENCHMARK(BM_Matvec)->Arg(0)->Arg(1)->Arg(2);

static void BM_BandFactorize(benchmark::State& state) {
  auto prob = build_convdiff3d({10});
  auto reg = regularize(hss_split(prob.A), 0.5, 1.0);
  const Precision p = arg_precision(state.range(0));
  for (auto _ : state) {
    auto f = factorize(reg.H, p);
    benchmark::DoNotOptimize(f.lu.get());
  }
  state.SetLabel(name(p));
}
BENCHMARK(BM_BandFactorize)->Arg(0)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

static void BM_BandSolve(benchmark::State& state) {
  auto prob = build_convdiff3d({16});
  auto reg = regularize(hss_split(prob.A), 0.5, 1.0);
  const Precision p = arg_precision(state.range(0));
  auto f = factorize(reg.H, p);
  Vector rhs(prob.A.n_rows(), 1.0);
  for (auto _ : state) {
    auto x = solve_factored(f, rhs);
    benchmark::DoNotOptimize(x.data());
  }
  state.SetLabel(name(p));
}
BENCHMARK(BM_BandSolve)->Arg(0)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);
