#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "gadi/fp16_fast.hpp"
#include "gadi/precision.hpp"

using namespace gadi;

namespace {

std::vector<double> random_doubles(size_t n, int expo_lo, int expo_hi) {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> mant(1.0, 2.0);
  std::uniform_int_distribution<int> expo(expo_lo, expo_hi);
  std::uniform_int_distribution<int> sign(0, 1);
  std::vector<double> v(n);
  for (auto& x : v) x = (sign(rng) ? -1.0 : 1.0) * std::ldexp(mant(rng), expo(rng));
  return v;
}

}  // namespace

static void BM_RoundToHalf(benchmark::State& state) {
  auto xs = random_doubles(4096, -12, 12);
  for (auto _ : state) {
    double acc = 0.0;
    for (double x : xs) acc += round_to(x, Precision::Half);
    benchmark::DoNotOptimize(acc);
  }
  state.SetItemsProcessed(state.iterations() * xs.size());
}
BENCHMARK(BM_RoundToHalf);

static void BM_RoundToSingle(benchmark::State& state) {
  auto xs = random_doubles(4096, -40, 40);
  for (auto _ : state) {
    double acc = 0.0;
    for (double x : xs) acc += round_to(x, Precision::Single);
    benchmark::DoNotOptimize(acc);
  }
  state.SetItemsProcessed(state.iterations() * xs.size());
}
BENCHMARK(BM_RoundToSingle);

static void BM_HalfSpanUpdate(benchmark::State& state) {
  const auto len = static_cast<size_t>(state.range(0));
  std::vector<float> x(len), l(len);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<float> u(-2.0f, 2.0f);
  for (auto& v : x) v = static_cast<float>(round_to(u(rng), Precision::Half));
  for (auto& v : l) v = static_cast<float>(round_to(u(rng), Precision::Half));
  for (auto _ : state) {
    detail::half_span_update(x.data(), l.data(), 0.5f, static_cast<long long>(len));
    benchmark::DoNotOptimize(x.data());
  }
  state.SetItemsProcessed(state.iterations() * len * 2);
}
BENCHMARK(BM_HalfSpanUpdate)->Arg(256)->Arg(4096);
