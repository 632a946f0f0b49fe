// Serial reference vs OpenMP for the three hot loops.
#include <benchmark/benchmark.h>

#include <random>

#include "osgood/kernels.hpp"

namespace {

using namespace osgood;
using kernels::Backend;

const PlissConstruction& construction() {
  static const PlissConstruction pc = [] {
    const Modulus mu = normalize_sqrt_cap(Modulus::from_name("sqrt"));
    const auto cuts = make_cutoffs();
    return PlissConstruction(build_sequences(mu, choose_k0(mu, 200, cuts).k0, 200), cuts);
  }();
  return pc;
}

std::vector<kernels::Point> points(std::size_t n) {
  const auto& S = construction().seqs();
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> t(S.a[1] - 0.01, S.a[S.N]), x(-3.0, 3.0);
  std::vector<kernels::Point> pts(n);
  for (auto& p : pts) p = {t(rng), x(rng), x(rng)};
  return pts;
}

void BM_EvalPoints(benchmark::State& state, Backend backend) {
  const auto pts = points(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::eval_points(construction(), pts, backend));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_LpBlocks(benchmark::State& state, Backend backend) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto part = DyadicPartition::for_grid(2, n);
  const auto u = GridField::random_band(2, n, 0, n / 2.0 - 1, 11);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::lp_blocks(part, u, backend));
}

void BM_MollifySweep(benchmark::State& state, Backend backend) {
  const auto a = sawtooth_family(Modulus::from_name("sqrt"), 10);
  const auto mf = mollify_in_time(a, MollifierKernel(), 1.0 / 64);
  std::vector<double> ts;
  for (int i = 0; i < state.range(0); ++i) ts.push_back(-0.5 + static_cast<double>(i) / state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::mollify_sweep(mf, ts, backend));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

BENCHMARK_CAPTURE(BM_EvalPoints, serial, Backend::Serial)->Arg(100000)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_EvalPoints, openmp, Backend::OpenMP)->Arg(100000)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_LpBlocks, serial, Backend::Serial)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_LpBlocks, openmp, Backend::OpenMP)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_MollifySweep, serial, Backend::Serial)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_MollifySweep, openmp, Backend::OpenMP)->Arg(256)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
