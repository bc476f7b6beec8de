// Kernel timings: stencils, reductions, the nonlinear right-hand side, a full
// RK4 step, the generator bank and the null-condition decision.

#include "nullwave/energetics.hpp"
#include "nullwave/grid.hpp"
#include "nullwave/lemmas.hpp"
#include "nullwave/nullform.hpp"
#include "nullwave/parallel.hpp"
#include "nullwave/solver.hpp"
#include "nullwave/vectorfields.hpp"

#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

using namespace nullwave;

namespace {

FieldSnapshot bump(const GridSpec& g) {
  return FieldSnapshot::sample(g, 0.0, [](double x, double y, double z) {
    const double w = 1.0 - (x * x + y * y + z * z) / 4.0;
    return w > 0 ? w * w * w * w : 0.0;
  });
}

SpacetimeJet evolving_jet(const GridSpec& g) {
  BumpField f;
  f.bumps.push_back(Bump{{0.0, 0.0, 0.0}, 2.0, 1.0});
  return linear_jet(g, f, 0.5, 0.4 * g.h);
}

void BM_FirstDerivative(benchmark::State& state) {
  const auto g = GridSpec::make(static_cast<int>(state.range(0)), 4.0);
  const auto f = bump(g);
  std::vector<double> out(g.size());
  for (auto _ : state) {
    for (int a = 1; a <= 3; ++a) d1_into(f.values(), out, g, a);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(3 * g.size()));
}
BENCHMARK(BM_FirstDerivative)->Arg(48)->Arg(64)->Arg(96)->Unit(benchmark::kMillisecond);

void BM_Laplacian(benchmark::State& state) {
  const auto g = GridSpec::make(static_cast<int>(state.range(0)), 4.0);
  const auto kind = state.range(1) ? LaplacianKind::compact : LaplacianKind::composed;
  const auto f = bump(g);
  std::vector<double> out(g.size()), scratch(2 * g.size());
  for (auto _ : state) {
    laplacian_into(f.values(), out, g, kind, scratch);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(g.size()));
}
BENCHMARK(BM_Laplacian)->ArgsProduct({{48, 96}, {0, 1}})->Unit(benchmark::kMillisecond);

void BM_PairwiseSum(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = std::sin(0.001 * static_cast<double>(i));
  for (auto _ : state)
    benchmark::DoNotOptimize(parallel::pairwise_sum(n, [&](std::size_t i) { return x[i] * x[i]; }));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_PairwiseSum)->Arg(1 << 16)->Arg(1 << 20);

void BM_QuasilinearRhs(benchmark::State& state) {
  const auto g = GridSpec::make(static_cast<int>(state.range(0)), 4.0);
  QuasilinearOperator op(g, canonical_tensor(CanonicalKind::q0_quasilinear), LaplacianKind::composed);
  const auto u = bump(g).scaled(0.05);
  std::vector<double> v(g.size(), 0.0), out(g.size());
  for (auto _ : state) {
    benchmark::DoNotOptimize(op.evaluate(u.values(), v, out));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(g.size()));
}
BENCHMARK(BM_QuasilinearRhs)->Arg(48)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_Rk4Step(benchmark::State& state) {
  const auto g = GridSpec::make(static_cast<int>(state.range(0)), 4.0);
  const auto b = canonical_tensor(CanonicalKind::q0_quasilinear);
  const auto s0 = initial_state(g, make_cauchy_data(1.0, 0.05, Profile::poly_bump), 0.4 * g.h);
  for (auto _ : state) {
    auto s = step_rk4(s0, b);
    benchmark::DoNotOptimize(s.u.values().data());
  }
}
BENCHMARK(BM_Rk4Step)->Arg(48)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_GeneratorBank(benchmark::State& state) {
  const auto g = GridSpec::make(static_cast<int>(state.range(0)), 4.0);
  const auto jet = evolving_jet(g);
  const auto bank = enumerate_multiindices(2);
  for (auto _ : state)
    for (const auto& a : bank) {
      auto out = apply_multi(a, jet);
      benchmark::DoNotOptimize(out.values().data());
    }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(bank.size()));
}
BENCHMARK(BM_GeneratorBank)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_EnergySample(benchmark::State& state) {
  const auto g = GridSpec::make(static_cast<int>(state.range(0)), 4.0);
  const auto jet = evolving_jet(g);
  for (auto _ : state) benchmark::DoNotOptimize(energy_Es(jet, 2).Es);
}
BENCHMARK(BM_EnergySample)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_NullDefect(benchmark::State& state) {
  const auto b = canonical_tensor(CanonicalKind::john_nonnull);
  const auto method = state.range(0) ? DefectMethod::sampled : DefectMethod::exact;
  for (auto _ : state) benchmark::DoNotOptimize(null_defect(b, method, 512));
}
BENCHMARK(BM_NullDefect)->Arg(0)->Arg(1);

} // namespace

BENCHMARK_MAIN();
