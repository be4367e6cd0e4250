#include "ness/oracle.hpp"

#include <benchmark/benchmark.h>

namespace {

ness::LatticeParams chain(int n) {
  ness::LatticeParams p;
  p.n_I = n;
  p.n_II = n;
  return p;
}

void BM_BuildJunction(benchmark::State &state) {
  const ness::LatticeParams p = chain(static_cast<int>(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(ness::build_junction(p));
}
BENCHMARK(BM_BuildJunction)->Arg(50)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_EvolveOneStep(benchmark::State &state) {
  const ness::LatticeJunction j = ness::build_junction(chain(static_cast<int>(state.range(0))));
  const ness::CorrelationMatrix g0 = ness::initial_state(j, {2.0, 1.0}, {1.0, 1.0});
  for (auto _ : state)
    benchmark::DoNotOptimize(ness::evolve(j, g0, 10.0));
}
BENCHMARK(BM_EvolveOneStep)->Arg(50)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_RunShortTrace(benchmark::State &state) {
  const ness::LatticeJunction j = ness::build_junction(chain(100));
  ness::RunOptions o;
  o.t_max = 20.0;
  for (auto _ : state)
    benchmark::DoNotOptimize(ness::run(j, {2.0, 1.0}, {1.0, 1.0}, o));
}
BENCHMARK(BM_RunShortTrace)->Unit(benchmark::kMillisecond);

} // namespace
