#include "ness/transport.hpp"

#include <benchmark/benchmark.h>

namespace {

ness::JunctionSpec spec(double beta_II, double mu_II) {
  ness::JunctionSpec s;
  s.kernel1 = ness::RadialFormFactor::gaussian();
  s.res_II = {beta_II, mu_II};
  return s;
}

void BM_TunnellingTransport(benchmark::State &state) {
  const ness::JunctionSpec s = spec(2.0, 0.5);
  for (auto _ : state)
    benchmark::DoNotOptimize(ness::tunnelling_transport(s));
}
BENCHMARK(BM_TunnellingTransport);

void BM_ResistanceLowTemperature(benchmark::State &state) {
  const auto g = ness::RadialFormFactor::gaussian();
  const double beta = static_cast<double>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(ness::resistance(1.0, beta, g));
}
BENCHMARK(BM_ResistanceLowTemperature)->Arg(1)->Arg(50)->Arg(1000);

void BM_OnsagerCheck(benchmark::State &state) {
  const auto g = ness::RadialFormFactor::gaussian();
  for (auto _ : state)
    benchmark::DoNotOptimize(ness::onsager_check(1.0, 1.0, g, 1e-3));
}
BENCHMARK(BM_OnsagerCheck);

// The simplex integral dominates; the loose tolerance keeps one iteration near a second.
void BM_ThermalPowerLoose(benchmark::State &state) {
  ness::JunctionSpec s = spec(20.0, 1.0);
  s.res_I.mu = 1.0;
  s.kernel2 = ness::PairFormFactor(ness::RadialFormFactor::gaussian());
  ness::QuadratureConfig cfg;
  cfg.rel_tol = 1e-4;
  cfg.rule_order = 5;
  for (auto _ : state)
    benchmark::DoNotOptimize(ness::thermal_power_P24(s, cfg));
}
BENCHMARK(BM_ThermalPowerLoose)->Unit(benchmark::kMillisecond)->Iterations(2);

} // namespace
