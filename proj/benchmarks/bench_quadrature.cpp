#include "ness/quadrature.hpp"

#include <benchmark/benchmark.h>

#include <cmath>

namespace {

void BM_GaussLegendreNodes(benchmark::State &state) {
  const int order = static_cast<int>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(ness::gauss_legendre(order));
}
BENCHMARK(BM_GaussLegendreNodes)->Arg(7)->Arg(15)->Arg(31);

void BM_Adaptive1dOscillatory(benchmark::State &state) {
  ness::QuadratureConfig cfg;
  cfg.rel_tol = std::pow(10.0, -static_cast<double>(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(
        ness::integrate_1d([](double x) { return std::cos(30 * x) * std::exp(-x); }, 0.0, 10.0, cfg));
}
BENCHMARK(BM_Adaptive1dOscillatory)->Arg(6)->Arg(10)->Arg(13);

void BM_ShellIntegralGaussian(benchmark::State &state) {
  ness::JunctionSpec spec;
  spec.kernel1 = ness::RadialFormFactor::gaussian();
  spec.res_II.mu = 0.5;
  for (auto _ : state)
    benchmark::DoNotOptimize(ness::shell_integral(
        [&](double e) { return ness::fermi_diff(e, spec); }, spec, {}));
}
BENCHMARK(BM_ShellIntegralGaussian);

} // namespace
