#include "ness/errors.hpp"
#include "ness/quadrature.hpp"
#include "ness/transport.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace ness;
using ness::testing::kPi;

namespace {

JunctionSpec gaussian_spec(double bI, double mI, double bII, double mII) {
  JunctionSpec s;
  s.kernel1 = RadialFormFactor::gaussian();
  s.res_I = {bI, mI};
  s.res_II = {bII, mII};
  return s;
}

} // namespace

TEST_CASE("sphere areas") {
  CHECK(sphere_area(1) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(sphere_area(2) == doctest::Approx(2 * kPi).epsilon(1e-15));
  CHECK(sphere_area(3) == doctest::Approx(4 * kPi).epsilon(1e-15));
  CHECK(sphere_area(4) == doctest::Approx(2 * kPi * kPi).epsilon(1e-15));
}

TEST_CASE("gauss-legendre rules integrate polynomials exactly") {
  const GaussLegendreRule r = gauss_legendre(7);
  double sum = 0.0, x12 = 0.0;
  for (std::size_t i = 0; i < r.nodes.size(); ++i) {
    sum += r.weights[i];
    x12 += r.weights[i] * std::pow(r.nodes[i], 12);
  }
  CHECK(sum == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(x12 == doctest::Approx(2.0 / 13.0).epsilon(1e-14));
}

TEST_CASE("integrate_1d closed forms") {
  const QuadratureConfig cfg;
  CHECK(integrate_1d([](double) { return 1.0; }, 0.0, 1.0, cfg).value ==
        doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::abs(integrate_1d([](double x) { return std::sin(x); }, 0.0, kPi, cfg).value - 2.0) <
        1e-12);
  CHECK(std::abs(integrate_1d([](double x) { return std::exp(-x); }, 0.0, 40.0, cfg).value -
                 (1.0 - std::exp(-40.0))) < 1e-12);
}

TEST_CASE("integrate_1d reports an error estimate within tolerance") {
  QuadratureConfig cfg;
  cfg.rel_tol = 1e-9;
  const QuadratureResult r =
      integrate_1d([](double x) { return std::exp(-x * x) * std::cos(3 * x); }, -8.0, 8.0, cfg);
  CHECK(r.error <= cfg.rel_tol * std::abs(r.value) + cfg.abs_tol);
  CHECK(r.value == doctest::Approx(std::sqrt(kPi) * std::exp(-9.0 / 4.0)).epsilon(1e-12));
}

TEST_CASE("integrate_1d raises NonConvergent with the estimate") {
  QuadratureConfig cfg;
  cfg.max_subdivisions = 4;
  cfg.rel_tol = 1e-14;
  try {
    integrate_1d([](double x) { return 1.0 / std::sqrt(std::abs(x - 0.3)); }, 0.0, 1.0, cfg);
    FAIL("expected NonConvergent");
  } catch (const NonConvergent &e) {
    CHECK(e.estimate() > 0.0);
    CHECK(std::isfinite(e.value()));
    CHECK(e.kind() == "NonConvergent");
  }
}

TEST_CASE("halving rel_tol never increases the reported error") {
  const auto f = [](double x) { return std::exp(-x) / (1.0 + x * x) + std::sqrt(x); };
  double previous = INFINITY;
  for (double tol = 1e-4; tol >= 1e-12; tol /= 2) {
    QuadratureConfig cfg;
    cfg.rel_tol = tol;
    const QuadratureResult r = integrate_1d(f, 0.0, 10.0, cfg);
    CHECK(r.error <= previous);
    previous = r.error;
  }
  const JunctionSpec spec = gaussian_spec(1.0, 0.0, 2.0, 0.4);
  previous = INFINITY;
  for (double tol = 1e-6; tol >= 1e-12; tol /= 2) {
    QuadratureConfig cfg;
    cfg.rel_tol = tol;
    const QuadratureResult r =
        shell_integral_detail([&](double e) { return fermi_diff(e, spec); }, spec, cfg);
    CHECK(r.error <= previous);
    previous = r.error;
  }
}

TEST_CASE("integrate_1d is bitwise deterministic") {
  const auto f = [](double x) { return std::sin(20 * x) * std::exp(-x); };
  const QuadratureResult a = integrate_1d(f, 0.0, 5.0, {});
  const QuadratureResult b = integrate_1d(f, 0.0, 5.0, {});
  CHECK(a.value == b.value);
  CHECK(a.error == b.error);
  CHECK(a.subdivisions == b.subdivisions);
}

TEST_CASE("shell integral of zero is zero") {
  CHECK(shell_integral([](double) { return 0.0; }, gaussian_spec(1, 0, 1, 0), {}) == 0.0);
}

TEST_CASE("shell integral of a flat kernel on the unit ball") {
  JunctionSpec spec;
  spec.kernel1 = RadialFormFactor::poly_cutoff(1.0, 1.0, 0);
  CHECK(shell_integral([](double) { return 1.0; }, spec, {}) ==
        doctest::Approx(2 * kPi * kPi).epsilon(1e-12));
}

TEST_CASE("shell form of the conductance matches the radial resistance integral") {
  for (double beta : {0.5, 1.0, 4.0}) {
    const double mu = 1.0;
    JunctionSpec spec = gaussian_spec(beta, mu, beta, mu);
    const double shell = 2 * kPi * shell_integral(
                                       [&](double e) {
                                         const double p = testing::logistic(beta, e, mu);
                                         return beta * p * (1.0 - p);
                                       },
                                       spec, {});
    CHECK(shell == doctest::Approx(testing::gaussian_conductance_reference(mu, beta)).epsilon(1e-9));
  }
}

TEST_CASE("shell integral is linear") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> coef(-2.0, 2.0);
  const JunctionSpec spec = gaussian_spec(1.5, 0.2, 0.7, -0.1);
  for (int i = 0; i < 5; ++i) {
    const double alpha = coef(rng), c1 = coef(rng), c2 = coef(rng);
    const auto F = [&](double e) { return c1 * fermi_diff(e, spec); };
    const auto G = [&](double e) { return c2 * e * fermi(e, spec.res_I); };
    const double lhs = shell_integral([&](double e) { return alpha * F(e) + G(e); }, spec, {});
    const double rhs = alpha * shell_integral(F, spec, {}) + shell_integral(G, spec, {});
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
  }
}

TEST_CASE("doubling the tail constant does not move Fermi-weighted results") {
  const JunctionSpec spec = gaussian_spec(2.0, 0.0, 1.0, 0.0);
  QuadratureConfig wide;
  wide.tail_constant = 80.0;
  CHECK(particle_current_J22(spec, wide) ==
        doctest::Approx(particle_current_J22(spec, {})).epsilon(1e-10));
  CHECK(energy_current_P22(spec, wide) ==
        doctest::Approx(energy_current_P22(spec, {})).epsilon(1e-10));
}

TEST_CASE("cutoff energy policy") {
  const JunctionSpec spec = gaussian_spec(2.0, 1.0, 4.0, 3.0);
  CHECK(cutoff_energy(spec, {}) == doctest::Approx(3.0 + 40.0 / 2.0));
  const JunctionSpec cold = gaussian_spec(kInfiniteBeta, 1.0, kInfiniteBeta, -1.0);
  CHECK(std::isfinite(cutoff_energy(cold, {})));
}

TEST_CASE("zero temperature shells split at the Fermi level") {
  const JunctionSpec spec = gaussian_spec(kInfiniteBeta, 0.5, kInfiniteBeta, 1.5);
  const auto bp = shell_breakpoints(spec, cutoff_energy(spec, {}));
  CHECK(std::find(bp.begin(), bp.end(), 0.5) != bp.end());
  CHECK(std::find(bp.begin(), bp.end(), 1.5) != bp.end());
  // int_{0.5}^{1.5} E e^{-2E} dE in closed form.
  const auto prim = [](double e) { return -(2 * e + 1) * std::exp(-2 * e) / 4; };
  CHECK(shell_integral([&](double e) { return fermi_diff(e, spec); }, spec, {}) ==
        doctest::Approx(4 * kPi * kPi * (prim(1.5) - prim(0.5))).epsilon(1e-12));
}

TEST_CASE("simplex integral of zero") {
  CHECK(integrate_3d_simplex([](double, double, double) { return 0.0; }, 1.0, {}).value == 0.0);
}

TEST_CASE("simplex volume agrees with a Monte-Carlo oracle") {
  QuadratureConfig cfg;
  cfg.rel_tol = 1e-8;
  const double v = integrate_3d_simplex([](double, double, double) { return 1.0; }, 1.0, cfg).value;
  const double mc = testing::simplex_volume_monte_carlo(1.0, 10000000, 42);
  CHECK(v == doctest::Approx(mc).epsilon(1e-3));
}

TEST_CASE("swap-odd simplex integrand vanishes") {
  QuadratureConfig cfg;
  cfg.rel_tol = 1e-6;
  cfg.rule_order = 7;
  const QuadratureResult r = integrate_3d_simplex(
      [](double e1, double e2, double f1) { return (e1 - f1) * std::exp(-(e1 + e2)); }, 60.0, cfg);
  CHECK(std::abs(r.value) < 1e-9 * r.magnitude);
}

TEST_CASE("quadrature config validation") {
  QuadratureConfig cfg;
  cfg.rel_tol = 0.0;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  cfg = {};
  cfg.rule_order = 1;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
}
