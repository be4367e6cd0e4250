#include "ness/transport.hpp"

#include "ness/diagnostics.hpp"
#include "ness/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace ness {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

JunctionSpec checked(const JunctionSpec &spec) {
  spec.validate();
  if (!spec.kernel1)
    throw MissingKernel("tunnelling currents need kernel1");
  return spec;
}

double second_order_prefactor(const JunctionSpec &spec) {
  return spec.g * spec.g * spec.xi * spec.xi * kTwoPi;
}

// e^x / (e^x + 1)^2, symmetric in x.
double thermal_window(double x) {
  const double c = std::cosh(0.5 * x);
  return std::isinf(c) ? 0.0 : 0.25 / (c * c);
}

// c * r^n with the convention 0 * r^n = 0 even at r = 0.
double power_term(double c, double r, int n) {
  if (c == 0.0)
    return 0.0;
  return c * std::pow(r, n);
}

JunctionSpec equilibrium_spec(int dimension, double mu, double beta,
                              const RadialFormFactor &kernel) {
  JunctionSpec spec;
  spec.dimension = dimension;
  spec.res_I = {beta, mu};
  spec.res_II = {beta, mu};
  spec.kernel1 = kernel;
  return spec;
}

} // namespace

double particle_current_J22(const JunctionSpec &spec, const QuadratureConfig &cfg) {
  const JunctionSpec s = checked(spec);
  if (s.res_I == s.res_II)
    return 0.0;
  const double v =
      shell_integral([&](double e) { return fermi_diff(e, s.res_I, s.res_II); }, s, cfg);
  return second_order_prefactor(s) * v;
}

double energy_current_P22(const JunctionSpec &spec, const QuadratureConfig &cfg) {
  const JunctionSpec s = checked(spec);
  if (s.res_I == s.res_II)
    return 0.0;
  const double v =
      shell_integral([&](double e) { return e * fermi_diff(e, s.res_I, s.res_II); }, s, cfg);
  return second_order_prefactor(s) * v;
}

namespace {

double entropy_from_currents(const JunctionSpec &spec, double j, double p) {
  const ReservoirState &a = spec.res_I;
  const ReservoirState &b = spec.res_II;
  return (a.beta - b.beta) * p - (a.beta * a.mu - b.beta * b.mu) * j;
}

} // namespace

double entropy_rate_E22(const JunctionSpec &spec, const QuadratureConfig &cfg) {
  if (spec.res_I.zero_temperature() || spec.res_II.zero_temperature())
    throw InvalidArgument("entropy production needs finite inverse temperatures");
  return entropy_from_currents(spec, particle_current_J22(spec, cfg),
                               energy_current_P22(spec, cfg));
}

TransportResult tunnelling_transport(const JunctionSpec &spec, const QuadratureConfig &cfg) {
  TransportResult r;
  r.J22 = particle_current_J22(spec, cfg);
  r.P22 = energy_current_P22(spec, cfg);
  if (spec.res_I.zero_temperature() || spec.res_II.zero_temperature())
    r.E22 = std::numeric_limits<double>::quiet_NaN();
  else
    r.E22 = entropy_from_currents(spec, r.J22, r.P22);
  r.orders = {{2, 2}};
  return r;
}

Derivatives f_of_r(double r, const RadialFormFactor &kernel, int dimension) {
  if (dimension < 1)
    throw InvalidArgument("dimension must be >= 1");
  if (r < 0.0)
    return {};
  const double s = sphere_area(dimension);
  const double c = 0.5 * std::numbers::pi * s * s;
  const int n = dimension - 2;
  const Derivatives g = kernel.diagonal(r);
  Derivatives f;
  // f = c r^n g, f' = c (n r^(n-1) g + r^n g'), f'' = c (n(n-1) r^(n-2) g + 2n r^(n-1) g' + r^n g'')
  f.value = c * power_term(g.value, r, n);
  f.d1 = c * (power_term(n * g.value, r, n - 1) + power_term(g.d1, r, n));
  f.d2 = c * (power_term(n * (n - 1) * g.value, r, n - 2) +
              power_term(2.0 * n * g.d1, r, n - 1) + power_term(g.d2, r, n));
  return f;
}

Resistance resistance(double mu, double beta, const RadialFormFactor &kernel,
                      const QuadratureConfig &cfg, int dimension) {
  ReservoirState{beta, mu}.validate();
  double conductance = 0.0;
  if (std::isinf(beta)) {
    conductance = f_of_r(mu, kernel, dimension).value;
  } else {
    const JunctionSpec spec = equilibrium_spec(dimension, mu, beta, kernel);
    conductance =
        kTwoPi * beta *
        shell_integral([&](double e) { return thermal_window(beta * (e - mu)); }, spec, cfg);
  }
  if (!(conductance > 0.0))
    return {std::numeric_limits<double>::infinity(), true};
  return {1.0 / conductance, false};
}

double resistance_sommerfeld(double mu, double beta, const RadialFormFactor &kernel) {
  ReservoirState{beta, mu}.validate();
  if (beta * mu < 5.0)
    warn("Sommerfeld expansion used with beta*mu = " + std::to_string(beta * mu) +
         " < 5; corrections of order exp(-beta*mu) are not small");
  const Derivatives f = f_of_r(mu, kernel, 3);
  const double t = std::isinf(beta) ? 0.0 : 1.0 / beta;
  const double denom = f.value + std::numbers::pi * std::numbers::pi * t * t * f.d2 / 6.0;
  if (!(denom > 0.0))
    throw DegenerateKernel("Sommerfeld denominator f(mu) + pi^2 T^2 f''(mu)/6 is not positive");
  return 1.0 / denom;
}

std::vector<OhmRow> ohm_check(const JunctionSpec &spec, std::span<const double> dmus,
                              const QuadratureConfig &cfg) {
  const JunctionSpec base = checked(spec);
  if (base.res_I.beta != base.res_II.beta)
    throw InvalidArgument("Ohm check needs equal inverse temperatures");
  const double mu = base.res_I.mu;
  const Resistance r = resistance(mu, base.res_I.beta, *base.kernel1, cfg, base.dimension);
  const double coupling = base.g * base.g * base.xi * base.xi;

  std::vector<OhmRow> rows;
  rows.reserve(dmus.size());
  for (double dmu : dmus) {
    JunctionSpec s = base;
    s.res_II.mu = mu + dmu;
    OhmRow row;
    row.dmu = dmu;
    row.J22 = particle_current_J22(s, cfg);
    row.prediction = r.infinite ? 0.0 : coupling * dmu / r.value;
    row.residual = row.J22 - row.prediction;
    rows.push_back(row);
  }
  return rows;
}

namespace {

struct OnsagerProbe {
  int dimension;
  double beta;
  double nu;
  const RadialFormFactor &kernel;
  const QuadratureConfig &cfg;

  JunctionSpec at(double dbeta, double dnu) const {
    JunctionSpec s;
    s.dimension = dimension;
    s.res_I = {beta, nu / beta};
    s.res_II = {beta - dbeta, (nu - dnu) / (beta - dbeta)};
    s.kernel1 = kernel;
    return s;
  }
  double dP_dDnu(double h) const {
    return (energy_current_P22(at(0.0, h), cfg) - energy_current_P22(at(0.0, -h), cfg)) /
           (2.0 * h);
  }
  double dJ_dDbeta(double h) const {
    return (particle_current_J22(at(h, 0.0), cfg) - particle_current_J22(at(-h, 0.0), cfg)) /
           (2.0 * h);
  }
};

} // namespace

OnsagerResult onsager_check(double beta, double nu, const RadialFormFactor &kernel, double h,
                            const QuadratureConfig &cfg, int dimension) {
  if (!(beta > 0.0) || std::isinf(beta) || !std::isfinite(nu))
    throw InvalidArgument("Onsager check needs finite beta > 0 and finite nu");
  if (!(h > 0.0) || !(h < beta))
    throw InvalidArgument("Onsager step must satisfy 0 < h < beta");
  const OnsagerProbe probe{dimension, beta, nu, kernel, cfg};

  const double p_h = probe.dP_dDnu(h);
  const double p_half = probe.dP_dDnu(0.5 * h);
  const double j_h = probe.dJ_dDbeta(h);
  const double j_half = probe.dJ_dDbeta(0.5 * h);

  OnsagerResult r;
  r.step = h;
  r.dP_dDnu = p_h;
  r.minus_dJ_dDbeta = -j_h;
  r.gap = p_h + j_h;
  // Central differences: D(h) - D(h/2) ~ (3/4) c h^2.
  const double scale = std::max(std::abs(p_h), std::abs(j_h));
  const double err = (4.0 / 3.0) * std::max(std::abs(p_h - p_half), std::abs(j_h - j_half));
  r.richardson_error = scale > 0.0 ? err / scale : 0.0;
  if (r.richardson_error > 0.5)
    throw StepTooLarge("Onsager finite-difference step too large", r.richardson_error);
  return r;
}

double onsager_coefficient(double beta, double nu, const RadialFormFactor &kernel,
                           const QuadratureConfig &cfg, int dimension) {
  if (!(beta > 0.0) || std::isinf(beta) || !std::isfinite(nu))
    throw InvalidArgument("Onsager coefficient needs finite beta > 0 and finite nu");
  const double mu = nu / beta;
  const JunctionSpec spec = equilibrium_spec(dimension, mu, beta, kernel);
  return -kTwoPi *
         shell_integral([&](double e) { return e * thermal_window(beta * (e - mu)); }, spec, cfg);
}

namespace {

// w(E, F) - w(F, E) for w(E, F) = rho_I(F1) rho_II(F2) (1 - rho_I(E1) - rho_II(E2)) on the
// shell E1 + E2 = F1 + F2. The products rho rho rho rho cancel exactly and the remainder is
// rho_I(E1) rho_II(E2) (1 - rho_I(F1)) (1 - rho_II(F2)) expm1((beta_I - beta_II)(E1 - F1)).
double occupation_asymmetry(double e1, double e2, double f1, double f2, const ReservoirState &ri,
                            const ReservoirState &rii) {
  const double x = (ri.beta - rii.beta) * (e1 - f1);
  if (ri.beta == rii.beta && !ri.zero_temperature())
    return 0.0;
  if (std::isfinite(x) && std::abs(x) < 700.0) {
    return fermi(e1, ri) * fermi(e2, rii) * (1.0 - fermi(f1, ri)) * (1.0 - fermi(f2, rii)) *
           std::expm1(x);
  }
  auto w = [&](double a1, double a2, double b1, double b2) {
    return fermi(b1, ri) * fermi(b2, rii) * (1.0 - fermi(a1, ri) - fermi(a2, rii));
  };
  return w(e1, e2, f1, f2) - w(f1, f2, e1, e2);
}

} // namespace

ThermalPower thermal_power_P24(const JunctionSpec &spec, const QuadratureConfig &cfg) {
  spec.validate();
  if (!spec.kernel2)
    throw MissingKernel("thermal contact power needs kernel2");
  if (spec.dimension != 3)
    throw InvalidArgument("thermal contact power is implemented for d = 3 only");
  const PairFormFactor &b = *spec.kernel2;
  const RadialFormFactor &h = b.profile();
  const ReservoirState &ri = spec.res_I;
  const ReservoirState &rii = spec.res_II;

  const double e_max = std::min(cutoff_energy(spec, cfg), h.support_end());

  // The domain is restricted to F2 <= e_max so that it is invariant under the
  // label swap (E1, E2) <-> (F1, F2); the integrand is then replaced by its
  // swap average, which b's symmetry reduces to (E1 - F1) times the occupation
  // asymmetry. Identical reservoirs give an integrand that vanishes pointwise.
  auto integrand = [&](double e1, double e2, double f1) {
    const double f2 = e1 + e2 - f1;
    if (f2 <= 0.0 || f1 <= 0.0 || f2 > e_max)
      return 0.0;
    const double weight = b.at_energies(e1, e2, f1, f2);
    if (weight == 0.0)
      return 0.0;
    return 0.5 * std::sqrt(e1 * e2 * f1 * f2) * weight * (e1 - f1) *
           occupation_asymmetry(e1, e2, f1, f2, ri, rii);
  };

  std::vector<double> bps{e_max};
  for (const ReservoirState *r : {&ri, &rii}) {
    bps.push_back(r->mu);
    if (!r->zero_temperature())
      for (double j : {2.0, 8.0}) {
        bps.push_back(r->mu - j / r->beta);
        bps.push_back(r->mu + j / r->beta);
      }
  }
  for (double x : h.breakpoints())
    bps.push_back(x);

  const QuadratureResult q = integrate_3d_simplex(integrand, e_max, cfg, bps);
  const double pre = spec.g * spec.g * std::pow(spec.xi, 4) * kTwoPi * std::pow(kTwoPi, 4);
  return {pre * q.value, pre * q.magnitude, pre * q.error};
}

} // namespace ness
