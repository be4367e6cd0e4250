#pragma once

#include "ness/model.hpp"
#include "ness/quadrature.hpp"

#include <span>
#include <vector>

namespace ness {

/// Power pair (k, l) of g^k xi^l carried by a perturbative term.
struct OrderTag {
  int g_power = 0;
  int xi_power = 0;
  friend bool operator==(const OrderTag &, const OrderTag &) = default;
};

/// Lowest nonvanishing tunnelling order. Currents are gains of reservoir I.
struct TransportResult {
  double J22 = 0.0;
  double P22 = 0.0;
  /// (beta_I - beta_II) P22 - (beta_I mu_I - beta_II mu_II) J22; NaN if a beta is infinite.
  double E22 = 0.0;
  std::vector<OrderTag> orders;
};

// The first-order terms vanish identically because the product state is
// invariant under the phase rotation generated by N_I: omega0([N_I, W_l]) = 0.
inline constexpr double kJ11 = 0.0;
inline constexpr double kJ12 = 0.0;
inline constexpr double kP11 = 0.0;
inline constexpr double kP12 = 0.0;

/// g^2 xi^2 2 pi shell_integral(rho_II - rho_I).
double particle_current_J22(const JunctionSpec &spec, const QuadratureConfig &cfg = {});
/// g^2 xi^2 2 pi shell_integral(E (rho_II - rho_I)).
double energy_current_P22(const JunctionSpec &spec, const QuadratureConfig &cfg = {});
/// Requires finite inverse temperatures.
double entropy_rate_E22(const JunctionSpec &spec, const QuadratureConfig &cfg = {});
TransportResult tunnelling_transport(const JunctionSpec &spec, const QuadratureConfig &cfg = {});

/// f(r) = (pi/2) S_{d-1}^2 r^(d-2) u(sqrt r, sqrt r), which is 8 pi^3 r u in d = 3,
/// with analytic first and second derivatives.
Derivatives f_of_r(double r, const RadialFormFactor &kernel, int dimension = 3);

struct Resistance {
  double value = 0.0;
  /// Set when no states at the Fermi level couple (R = +inf).
  bool infinite = false;
};

/// R(mu, beta) for unit couplings: 1/R = 2 pi beta shell_integral(e^x / (e^x + 1)^2),
/// x = beta (E - mu). At beta = +inf, R = 1/f(mu).
Resistance resistance(double mu, double beta, const RadialFormFactor &kernel,
                      const QuadratureConfig &cfg = {}, int dimension = 3);

/// Low-temperature expansion 1 / (f(mu) + pi^2 T^2 f''(mu) / 6) in d = 3.
/// Warns when beta mu < 5; throws DegenerateKernel if the denominator is <= 0.
double resistance_sommerfeld(double mu, double beta, const RadialFormFactor &kernel);

struct OhmRow {
  double dmu = 0.0;
  double J22 = 0.0;
  /// g^2 xi^2 dmu / R(mu, beta).
  double prediction = 0.0;
  double residual = 0.0;
};

/// Current-voltage table at equal temperatures with mu_II = mu_I + dmu.
std::vector<OhmRow> ohm_check(const JunctionSpec &spec, std::span<const double> dmus,
                              const QuadratureConfig &cfg = {});

struct OnsagerResult {
  double step = 0.0;
  double dP_dDnu = 0.0;
  double minus_dJ_dDbeta = 0.0;
  /// dP/dDnu + dJ/dDbeta.
  double gap = 0.0;
  /// Richardson error estimate of the coarser of the two derivatives, relative.
  double richardson_error = 0.0;
};

/// Central differences at equilibrium in the parametrization beta_I = beta,
/// beta_II = beta - Dbeta, nu = beta_I mu_I, Dnu = beta_I mu_I - beta_II mu_II.
/// Throws StepTooLarge when the step-halving estimate exceeds half the signal.
OnsagerResult onsager_check(double beta, double nu, const RadialFormFactor &kernel, double h,
                            const QuadratureConfig &cfg = {}, int dimension = 3);

/// Value both Onsager derivatives share at equilibrium:
/// -2 pi shell_integral(E e^x / (e^x + 1)^2), x = beta (E - nu / beta).
double onsager_coefficient(double beta, double nu, const RadialFormFactor &kernel,
                           const QuadratureConfig &cfg = {}, int dimension = 3);

struct ThermalPower {
  double value = 0.0;
  /// Same prefactor times the integral of the absolute integrand.
  double magnitude = 0.0;
  double error = 0.0;
};

/// Fourth-order energy flow through a thermal contact (kernel2, d = 3):
/// g^2 xi^4 2 pi (2 pi)^4 int dE1 dE2 dF1 sqrt(E1 E2 F1 F2) b (E1 - F1)
///   rho_I(F1) rho_II(F2) (1 - rho_I(E1) - rho_II(E2)),  F2 = E1 + E2 - F1.
ThermalPower thermal_power_P24(const JunctionSpec &spec, const QuadratureConfig &cfg = {});

} // namespace ness
