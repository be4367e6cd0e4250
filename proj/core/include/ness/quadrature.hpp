#pragma once

#include "ness/model.hpp"

#include <functional>
#include <span>
#include <vector>

namespace ness {

struct QuadratureConfig {
  double rel_tol = 1e-10;
  double abs_tol = 1e-14;
  /// E_max = max(mu_I, mu_II, 0) + tail_constant / min(beta_I, beta_II).
  double tail_constant = 40.0;
  int max_subdivisions = 2000;
  /// Gauss-Legendre points per panel.
  int rule_order = 15;

  void validate() const;
};

struct QuadratureResult {
  double value = 0.0;
  /// Sum of per-panel |coarse - refined| estimates.
  double error = 0.0;
  /// Integral of |f| over the same panels (scale for cancellation-prone integrands).
  double magnitude = 0.0;
  int subdivisions = 0;
};

/// Surface area 2 pi^(d/2) / Gamma(d/2) of the unit sphere in R^d.
double sphere_area(int dimension);

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
GaussLegendreRule gauss_legendre(int order);

/// Adaptive Gauss-Legendre with bisection. Panels start at the given
/// breakpoints; refinement picks the panel with the largest error (ties by
/// creation id) so the result is bit-stable.
/// Success means error <= rel_tol |value| + abs_tol; otherwise NonConvergent.
QuadratureResult integrate_1d(const std::function<double(double)> &f, double a, double b,
                              const QuadratureConfig &cfg,
                              std::span<const double> breakpoints = {});

/// Upper energy cutoff for Fermi-weighted integrals of this junction.
double cutoff_energy(const JunctionSpec &spec, const QuadratureConfig &cfg);

/// Panel edges used for shell integrals on [0, e_max]: chemical potentials,
/// thermal layers around them, kernel kinks and a geometric grading toward 0.
std::vector<double> shell_breakpoints(const JunctionSpec &spec, double e_max);

/// int d^dk d^dl delta(|k|^2 - |l|^2) u(|k|, |l|) F(|k|^2)
///   = (S_{d-1}^2 / 4) int_0^{E_max} E^(d-2) u(sqrt E, sqrt E) F(E) dE.
/// Requires kernel1.
QuadratureResult shell_integral_detail(const std::function<double(double)> &F,
                                       const JunctionSpec &spec, const QuadratureConfig &cfg);
double shell_integral(const std::function<double(double)> &F, const JunctionSpec &spec,
                      const QuadratureConfig &cfg);

/// int_0^E dE1 int_0^E dE2 int_0^{min(E1+E2, E)} dF1 f(E1, E2, F1), E = e_max.
/// Iterated adaptive quadrature; inner tolerances are relative to the
/// integral of |f| so cancelling integrands converge.
QuadratureResult integrate_3d_simplex(const std::function<double(double, double, double)> &f,
                                      double e_max, const QuadratureConfig &cfg,
                                      std::span<const double> breakpoints = {});

} // namespace ness
