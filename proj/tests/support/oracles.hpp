#pragma once

// Reference integrators that share no code with the library's quadrature.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>

namespace ness::testing {

inline constexpr double kPi = 3.14159265358979323846;

/// Composite Simpson rule on [a, b] with n (even) intervals.
inline double simpson(const std::function<double(double)> &f, double a, double b, std::size_t n) {
  const double h = (b - a) / static_cast<double>(n);
  double sum = f(a) + f(b);
  for (std::size_t i = 1; i < n; ++i)
    sum += (i % 2 ? 4.0 : 2.0) * f(a + h * static_cast<double>(i));
  return sum * h / 3.0;
}

/// Composite trapezoid rule on [a, b] with n intervals.
inline double trapezoid(const std::function<double(double)> &f, double a, double b, std::size_t n) {
  const double h = (b - a) / static_cast<double>(n);
  double sum = 0.5 * (f(a) + f(b));
  for (std::size_t i = 1; i < n; ++i)
    sum += f(a + h * static_cast<double>(i));
  return sum * h;
}

inline double logistic(double beta, double e, double mu) {
  const double x = beta * (e - mu);
  return x > 0 ? std::exp(-x) / (1.0 + std::exp(-x)) : 1.0 / (1.0 + std::exp(x));
}

/// 8 pi^3 int E u(E) (rho_II - rho_I) for the unit Gaussian, u = exp(-2E), d = 3.
inline double gaussian_current_reference(double bI, double mI, double bII, double mII, bool energy) {
  return simpson(
      [=](double e) {
        const double w = e * std::exp(-2.0 * e) * (logistic(bII, e, mII) - logistic(bI, e, mI));
        return 8.0 * kPi * kPi * kPi * (energy ? e * w : w);
      },
      0.0, 60.0, 1000000);
}

/// 1/R = 8 pi^3 beta int r u(r) e^x / (e^x + 1)^2 for the unit Gaussian.
inline double gaussian_conductance_reference(double mu, double beta) {
  return simpson(
      [=](double r) {
        const double p = logistic(beta, r, mu);
        return 8.0 * kPi * kPi * kPi * beta * r * std::exp(-2.0 * r) * p * (1.0 - p);
      },
      0.0, 60.0, 1000000);
}

/// Monte-Carlo volume of {E1, E2 in [0, E], F1 in [0, min(E1 + E2, E)]}.
inline double simplex_volume_monte_carlo(double e_max, std::size_t samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, e_max);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < samples; ++i) {
    const double e1 = u(rng), e2 = u(rng), f1 = u(rng);
    if (f1 <= e1 + e2)
      ++hits;
  }
  return e_max * e_max * e_max * static_cast<double>(hits) / static_cast<double>(samples);
}

} // namespace ness::testing
