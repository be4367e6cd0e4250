#pragma once

#include <filesystem>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ness {

inline constexpr double kInfiniteBeta = std::numeric_limits<double>::infinity();

/// Equilibrium parameters of one reservoir. beta = +inf encodes zero temperature.
struct ReservoirState {
  double beta = 1.0;
  double mu = 0.0;

  bool zero_temperature() const noexcept { return beta == kInfiniteBeta; }
  /// Throws InvalidArgument unless beta > 0 (or +inf) and mu is finite.
  void validate() const;

  friend bool operator==(const ReservoirState &, const ReservoirState &) = default;
};

/// Fermi-Dirac occupation 1/(exp(beta (E - mu)) + 1), overflow free.
double fermi(double energy, const ReservoirState &r);

/// rho_II(E) - rho_I(E), accurate when the two occupations nearly coincide.
double fermi_diff(double energy, const ReservoirState &res_I, const ReservoirState &res_II);

enum class KernelFamily { gaussian, lorentzian, poly_cutoff, table };

std::string to_string(KernelFamily family);
KernelFamily kernel_family_from_string(const std::string &name);

/// Value and first two derivatives of a function of energy.
struct Derivatives {
  double value = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

/// Tunnelling form factor u(k, l) = |w1((-k, II), (l, I))|^2 of two radial momenta.
///
/// Amplitudes are >= 0. Every family factorizes as u(k, l) = h(k^2) h(l^2), so hermitian symmetry
/// u(k, l) = u(l, k) holds exactly. Families:
///   gaussian     h(E) = a exp(-E / s^2)                params {a, s}
///   lorentzian   h(E) = a / (1 + E / s^2)^2            params {a, s}
///   poly_cutoff  h(E) = a (1 - E / kc^2)^n, E < kc^2   params {a, kc, n}
///   table        h(E) = sqrt(t(E)), t a natural cubic spline of (k^2, u(k,k))
class RadialFormFactor {
public:
  static RadialFormFactor gaussian(double amplitude = 1.0, double width = 1.0);
  static RadialFormFactor lorentzian(double amplitude = 1.0, double width = 1.0);
  static RadialFormFactor poly_cutoff(double amplitude, double cutoff, int power);
  /// Samples of the diagonal u(k, k). k strictly increasing, values >= 0, >= 3 samples.
  static RadialFormFactor table(std::vector<double> k, std::vector<double> values);
  /// Two-column CSV "k,value"; a non-numeric first line is treated as a header.
  static RadialFormFactor table_from_csv(const std::filesystem::path &path);

  KernelFamily family() const noexcept { return family_; }
  /// Family parameters in the order documented above (empty for tables).
  const std::vector<double> &params() const noexcept { return params_; }
  /// Table samples (empty for analytic families).
  const std::vector<double> &table_k() const noexcept { return table_k_; }
  const std::vector<double> &table_values() const noexcept { return table_v_; }

  /// u(k, l) for radial momenta k, l >= 0.
  double operator()(double k, double l) const;
  /// h(E); u(k, l) = factor(k^2) * factor(l^2).
  double factor(double energy) const;
  /// u(sqrt(E), sqrt(E)) and its first two derivatives in E.
  Derivatives diagonal(double energy) const;

  /// Energy beyond which u vanishes identically (+inf when unbounded).
  double support_end() const;
  /// Energies where the diagonal is not smooth (quadrature panel edges).
  std::vector<double> breakpoints() const;
  /// Natural energy scale of the kernel (width^2, cutoff^2, table span).
  double energy_scale() const;

  /// Whether int_0^inf k^(2d-3) u(k, k) dk converges without Fermi factors.
  bool integrable(int dimension) const;

  /// Form factor with w scaled by lambda (u scales by lambda^2).
  RadialFormFactor scaled(double lambda) const;

  bool is_zero() const;

private:
  struct Spline;

  RadialFormFactor() = default;

  KernelFamily family_ = KernelFamily::gaussian;
  std::vector<double> params_;
  std::vector<double> table_k_;
  std::vector<double> table_v_;
  double table_scale_ = 1.0; // multiplies the spline (from scaled())
  std::shared_ptr<const Spline> spline_;
};

/// Thermal-contact form factor b(k1, k2, l1, l2) = |w2(-k1, -k2, l1, l2)|^2,
/// built from a radial profile as b = h(k1^2) h(k2^2) h(l1^2) h(l2^2).
class PairFormFactor {
public:
  explicit PairFormFactor(RadialFormFactor profile) : profile_(std::move(profile)) {}

  const RadialFormFactor &profile() const noexcept { return profile_; }

  double operator()(double k1, double k2, double l1, double l2) const;
  /// b evaluated at momenta sqrt(E1), sqrt(E2), sqrt(F1), sqrt(F2).
  double at_energies(double e1, double e2, double f1, double f2) const;

private:
  RadialFormFactor profile_;
};

/// Two reservoirs, their couplings and the interaction kernels. W = g sum_N xi^N W_N.
struct JunctionSpec {
  int dimension = 3;
  ReservoirState res_I;
  ReservoirState res_II;
  std::optional<RadialFormFactor> kernel1;
  std::optional<PairFormFactor> kernel2;
  double g = 1.0;
  double xi = 1.0;

  /// Throws InvalidArgument on broken invariants; warns for d < 3 and for
  /// kernels whose diagonal is not integrable in this dimension.
  void validate() const;

  /// Copy with the reservoirs exchanged.
  JunctionSpec swapped() const;
};

double fermi_diff(double energy, const JunctionSpec &spec);

} // namespace ness
