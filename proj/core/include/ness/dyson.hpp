#pragma once

#include "ness/model.hpp"

#include <complex>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

namespace ness {

/// Finite expansion f = sum_q c_q phi_{q_1} x ... x phi_{q_M} in M variables.
class HermiteSeries {
public:
  using Index = std::vector<int>;
  using Coefficient = std::complex<double>;

  /// Every axis index must stay <= truncation.
  HermiteSeries(int variables, int truncation);

  int variables() const noexcept { return variables_; }
  int truncation() const noexcept { return truncation_; }
  const std::map<Index, Coefficient> &coefficients() const noexcept { return coeffs_; }

  /// Overwrites; a zero coefficient removes the entry.
  void set(const Index &q, Coefficient c);
  Coefficient get(const Index &q) const;

  /// L2 norm, sqrt(sum |c_q|^2).
  double l2_norm() const;

  /// phi_0 in every variable.
  static HermiteSeries ground_state(int variables);
  /// phi_0(x - y) in one variable, truncated.
  static HermiteSeries shifted_ground_state(double shift, int truncation);

private:
  void check(const Index &q) const;

  int variables_;
  int truncation_;
  std::map<Index, Coefficient> coeffs_;
};

/// 2^(-3M/2) sqrt(sum |c_q|^2 prod_k (2 q_k + 2)^3), the quadratic form of
/// prod_k (-d^2/dx_k^2 + x_k^2 + 1)^3.
double sobolev_norm(const HermiteSeries &f);

/// Same form with x_k^2 replaced by (x_k - y_k)^2, evaluated exactly in the
/// ladder algebra (x phi_n = sqrt((n+1)/2) phi_{n+1} + sqrt(n/2) phi_{n-1}).
double sobolev_norm_translated(const HermiteSeries &f, std::span<const double> shift);

struct ShiftSearch {
  double lower = -6.0;
  double upper = 6.0;
  /// Grid points per axis for the coarse scan.
  int coarse_points = 25;
  /// Golden-section stopping width.
  double tolerance = 1e-6;
  /// Coordinate sweeps over all axes.
  int sweeps = 4;
};

struct SeminormResult {
  double value = 0.0;
  std::vector<double> shift;
};

/// inf over shifts of sobolev_norm_translated, approximated by coordinate
/// descent (coarse grid then golden section per axis) started at y = 0.
/// The result never exceeds sobolev_norm(f); global optimality is not claimed.
SeminormResult seminorm_translation_invariant(const HermiteSeries &f, const ShiftSearch &search = {});

struct InteractionTerm {
  int order = 1; // N, the number of creation (and annihilation) operators
  /// Number of reservoir-label blocks carrying the kernel.
  int blocks = 1;
  /// Weighted norm of the coupling-scaled kernel in one block.
  double per_block = 0.0;
  /// N 2^((d+2)N) blocks per_block.
  double value = 0.0;
};

struct InteractionNorm {
  int dimension = 3;
  std::vector<InteractionTerm> terms;
  double total = 0.0;
};

struct InteractionNormOptions {
  /// Hermite indices per axis kept in the projection.
  int truncation = 40;
  /// Tail share of the squared norm above which TruncationInsufficient is thrown.
  double tail_limit = 1e-2;
  /// Project Gaussians per axis; false sends every family through the tensor grid.
  bool separable_gaussian = true;
  /// Extra terms (N, per-block norm, blocks) entered directly.
  std::vector<InteractionTerm> extra;
};

/// Weighted norm of the momentum-space kernel sqrt(h(|k|^2)) on R^d. The
/// weight operator commutes with the Fourier transform, so this equals the
/// norm of the position-space profile. Gaussians are projected per axis;
/// other families on a tensor grid.
double radial_profile_norm(const RadialFormFactor &kernel, int dimension,
                           const InteractionNormOptions &options = {});

/// ||W||' for a junction: the tunnelling kernel (N = 1, two blocks: II<-I and
/// I<-II) and optionally the thermal kernel (N = 2, four label orderings),
/// each scaled by |g xi^N|, plus any extra terms.
InteractionNorm interaction_norm(const JunctionSpec &spec, const InteractionNormOptions &options = {});

/// 8 pi d / (d - 2) = int (1 ^ 4 pi/|t|)^(d/2) dt. Throws DimensionTooLow for d <= 2.
double time_decay_constant(int dimension);
/// The defining integral evaluated by quadrature.
double time_decay_integral(int dimension);

struct Certificate {
  int dimension = 3;
  double interaction_norm = 0.0;
  /// (8 pi d / (d - 2)) ||W||'.
  double x = 0.0;
  bool converges = false;

  /// sum_{m > m0} x^m / m, empty when x >= 1.
  std::optional<double> tail_bound(int m0) const;
  /// (1/m) (8 pi d/(d-2))^m ||a||' ||W||'^m.
  double term_bound(int m, double observable_norm = 1.0) const;
};

Certificate certify(const InteractionNorm &norm);

/// (1/m) (8 pi d/(d-2))^m ||a||' ||W||'^m.
double theorem_bound(int m, const InteractionNorm &norm, double observable_norm);

/// JSON object with x, verdict, bounds for m = 1..max_order and the tail after m0.
void write_certificate_json(std::ostream &out, const Certificate &cert, int m0 = 3,
                            int max_order = 10, double observable_norm = 1.0);

} // namespace ness
