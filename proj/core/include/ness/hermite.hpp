#pragma once

#include <Eigen/Dense>

#include <complex>
#include <vector>

namespace ness {

/// Normalized Hermite function phi_q(x) = (2^q q! sqrt(pi))^(-1/2) H_q(x) e^(-x^2/2),
/// the eigenfunctions of -d^2/dx^2 + x^2 with eigenvalue 2q + 1.
double hermite_eval(int q, double x);

/// phi_0(x) .. phi_qmax(x) in one pass of the recurrence.
std::vector<double> hermite_values(int qmax, double x);

/// The q real zeros of phi_q in increasing order.
std::vector<double> hermite_roots(int q);

/// int |phi_q(x)| dx, integrated piecewise between consecutive zeros.
double hermite_l1_norm(int q);

struct L1BoundRow {
  int q = 0;
  double norm = 0.0;
  /// sqrt(4 pi (q + 1)).
  double bound = 0.0;
};

/// Rows for q = 0 .. qmax. Throws BoundViolated if any norm exceeds its bound.
std::vector<L1BoundRow> l1_norm_bound_check(int qmax);

/// (e^{it Delta} phi_p, phi_q) for all p, q <= qmax, inner product antilinear
/// in the first slot. Entry (p, q).
Eigen::MatrixXcd propagator_overlap_matrix(int qmax, double t);

/// Single entry of propagator_overlap_matrix.
std::complex<double> propagator_overlap(int p, int q, double t);

/// Same matrix computed in momentum space, where e^{it Delta} is multiplication by
/// e^{-itk^2} and phi_q is a Fourier eigenfunction with eigenvalue (-i)^q.
Eigen::MatrixXcd propagator_overlap_matrix_spectral(int qmax, double t);

struct OverlapBoundRow {
  int p = 0;
  int q = 0;
  double t = 0.0;
  std::complex<double> overlap;
  /// ||phi_p||_1 ||phi_q||_1 / sqrt(4 pi |t|).
  double bound = 0.0;
};

/// Rows for all (p, q) in [0, qmax]^2 and every t != 0. Throws BoundViolated if
/// |overlap| exceeds the dispersive bound or 1 (beyond a 1e-8 quadrature allowance).
std::vector<OverlapBoundRow> propagator_bound_check(int qmax, const std::vector<double> &times);

} // namespace ness
