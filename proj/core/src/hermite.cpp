#include "ness/hermite.hpp"

#include "ness/errors.hpp"
#include "ness/quadrature.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>
#include <string>

namespace ness {

namespace {

// Gauss-Legendre nodes and weights on [-half_width, half_width] using uniform panels
// sized for at least 10 nodes per oscillation of frequency omega.
struct Grid {
  std::vector<double> x;
  std::vector<double> w;
};

Grid oscillation_grid(double half_width, double omega) {
  constexpr int kPanelOrder = 20;
  const double per_unit = std::max(10.0 * omega / (2.0 * std::numbers::pi), 2.0);
  const int panels = std::max(8, static_cast<int>(std::ceil(2.0 * half_width * per_unit / kPanelOrder)));
  const GaussLegendreRule rule = gauss_legendre(kPanelOrder);
  const double h = 2.0 * half_width / panels;
  Grid g;
  g.x.reserve(static_cast<std::size_t>(panels) * kPanelOrder);
  g.w.reserve(g.x.capacity());
  for (int p = 0; p < panels; ++p) {
    const double c = -half_width + (p + 0.5) * h;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      g.x.push_back(c + 0.5 * h * rule.nodes[i]);
      g.w.push_back(0.5 * h * rule.weights[i]);
    }
  }
  return g;
}

double hermite_extent(int qmax) { return std::sqrt(2.0 * qmax + 1.0) + 8.0; }

// Rows are nodes, columns are indices 0..qmax.
Eigen::MatrixXd hermite_table(int qmax, const std::vector<double> &x) {
  Eigen::MatrixXd phi(static_cast<Eigen::Index>(x.size()), qmax + 1);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const auto v = hermite_values(qmax, x[i]);
    for (int q = 0; q <= qmax; ++q)
      phi(static_cast<Eigen::Index>(i), q) = v[static_cast<std::size_t>(q)];
  }
  return phi;
}

void check_index(int q) {
  if (q < 0)
    throw InvalidArgument("Hermite index must be >= 0");
}

} // namespace

std::vector<double> hermite_values(int qmax, double x) {
  check_index(qmax);
  std::vector<double> v(static_cast<std::size_t>(qmax) + 1);
  v[0] = std::pow(std::numbers::pi, -0.25) * std::exp(-0.5 * x * x);
  if (qmax >= 1)
    v[1] = std::numbers::sqrt2 * x * v[0];
  for (int q = 1; q < qmax; ++q) {
    const double a = std::sqrt(2.0 / (q + 1));
    const double b = std::sqrt(static_cast<double>(q) / (q + 1));
    v[static_cast<std::size_t>(q) + 1] =
        a * x * v[static_cast<std::size_t>(q)] - b * v[static_cast<std::size_t>(q) - 1];
  }
  return v;
}

double hermite_eval(int q, double x) { return hermite_values(q, x).back(); }

std::vector<double> hermite_roots(int q) {
  check_index(q);
  if (q == 0)
    return {};
  // Jacobi matrix of the recurrence x phi_n = sqrt((n+1)/2) phi_{n+1} + sqrt(n/2) phi_{n-1}.
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(q);
  Eigen::VectorXd sub(std::max(q - 1, 0));
  for (int n = 1; n < q; ++n)
    sub(n - 1) = std::sqrt(0.5 * n);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd &ev = solver.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

double hermite_l1_norm(int q) {
  check_index(q);
  const double edge = std::sqrt(2.0 * q + 1.0) + 10.0;
  std::vector<double> pts{-edge};
  for (double r : hermite_roots(q))
    pts.push_back(r);
  pts.push_back(edge);

  QuadratureConfig cfg;
  cfg.rel_tol = 1e-13;
  cfg.abs_tol = 1e-16;
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i)
    total += std::abs(
        integrate_1d([q](double x) { return hermite_eval(q, x); }, pts[i], pts[i + 1], cfg).value);
  return total;
}

std::vector<L1BoundRow> l1_norm_bound_check(int qmax) {
  check_index(qmax);
  std::vector<L1BoundRow> rows;
  for (int q = 0; q <= qmax; ++q) {
    L1BoundRow row{q, hermite_l1_norm(q), std::sqrt(4.0 * std::numbers::pi * (q + 1))};
    if (!(row.norm <= row.bound))
      throw BoundViolated("||phi_" + std::to_string(q) + "||_1 = " + std::to_string(row.norm) +
                          " exceeds sqrt(4 pi (q+1)) = " + std::to_string(row.bound));
    rows.push_back(row);
  }
  return rows;
}

Eigen::MatrixXcd propagator_overlap_matrix_spectral(int qmax, double t) {
  check_index(qmax);
  const double edge = hermite_extent(qmax);
  const Grid g = oscillation_grid(edge, 2.0 * std::abs(t) * edge + std::sqrt(2.0 * qmax + 1.0));
  const Eigen::MatrixXd phi = hermite_table(qmax, g.x);
  Eigen::VectorXcd weight(static_cast<Eigen::Index>(g.x.size()));
  for (std::size_t i = 0; i < g.x.size(); ++i)
    weight(static_cast<Eigen::Index>(i)) = g.w[i] * std::polar(1.0, t * g.x[i] * g.x[i]);
  const Eigen::MatrixXcd moments =
      phi.transpose().cast<std::complex<double>>() * weight.asDiagonal() * phi;

  Eigen::MatrixXcd a(qmax + 1, qmax + 1);
  static const std::complex<double> powers[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  for (int p = 0; p <= qmax; ++p)
    for (int q = 0; q <= qmax; ++q)
      a(p, q) = powers[((p - q) % 4 + 4) % 4] * moments(p, q); // i^p (-i)^q
  return a;
}

Eigen::MatrixXcd propagator_overlap_matrix(int qmax, double t) {
  check_index(qmax);
  if (t == 0.0)
    return Eigen::MatrixXcd::Identity(qmax + 1, qmax + 1);
  // Short times make the position kernel too oscillatory for direct panels.
  if (std::abs(t) < 0.25)
    return propagator_overlap_matrix_spectral(qmax, t);

  const double edge = hermite_extent(qmax);
  const Grid g = oscillation_grid(edge, edge / std::abs(t) + std::sqrt(2.0 * qmax + 1.0));
  const auto n = static_cast<Eigen::Index>(g.x.size());
  const Eigen::MatrixXd phi = hermite_table(qmax, g.x);
  Eigen::MatrixXd wphi = phi;
  for (Eigen::Index i = 0; i < n; ++i)
    wphi.row(i) *= g.w[static_cast<std::size_t>(i)];

  // conj of the kernel (4 pi i t)^{-1/2} e^{i (x-y)^2 / 4t}.
  const std::complex<double> scale =
      std::conj(std::sqrt(std::complex<double>(0.0, -1.0 / (4.0 * std::numbers::pi * t))));
  const double inv4t = 1.0 / (4.0 * t);

  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(qmax + 1, qmax + 1);
  Eigen::RowVectorXcd row(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double xi = g.x[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < n; ++j) {
      const double d = xi - g.x[static_cast<std::size_t>(j)];
      row(j) = std::polar(1.0, -d * d * inv4t);
    }
    // sum_j E_ij w_j phi_p(x_j), then weighted by w_i phi_q(x_i).
    const Eigen::RowVectorXcd v = row * wphi.cast<std::complex<double>>();
    a += v.transpose() * wphi.row(i).cast<std::complex<double>>();
  }
  return scale * a;
}

std::complex<double> propagator_overlap(int p, int q, double t) {
  check_index(p);
  check_index(q);
  return propagator_overlap_matrix(std::max(p, q), t)(p, q);
}

std::vector<OverlapBoundRow> propagator_bound_check(int qmax, const std::vector<double> &times) {
  check_index(qmax);
  std::vector<double> l1(static_cast<std::size_t>(qmax) + 1);
  for (int q = 0; q <= qmax; ++q)
    l1[static_cast<std::size_t>(q)] = hermite_l1_norm(q);

  constexpr double kAllowance = 1e-8;
  std::vector<OverlapBoundRow> rows;
  for (double t : times) {
    if (t == 0.0)
      continue;
    const Eigen::MatrixXcd a = propagator_overlap_matrix(qmax, t);
    for (int p = 0; p <= qmax; ++p)
      for (int q = 0; q <= qmax; ++q) {
        OverlapBoundRow row{p, q, t, a(p, q),
                            l1[static_cast<std::size_t>(p)] * l1[static_cast<std::size_t>(q)] /
                                std::sqrt(4.0 * std::numbers::pi * std::abs(t))};
        const double mag = std::abs(row.overlap);
        if (mag > row.bound + kAllowance || mag > 1.0 + kAllowance)
          throw BoundViolated("propagator overlap (" + std::to_string(p) + "," +
                              std::to_string(q) + ") at t=" + std::to_string(t) +
                              " has modulus " + std::to_string(mag));
        rows.push_back(row);
      }
  }
  return rows;
}

} // namespace ness
