#include "ness/dyson.hpp"

#include "ness/errors.hpp"
#include "ness/hermite.hpp"
#include "ness/quadrature.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>

namespace ness {

// ---------------------------------------------------------------- series

HermiteSeries::HermiteSeries(int variables, int truncation)
    : variables_(variables), truncation_(truncation) {
  if (variables < 1)
    throw InvalidArgument("Hermite series needs at least one variable");
  if (truncation < 0)
    throw InvalidArgument("Hermite truncation must be >= 0");
}

void HermiteSeries::check(const Index &q) const {
  if (static_cast<int>(q.size()) != variables_)
    throw InvalidArgument("multi-index has " + std::to_string(q.size()) + " entries, series has " +
                          std::to_string(variables_) + " variables");
  for (int k : q)
    if (k < 0 || k > truncation_)
      throw InvalidArgument("multi-index entry " + std::to_string(k) + " outside [0, " +
                            std::to_string(truncation_) + "]");
}

void HermiteSeries::set(const Index &q, Coefficient c) {
  check(q);
  if (c == Coefficient{})
    coeffs_.erase(q);
  else
    coeffs_[q] = c;
}

HermiteSeries::Coefficient HermiteSeries::get(const Index &q) const {
  check(q);
  const auto it = coeffs_.find(q);
  return it == coeffs_.end() ? Coefficient{} : it->second;
}

double HermiteSeries::l2_norm() const {
  double s = 0.0;
  for (const auto &[q, c] : coeffs_)
    s += std::norm(c);
  return std::sqrt(s);
}

HermiteSeries HermiteSeries::ground_state(int variables) {
  HermiteSeries f(variables, 0);
  f.set(Index(static_cast<std::size_t>(variables), 0), 1.0);
  return f;
}

HermiteSeries HermiteSeries::shifted_ground_state(double shift, int truncation) {
  // Coherent state: phi_0(x - y) = e^{-y^2/4} sum_n (y / sqrt 2)^n / sqrt(n!) phi_n(x).
  HermiteSeries f(1, truncation);
  double c = std::exp(-0.25 * shift * shift);
  const double a = shift / std::numbers::sqrt2;
  for (int n = 0; n <= truncation; ++n) {
    f.set({n}, c);
    c *= a / std::sqrt(n + 1.0);
  }
  return f;
}

// ---------------------------------------------------------------- norms

namespace {

double weight_scale(int variables) { return std::pow(2.0, -1.5 * variables); }

using Sparse = std::map<HermiteSeries::Index, std::complex<double>>;

// (-d^2/dx^2 + (x - y)^2 + 1) on one axis: diagonal 2n + 2 + y^2, off-diagonal -2y x.
Sparse apply_axis(const Sparse &in, std::size_t axis, double y) {
  Sparse out;
  for (const auto &[q, c] : in) {
    const int n = q[axis];
    out[q] += (2.0 * n + 2.0 + y * y) * c;
    if (y != 0.0) {
      HermiteSeries::Index up = q;
      up[axis] = n + 1;
      out[up] += -2.0 * y * std::sqrt(0.5 * (n + 1)) * c;
      if (n > 0) {
        HermiteSeries::Index down = q;
        down[axis] = n - 1;
        out[down] += -2.0 * y * std::sqrt(0.5 * n) * c;
      }
    }
  }
  return out;
}

Sparse apply_all(Sparse v, std::span<const double> shift) {
  for (std::size_t k = 0; k < shift.size(); ++k)
    v = apply_axis(v, k, shift[k]);
  return v;
}

} // namespace

double sobolev_norm(const HermiteSeries &f) {
  double s = 0.0;
  for (const auto &[q, c] : f.coefficients()) {
    double w = 1.0;
    for (int k : q)
      w *= std::pow(2.0 * k + 2.0, 3);
    s += std::norm(c) * w;
  }
  return weight_scale(f.variables()) * std::sqrt(s);
}

double sobolev_norm_translated(const HermiteSeries &f, std::span<const double> shift) {
  if (static_cast<int>(shift.size()) != f.variables())
    throw InvalidArgument("shift has " + std::to_string(shift.size()) + " components, series has " +
                          std::to_string(f.variables()) + " variables");
  // <f, B^3 f> = <Bf, B(Bf)> with B the product of the per-axis operators.
  const Sparse &coeffs = f.coefficients();
  const Sparse u = apply_all(Sparse(coeffs.begin(), coeffs.end()), shift);
  const Sparse v = apply_all(u, shift);
  double s = 0.0;
  for (const auto &[q, c] : u) {
    const auto it = v.find(q);
    if (it != v.end())
      s += (std::conj(c) * it->second).real();
  }
  return weight_scale(f.variables()) * std::sqrt(std::max(s, 0.0));
}

SeminormResult seminorm_translation_invariant(const HermiteSeries &f, const ShiftSearch &search) {
  if (!(search.upper > search.lower) || search.coarse_points < 2 || !(search.tolerance > 0.0))
    throw InvalidArgument("invalid shift search settings");
  const auto m = static_cast<std::size_t>(f.variables());
  std::vector<double> y(m, 0.0);
  double best = sobolev_norm_translated(f, y);

  auto along = [&](std::size_t axis, double value) {
    std::vector<double> trial = y;
    trial[axis] = value;
    return sobolev_norm_translated(f, trial);
  };

  const double step = (search.upper - search.lower) / (search.coarse_points - 1);
  constexpr double kInvPhi = 0.6180339887498949;
  for (int sweep = 0; sweep < search.sweeps; ++sweep) {
    const double start = best;
    for (std::size_t axis = 0; axis < m; ++axis) {
      double center = y[axis];
      double center_value = best;
      for (int i = 0; i < search.coarse_points; ++i) {
        const double p = search.lower + i * step;
        const double v = along(axis, p);
        if (v < center_value) {
          center_value = v;
          center = p;
        }
      }
      double a = center - step, b = center + step;
      double c = b - kInvPhi * (b - a), d = a + kInvPhi * (b - a);
      double fc = along(axis, c), fd = along(axis, d);
      while (b - a > search.tolerance) {
        if (fc < fd) {
          b = d;
          d = c;
          fd = fc;
          c = b - kInvPhi * (b - a);
          fc = along(axis, c);
        } else {
          a = c;
          c = d;
          fc = fd;
          d = a + kInvPhi * (b - a);
          fd = along(axis, d);
        }
      }
      const double refined = 0.5 * (a + b);
      const double refined_value = along(axis, refined);
      if (refined_value < center_value) {
        center = refined;
        center_value = refined_value;
      }
      if (center_value < best) {
        best = center_value;
        y[axis] = center;
      }
    }
    if (!(best < start))
      break;
  }
  return {best, y};
}

// ---------------------------------------------------------------- interaction norm

namespace {

struct Grid {
  std::vector<double> x;
  std::vector<double> w;
};

// Composite Gauss-Legendre on [0, edge] with ~per_unit nodes per unit length.
Grid half_line_grid(double edge, double per_unit) {
  constexpr int kPanelOrder = 16;
  const int panels = std::max(4, static_cast<int>(std::ceil(edge * per_unit / kPanelOrder)));
  const GaussLegendreRule rule = gauss_legendre(kPanelOrder);
  const double h = edge / panels;
  Grid g;
  for (int p = 0; p < panels; ++p) {
    const double c = (p + 0.5) * h;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      g.x.push_back(c + 0.5 * h * rule.nodes[i]);
      g.w.push_back(0.5 * h * rule.weights[i]);
    }
  }
  return g;
}

// Even Hermite functions phi_0, phi_2, ..., scaled by 2 w (even integrand on the half line).
Eigen::MatrixXd even_projection(const Grid &g, int truncation) {
  const int even = truncation / 2 + 1;
  Eigen::MatrixXd phi(static_cast<Eigen::Index>(g.x.size()), even);
  for (std::size_t i = 0; i < g.x.size(); ++i) {
    const auto v = hermite_values(truncation, g.x[i]);
    for (int j = 0; j < even; ++j)
      phi(static_cast<Eigen::Index>(i), j) = 2.0 * g.w[i] * v[static_cast<std::size_t>(2 * j)];
  }
  return phi;
}

struct ProjectedNorm {
  double squared = 0.0;
  double tail = 0.0;
};

// Squared weighted norm and tail share from even-index coefficients c[j1..jd] (q = 2j).
ProjectedNorm weighted_sum(const std::vector<double> &coeffs, int dims, int even, int truncation) {
  ProjectedNorm r;
  const int tail_from = (3 * truncation) / 4;
  std::vector<int> idx(static_cast<std::size_t>(dims), 0);
  for (double c : coeffs) {
    double w = 1.0;
    bool tail = false;
    for (int j : idx) {
      w *= std::pow(4.0 * j + 2.0, 3);
      tail = tail || 2 * j > tail_from;
    }
    const double term = c * c * w;
    r.squared += term;
    if (tail)
      r.tail += term;
    for (int k = dims - 1; k >= 0; --k) { // row-major increment
      if (++idx[static_cast<std::size_t>(k)] < even)
        break;
      idx[static_cast<std::size_t>(k)] = 0;
    }
  }
  r.squared *= std::pow(2.0, -3.0 * dims);
  r.tail = r.squared > 0.0 ? r.tail * std::pow(2.0, -3.0 * dims) / r.squared : 0.0;
  return r;
}

void check_tail(const ProjectedNorm &p, const InteractionNormOptions &options) {
  if (!std::isfinite(p.squared) || p.tail > options.tail_limit)
    throw TruncationInsufficient("Hermite projection truncated at " +
                                     std::to_string(options.truncation) + " keeps a tail share of " +
                                     std::to_string(p.tail) + " of the weighted norm",
                                 p.tail);
}

double gaussian_profile_norm(const RadialFormFactor &kernel, int dimension,
                             const InteractionNormOptions &options) {
  const double amplitude = kernel.params()[0];
  const double width = kernel.params()[1];
  const int q = options.truncation;
  const double edge = std::sqrt(2.0 * q + 1.0) + 5.0;
  const Grid g = half_line_grid(edge, 6.0 * (std::sqrt(2.0 * q + 1.0) + 1.0 / width) / (2.0 * std::numbers::pi));
  const Eigen::MatrixXd phi = even_projection(g, q);
  Eigen::VectorXd values(static_cast<Eigen::Index>(g.x.size()));
  for (std::size_t i = 0; i < g.x.size(); ++i)
    values(static_cast<Eigen::Index>(i)) = std::exp(-0.5 * g.x[i] * g.x[i] / (width * width));
  const Eigen::VectorXd c = phi.transpose() * values;
  const ProjectedNorm p =
      weighted_sum(std::vector<double>(c.data(), c.data() + c.size()), 1, q / 2 + 1, q);
  check_tail(p, options);
  return std::sqrt(amplitude) * std::pow(std::sqrt(p.squared), dimension);
}

double tensor_profile_norm(const RadialFormFactor &kernel, int dimension,
                           const InteractionNormOptions &options) {
  const int q = options.truncation;
  const int even = q / 2 + 1;
  const double edge = std::sqrt(2.0 * q + 1.0) + 5.0;
  const double feature = 1.0 / std::sqrt(std::max(kernel.energy_scale(), 1e-6));
  const Grid g = half_line_grid(edge, 6.0 * (std::sqrt(2.0 * q + 1.0) + feature) / (2.0 * std::numbers::pi));
  const auto n = static_cast<Eigen::Index>(g.x.size());
  const double points = std::pow(static_cast<double>(n), dimension);
  if (points > 5e7)
    throw InvalidArgument("tensor projection needs " + std::to_string(points) +
                          " grid points; lower the truncation or the dimension");

  // Profile values on the grid, row-major with the last axis fastest.
  std::vector<double> data(static_cast<std::size_t>(points));
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(dimension), 0);
  for (double &v : data) {
    double e = 0.0;
    for (Eigen::Index i : idx)
      e += g.x[static_cast<std::size_t>(i)] * g.x[static_cast<std::size_t>(i)];
    v = std::sqrt(std::max(kernel.factor(e), 0.0));
    for (int k = dimension - 1; k >= 0; --k) {
      if (++idx[static_cast<std::size_t>(k)] < n)
        break;
      idx[static_cast<std::size_t>(k)] = 0;
    }
  }

  // Contract the last axis and rotate it to the front, once per axis.
  using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const Eigen::MatrixXd phi = even_projection(g, q);
  Eigen::Index last = n;
  std::vector<Eigen::Index> shape(static_cast<std::size_t>(dimension), n);
  for (int step = 0; step < dimension; ++step) {
    const Eigen::Index rest = static_cast<Eigen::Index>(data.size()) / last;
    Eigen::Map<const RowMajor> m(data.data(), rest, last);
    const RowMajor contracted = m * phi;
    RowMajor rotated = contracted.transpose();
    data.assign(rotated.data(), rotated.data() + rotated.size());
    shape.pop_back();
    shape.insert(shape.begin(), even);
    last = shape.back();
  }
  const ProjectedNorm p = weighted_sum(data, dimension, even, q);
  check_tail(p, options);
  return std::sqrt(p.squared);
}

} // namespace

double radial_profile_norm(const RadialFormFactor &kernel, int dimension,
                           const InteractionNormOptions &options) {
  if (dimension < 1)
    throw InvalidArgument("dimension must be >= 1");
  if (options.truncation < 2)
    throw InvalidArgument("interaction norm truncation must be >= 2");
  if (kernel.is_zero())
    return 0.0;
  if (kernel.family() == KernelFamily::gaussian && options.separable_gaussian)
    return gaussian_profile_norm(kernel, dimension, options);
  return tensor_profile_norm(kernel, dimension, options);
}

InteractionNorm interaction_norm(const JunctionSpec &spec, const InteractionNormOptions &options) {
  InteractionNorm norm;
  norm.dimension = spec.dimension;
  auto add = [&](InteractionTerm term) {
    if (term.order < 1 || term.blocks < 0 || !(term.per_block >= 0.0))
      throw InvalidArgument("interaction term needs N >= 1, blocks >= 0, norm >= 0");
    term.value = term.order * std::pow(2.0, (spec.dimension + 2) * term.order) * term.blocks *
                 term.per_block;
    norm.terms.push_back(term);
    norm.total += term.value;
  };
  if (spec.kernel1) {
    const double g = radial_profile_norm(*spec.kernel1, spec.dimension, options);
    add({1, 2, std::abs(spec.g * spec.xi) * g * g, 0.0});
  }
  if (spec.kernel2) {
    const double g = radial_profile_norm(spec.kernel2->profile(), spec.dimension, options);
    add({2, 4, std::abs(spec.g * spec.xi * spec.xi) * g * g * g * g, 0.0});
  }
  for (const InteractionTerm &t : options.extra)
    add(t);
  return norm;
}

// ---------------------------------------------------------------- time integral

namespace {

void require_dimension(int dimension) {
  if (dimension <= 2)
    throw DimensionTooLow("the time integral of (1 ^ 4 pi/|t|)^(d/2) diverges for d = " +
                          std::to_string(dimension) + " <= 2");
}

} // namespace

double time_decay_constant(int dimension) {
  require_dimension(dimension);
  return 8.0 * std::numbers::pi * dimension / (dimension - 2);
}

double time_decay_integral(int dimension) {
  require_dimension(dimension);
  constexpr double kFourPi = 4.0 * std::numbers::pi;
  QuadratureConfig cfg;
  cfg.rel_tol = 1e-14;
  cfg.abs_tol = 0.0;
  // |t| <= 4 pi contributes 4 pi per side; for |t| > 4 pi substitute 4 pi/|t| = w^2.
  const double core = integrate_1d([](double) { return 1.0; }, 0.0, kFourPi, cfg).value;
  const double tail =
      integrate_1d([dimension](double w) { return 2.0 * kFourPi * std::pow(w, dimension - 3); },
                   0.0, 1.0, cfg)
          .value;
  return 2.0 * (core + tail);
}

// ---------------------------------------------------------------- certificate

Certificate certify(const InteractionNorm &norm) {
  if (!(norm.total >= 0.0) || std::isinf(norm.total))
    throw InvalidArgument("interaction norm must be finite and >= 0");
  Certificate c;
  c.dimension = norm.dimension;
  c.interaction_norm = norm.total;
  c.x = time_decay_constant(norm.dimension) * norm.total;
  c.converges = c.x < 1.0;
  return c;
}

std::optional<double> Certificate::tail_bound(int m0) const {
  if (m0 < 0)
    throw InvalidArgument("tail order must be >= 0");
  if (!converges)
    return std::nullopt;
  double partial = 0.0;
  double power = 1.0;
  for (int m = 1; m <= m0; ++m) {
    power *= x;
    partial += power / m;
  }
  return -std::log1p(-x) - partial;
}

double Certificate::term_bound(int m, double observable_norm) const {
  if (m < 1)
    throw InvalidArgument("Dyson order must be >= 1");
  return observable_norm * std::pow(x, m) / m;
}

double theorem_bound(int m, const InteractionNorm &norm, double observable_norm) {
  return certify(norm).term_bound(m, observable_norm);
}

void write_certificate_json(std::ostream &out, const Certificate &cert, int m0, int max_order,
                            double observable_norm) {
  auto num = [](double v) {
    if (!std::isfinite(v))
      return std::string("null");
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  out << "{\"dimension\":" << cert.dimension
      << ",\"interaction_norm\":" << num(cert.interaction_norm) << ",\"x\":" << num(cert.x)
      << ",\"converges\":" << (cert.converges ? "true" : "false") << ",\"bounds\":[";
  for (int m = 1; m <= max_order; ++m) {
    if (m > 1)
      out << ',';
    out << "{\"m\":" << m << ",\"bound\":" << num(cert.term_bound(m, observable_norm)) << '}';
  }
  out << "],\"tail\":{\"m0\":" << m0 << ",\"value\":";
  if (const auto tail = cert.tail_bound(m0))
    out << num(*tail);
  else
    out << "null";
  out << "}}";
}

} // namespace ness
