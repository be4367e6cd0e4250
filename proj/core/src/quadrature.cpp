#include "ness/quadrature.hpp"

#include "ness/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>
#include <string>

namespace ness {

void QuadratureConfig::validate() const {
  if (!(rel_tol > 0.0))
    throw InvalidArgument("quadrature rel_tol must be > 0");
  if (!(abs_tol >= 0.0))
    throw InvalidArgument("quadrature abs_tol must be >= 0");
  if (!(tail_constant > 0.0))
    throw InvalidArgument("quadrature tail_constant must be > 0");
  if (rule_order < 2)
    throw InvalidArgument("quadrature rule_order must be >= 2");
  if (max_subdivisions < 1)
    throw InvalidArgument("quadrature max_subdivisions must be >= 1");
}

double sphere_area(int dimension) {
  if (dimension < 1)
    throw InvalidArgument("sphere_area: dimension must be >= 1");
  const double half = 0.5 * dimension;
  return 2.0 * std::pow(std::numbers::pi, half) / std::tgamma(half);
}

GaussLegendreRule gauss_legendre(int order) {
  if (order < 1)
    throw InvalidArgument("gauss_legendre: order must be >= 1");
  GaussLegendreRule rule;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  const int n = order;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16)
        break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1)
    rule.nodes[n / 2] = 0.0;
  return rule;
}

namespace {

struct Sample {
  double value = 0.0;
  double magnitude = 0.0;
};

using SampleFn = std::function<Sample(double)>;

enum class ToleranceMode { value, magnitude };

Sample apply_rule(const SampleFn &f, double a, double b, const GaussLegendreRule &rule) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  Sample s;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const Sample v = f(c + h * rule.nodes[i]);
    s.value += rule.weights[i] * v.value;
    s.magnitude += rule.weights[i] * v.magnitude;
  }
  s.value *= h;
  s.magnitude *= h;
  return s;
}

struct Panel {
  double a;
  double b;
  Sample left;
  Sample right;
  double error;
  long id;
  bool alive;
};

Panel make_panel(const SampleFn &f, double a, double b, const Sample &whole,
                 const GaussLegendreRule &rule, long id) {
  const double m = 0.5 * (a + b);
  Panel p{a, b, apply_rule(f, a, m, rule), apply_rule(f, m, b, rule), 0.0, id, true};
  p.error = std::abs(whole.value - (p.left.value + p.right.value));
  return p;
}

// Neumaier-compensated sum.
struct Accumulator {
  double sum = 0.0;
  double comp = 0.0;
  void add(double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x))
      comp += (sum - t) + x;
    else
      comp += (x - t) + sum;
    sum = t;
  }
  double get() const { return sum + comp; }
};

std::vector<double> make_edges(double a, double b, std::span<const double> breakpoints) {
  std::vector<double> edges{a, b};
  for (double x : breakpoints)
    if (x > a && x < b && std::isfinite(x))
      edges.push_back(x);
  std::sort(edges.begin(), edges.end());
  const double eps = 1e-13 * std::max({1.0, std::abs(a), std::abs(b)});
  std::vector<double> out;
  for (double x : edges)
    if (out.empty() || x - out.back() > eps)
      out.push_back(x);
  if (out.back() != b) // keep the exact upper limit
    out.back() = b;
  return out;
}

QuadratureResult adapt(const SampleFn &f, const std::vector<double> &edges,
                       const QuadratureConfig &cfg, const GaussLegendreRule &rule,
                       ToleranceMode mode) {
  std::vector<Panel> panels;
  long next_id = 0;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    const double a = edges[i], b = edges[i + 1];
    if (!(b > a))
      continue;
    panels.push_back(make_panel(f, a, b, apply_rule(f, a, b, rule), rule, next_id++));
  }

  // Largest error first; equal errors resolved by creation order.
  auto worse = [&panels](std::size_t x, std::size_t y) {
    const Panel &p = panels[x], &q = panels[y];
    if (p.error != q.error)
      return p.error < q.error;
    return p.id > q.id;
  };
  std::priority_queue<std::size_t, std::vector<std::size_t>, decltype(worse)> queue(worse);
  for (std::size_t i = 0; i < panels.size(); ++i)
    queue.push(i);

  QuadratureResult result;
  for (int splits = 0;; ++splits) {
    Accumulator value, error, magnitude;
    for (const Panel &p : panels) {
      if (!p.alive)
        continue;
      value.add(p.left.value + p.right.value);
      error.add(p.error);
      magnitude.add(p.left.magnitude + p.right.magnitude);
    }
    result.value = value.get();
    result.error = error.get();
    result.magnitude = magnitude.get();
    result.subdivisions = splits;

    const double reference =
        mode == ToleranceMode::value ? std::abs(result.value) : result.magnitude;
    if (result.error <= cfg.rel_tol * reference + cfg.abs_tol)
      break;
    if (!std::isfinite(result.value))
      throw NonConvergent("quadrature produced a non-finite value", result.value, result.error);
    if (splits >= cfg.max_subdivisions || queue.empty())
      throw NonConvergent("adaptive quadrature hit the subdivision limit (" +
                              std::to_string(cfg.max_subdivisions) + ") with error estimate " +
                              std::to_string(result.error),
                          result.value, result.error);

    const std::size_t top = queue.top();
    queue.pop();
    const Panel parent = panels[top];
    const double m = 0.5 * (parent.a + parent.b);
    if (!(m > parent.a && m < parent.b))
      throw NonConvergent("adaptive quadrature: panel cannot be bisected further", result.value,
                          result.error);
    panels[top].alive = false;
    panels.push_back(make_panel(f, parent.a, m, parent.left, rule, next_id++));
    queue.push(panels.size() - 1);
    panels.push_back(make_panel(f, m, parent.b, parent.right, rule, next_id++));
    queue.push(panels.size() - 1);
  }

  // Final value summed in positional order.
  std::vector<const Panel *> alive;
  for (const Panel &p : panels)
    if (p.alive)
      alive.push_back(&p);
  std::sort(alive.begin(), alive.end(), [](const Panel *x, const Panel *y) { return x->a < y->a; });
  Accumulator value, magnitude;
  for (const Panel *p : alive) {
    value.add(p->left.value);
    value.add(p->right.value);
    magnitude.add(p->left.magnitude);
    magnitude.add(p->right.magnitude);
  }
  result.value = value.get();
  result.magnitude = magnitude.get();
  return result;
}

QuadratureResult adapt_scalar(const std::function<double(double)> &f,
                              const std::vector<double> &edges, const QuadratureConfig &cfg,
                              const GaussLegendreRule &rule, ToleranceMode mode) {
  return adapt(
      [&f](double x) {
        const double v = f(x);
        return Sample{v, std::abs(v)};
      },
      edges, cfg, rule, mode);
}

} // namespace

QuadratureResult integrate_1d(const std::function<double(double)> &f, double a, double b,
                              const QuadratureConfig &cfg, std::span<const double> breakpoints) {
  cfg.validate();
  if (!(a <= b))
    throw InvalidArgument("integrate_1d: need a <= b");
  if (a == b)
    return {};
  const auto rule = gauss_legendre(cfg.rule_order);
  return adapt_scalar(f, make_edges(a, b, breakpoints), cfg, rule, ToleranceMode::value);
}

double cutoff_energy(const JunctionSpec &spec, const QuadratureConfig &cfg) {
  const double top = std::max({spec.res_I.mu, spec.res_II.mu, 0.0});
  const double beta_min = std::min(spec.res_I.beta, spec.res_II.beta);
  if (std::isinf(beta_min))
    return top;
  return top + cfg.tail_constant / beta_min;
}

std::vector<double> shell_breakpoints(const JunctionSpec &spec, double e_max) {
  std::vector<double> pts;
  double finest = e_max;
  for (const ReservoirState *r : {&spec.res_I, &spec.res_II}) {
    pts.push_back(r->mu);
    if (!r->zero_temperature()) {
      const double t = 1.0 / r->beta;
      finest = std::min(finest, t);
      for (double j : {1.0, 2.0, 4.0, 8.0, 16.0, 32.0}) {
        pts.push_back(r->mu - j * t);
        pts.push_back(r->mu + j * t);
      }
    }
  }
  if (spec.kernel1) {
    for (double x : spec.kernel1->breakpoints())
      pts.push_back(x);
    finest = std::min(finest, spec.kernel1->energy_scale());
  }
  for (double p = 0.5 * e_max; p > finest / 16.0 && pts.size() < 256; p *= 0.5)
    pts.push_back(p);
  return pts;
}

QuadratureResult shell_integral_detail(const std::function<double(double)> &F,
                                       const JunctionSpec &spec, const QuadratureConfig &cfg) {
  cfg.validate();
  if (!spec.kernel1)
    throw MissingKernel("shell integral needs kernel1 (tunnelling form factor)");
  const RadialFormFactor &kernel = *spec.kernel1;
  const int d = spec.dimension;
  const double e_max = std::min(cutoff_energy(spec, cfg), kernel.support_end());
  if (!(e_max > 0.0))
    return {};

  const double s = sphere_area(d);
  const double prefactor = 0.25 * s * s;
  auto integrand = [&](double e) {
    const double u = kernel.diagonal(e).value;
    if (u == 0.0)
      return 0.0;
    const double fe = F(e);
    if (fe == 0.0)
      return 0.0;
    return std::pow(e, d - 2) * u * fe;
  };
  const auto bps = shell_breakpoints(spec, e_max);
  const auto rule = gauss_legendre(cfg.rule_order);
  QuadratureResult r =
      adapt_scalar(integrand, make_edges(0.0, e_max, bps), cfg, rule, ToleranceMode::magnitude);
  r.value *= prefactor;
  r.error *= prefactor;
  r.magnitude *= prefactor;
  return r;
}

double shell_integral(const std::function<double(double)> &F, const JunctionSpec &spec,
                      const QuadratureConfig &cfg) {
  return shell_integral_detail(F, spec, cfg).value;
}

QuadratureResult integrate_3d_simplex(const std::function<double(double, double, double)> &f,
                                      double e_max, const QuadratureConfig &cfg,
                                      std::span<const double> breakpoints) {
  cfg.validate();
  if (!(e_max > 0.0))
    return {};
  const auto rule = gauss_legendre(cfg.rule_order);
  const std::vector<double> bps(breakpoints.begin(), breakpoints.end());

  auto inner = [&](double e1, double e2) -> Sample {
    const double total = e1 + e2;
    const double top = std::min(total, e_max);
    if (!(top > 0.0))
      return {};
    std::vector<double> pts{e1};
    for (double x : bps) {
      pts.push_back(x);
      pts.push_back(total - x); // F2 = E1 + E2 - F1 crosses x
    }
    const QuadratureResult r = adapt_scalar([&](double f1) { return f(e1, e2, f1); },
                                            make_edges(0.0, top, pts), cfg, rule,
                                            ToleranceMode::magnitude);
    return {r.value, r.magnitude};
  };

  auto middle = [&](double e1) -> Sample {
    std::vector<double> pts{e_max - e1};
    for (double x : bps) {
      pts.push_back(x);
      pts.push_back(x - e1);
    }
    const QuadratureResult r = adapt([&](double e2) { return inner(e1, e2); },
                                     make_edges(0.0, e_max, pts), cfg, rule,
                                     ToleranceMode::magnitude);
    return {r.value, r.magnitude};
  };

  return adapt(middle, make_edges(0.0, e_max, bps), cfg, rule, ToleranceMode::magnitude);
}

} // namespace ness
