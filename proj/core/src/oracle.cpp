#include "ness/oracle.hpp"

#include "ness/diagnostics.hpp"
#include "ness/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

namespace ness {

namespace {

using Complex = std::complex<double>;

Eigen::MatrixXd chain_block(int n, double onsite, double hopping) {
  Eigen::MatrixXd m = onsite * Eigen::MatrixXd::Identity(n, n);
  for (int i = 0; i + 1 < n; ++i) {
    m(i, i + 1) = -hopping;
    m(i + 1, i) = -hopping;
  }
  return m;
}

int cube_side(int n) {
  const int side = static_cast<int>(std::lround(std::cbrt(static_cast<double>(n))));
  if (side * side * side != n)
    throw BadGeometry("box reservoir needs a cubic site count, got " + std::to_string(n));
  return side;
}

Eigen::MatrixXd box_block(int side, double onsite, double hopping) {
  const int n = side * side * side;
  Eigen::MatrixXd m = onsite * Eigen::MatrixXd::Identity(n, n);
  auto index = [side](int x, int y, int z) { return (x * side + y) * side + z; };
  for (int x = 0; x < side; ++x)
    for (int y = 0; y < side; ++y)
      for (int z = 0; z < side; ++z) {
        const int i = index(x, y, z);
        const int nb[3] = {x + 1 < side ? index(x + 1, y, z) : -1,
                           y + 1 < side ? index(x, y + 1, z) : -1,
                           z + 1 < side ? index(x, y, z + 1) : -1};
        for (int j : nb)
          if (j >= 0) {
            m(i, j) = -hopping;
            m(j, i) = -hopping;
          }
      }
  return m;
}

void validate(const LatticeParams &p) {
  if (p.n_I < 2 || p.n_II < 2)
    throw BadGeometry("each reservoir needs at least 2 sites");
  if (!(p.hopping > 0.0) || !std::isfinite(p.hopping))
    throw BadGeometry("hopping must be positive and finite");
  if (!std::isfinite(p.onsite) || !std::isfinite(p.g))
    throw BadGeometry("onsite energy and coupling must be finite");
  if (p.coupling_width < 1)
    throw BadGeometry("coupling width must be >= 1");
}

// Restrict a matrix to the given sites.
template <class M> M restrict_to(const M &full, const std::vector<int> &sites) {
  const auto s = static_cast<Eigen::Index>(sites.size());
  M out(s, s);
  for (Eigen::Index a = 0; a < s; ++a)
    for (Eigen::Index b = 0; b < s; ++b)
      out(a, b) = full(sites[static_cast<std::size_t>(a)], sites[static_cast<std::size_t>(b)]);
  return out;
}

double flow(const Eigen::MatrixXcd &op, const Eigen::MatrixXcd &gamma_local) {
  // Tr(C Gamma) = sum_ij C_ij Gamma_ji.
  return op.cwiseProduct(gamma_local.transpose()).sum().real();
}

Eigen::MatrixXcd local_gamma(const LatticeJunction &j, const CorrelationMatrix &gamma) {
  const auto s = static_cast<Eigen::Index>(j.support.size());
  Eigen::MatrixXcd out(s, s);
  for (Eigen::Index a = 0; a < s; ++a)
    for (Eigen::Index b = 0; b < s; ++b)
      out(a, b) = gamma(j.support[static_cast<std::size_t>(a)], j.support[static_cast<std::size_t>(b)]);
  return out;
}

Currents currents_local(const LatticeJunction &j, const Eigen::MatrixXcd &g) {
  Currents c;
  if (j.support.empty())
    return c;
  c.J_I = flow(j.particle_flow_I, g);
  c.J_II = flow(j.particle_flow_II, g);
  c.P_I = flow(j.energy_flow_I, g);
  c.P_II = flow(j.energy_flow_II, g);
  c.dW_dt = flow(j.coupling_flow, g);
  return c;
}

double entropy_rate(const ReservoirState &a, const ReservoirState &b, double j_a, double p_a,
                    double j_b, double p_b) {
  if (a.zero_temperature() || b.zero_temperature())
    return std::numeric_limits<double>::quiet_NaN();
  return a.beta * (p_a - a.mu * j_a) + b.beta * (p_b - b.mu * j_b);
}

} // namespace

LatticeJunction build_junction(const LatticeParams &params) {
  validate(params);
  LatticeJunction j;
  j.params = params;
  j.n_I = params.n_I;
  j.n_II = params.n_II;
  j.v = Eigen::MatrixXd::Zero(params.n_I, params.n_II);

  if (params.geometry == LatticeGeometry::chain) {
    if (params.coupling_width > std::min(params.n_I, params.n_II))
      throw BadGeometry("coupling width exceeds a chain length");
    j.h0_I = chain_block(params.n_I, params.onsite, params.hopping);
    j.h0_II = chain_block(params.n_II, params.onsite, params.hopping);
    // Mirror pairs: site n_I - 1 - k of I faces site k of II.
    for (int k = 0; k < params.coupling_width; ++k)
      j.v(params.n_I - 1 - k, k) = -1.0;
  } else {
    const int side_I = cube_side(params.n_I);
    const int side_II = cube_side(params.n_II);
    const int side = std::min(side_I, side_II);
    if (params.coupling_width > side)
      throw BadGeometry("coupling patch is wider than a box face");
    j.h0_I = box_block(side_I, params.onsite, params.hopping);
    j.h0_II = box_block(side_II, params.onsite, params.hopping);
    // Face x = side_I - 1 of I touches face x = 0 of II on a centred patch.
    const int w = params.coupling_width;
    for (int y = 0; y < w; ++y)
      for (int z = 0; z < w; ++z) {
        const int yi = (side_I - w) / 2 + y, zi = (side_I - w) / 2 + z;
        const int yii = (side_II - w) / 2 + y, zii = (side_II - w) / 2 + z;
        j.v(((side_I - 1) * side_I + yi) * side_I + zi, yii * side_II + zii) = -1.0;
      }
  }

  const int n = j.size();
  j.h = Eigen::MatrixXd::Zero(n, n);
  j.h.topLeftCorner(j.n_I, j.n_I) = j.h0_I;
  j.h.bottomRightCorner(j.n_II, j.n_II) = j.h0_II;
  j.h.topRightCorner(j.n_I, j.n_II) = params.g * j.v;
  j.h.bottomLeftCorner(j.n_II, j.n_I) = params.g * j.v.transpose();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(j.h);
  j.energies = solver.eigenvalues();
  j.modes = solver.eigenvectors();

  // Commutators [X, h] for the reservoir observables and the coupling.
  Eigen::MatrixXd number_I = Eigen::MatrixXd::Zero(n, n);
  number_I.topLeftCorner(j.n_I, j.n_I).setIdentity();
  const Eigen::MatrixXd number_II = Eigen::MatrixXd::Identity(n, n) - number_I;
  Eigen::MatrixXd energy_I = Eigen::MatrixXd::Zero(n, n);
  energy_I.topLeftCorner(j.n_I, j.n_I) = j.h0_I;
  Eigen::MatrixXd energy_II = Eigen::MatrixXd::Zero(n, n);
  energy_II.bottomRightCorner(j.n_II, j.n_II) = j.h0_II;
  Eigen::MatrixXd coupling_full = Eigen::MatrixXd::Zero(n, n);
  coupling_full.topRightCorner(j.n_I, j.n_II) = params.g * j.v;
  coupling_full.bottomLeftCorner(j.n_II, j.n_I) = params.g * j.v.transpose();
  const Eigen::MatrixXd &coupling = coupling_full;

  auto commutator = [&](const Eigen::MatrixXd &x) -> Eigen::MatrixXd {
    return x * j.h - j.h * x;
  };
  const Eigen::MatrixXd r_nI = commutator(number_I), r_nII = commutator(number_II);
  const Eigen::MatrixXd r_eI = commutator(energy_I), r_eII = commutator(energy_II);
  const Eigen::MatrixXd r_w = commutator(coupling);

  for (int i = 0; i < n; ++i) {
    bool touched = false;
    for (const Eigen::MatrixXd *m : {&r_nI, &r_nII, &r_eI, &r_eII, &r_w, &coupling})
      touched = touched || m->row(i).cwiseAbs().maxCoeff() > 0.0 ||
                m->col(i).cwiseAbs().maxCoeff() > 0.0;
    if (touched)
      j.support.push_back(i);
  }
  const Complex minus_i(0.0, -1.0);
  j.particle_flow_I = minus_i * restrict_to(r_nI, j.support).cast<Complex>();
  j.particle_flow_II = minus_i * restrict_to(r_nII, j.support).cast<Complex>();
  j.energy_flow_I = minus_i * restrict_to(r_eI, j.support).cast<Complex>();
  j.energy_flow_II = minus_i * restrict_to(r_eII, j.support).cast<Complex>();
  j.coupling_flow = minus_i * restrict_to(r_w, j.support).cast<Complex>();
  j.coupling_local = restrict_to(coupling, j.support);
  return j;
}

CorrelationMatrix initial_state(const LatticeJunction &j, const ReservoirState &res_I,
                                const ReservoirState &res_II) {
  res_I.validate();
  res_II.validate();
  auto block = [](const Eigen::MatrixXd &h0, const ReservoirState &r) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h0);
    Eigen::VectorXd occ(solver.eigenvalues().size());
    for (Eigen::Index i = 0; i < occ.size(); ++i)
      occ(i) = fermi(solver.eigenvalues()(i), r);
    return Eigen::MatrixXd(solver.eigenvectors() * occ.asDiagonal() *
                           solver.eigenvectors().transpose());
  };
  CorrelationMatrix gamma = CorrelationMatrix::Zero(j.size(), j.size());
  gamma.topLeftCorner(j.n_I, j.n_I) = block(j.h0_I, res_I).cast<Complex>();
  gamma.bottomRightCorner(j.n_II, j.n_II) = block(j.h0_II, res_II).cast<Complex>();
  return gamma;
}

namespace {

Eigen::VectorXcd phases(const LatticeJunction &j, double t) {
  Eigen::VectorXcd u(j.energies.size());
  for (Eigen::Index a = 0; a < u.size(); ++a)
    u(a) = std::polar(1.0, -j.energies(a) * t);
  return u;
}

} // namespace

CorrelationMatrix evolve(const LatticeJunction &j, const CorrelationMatrix &gamma0, double t) {
  const Eigen::MatrixXcd v = j.modes.cast<Complex>();
  const Eigen::MatrixXcd mode_gamma = v.transpose() * gamma0 * v;
  const Eigen::MatrixXcd y = v * phases(j, t).asDiagonal();
  return y * mode_gamma * y.adjoint();
}

Currents currents(const LatticeJunction &j, const CorrelationMatrix &gamma) {
  if (j.support.empty())
    return {};
  return currents_local(j, local_gamma(j, gamma));
}

TraceRecord run(const LatticeJunction &j, const ReservoirState &res_I,
                const ReservoirState &res_II, const RunOptions &options) {
  if (!(options.dt > 0.0) || !(options.t_max >= 0.0) || options.checkpoints < 2)
    throw InvalidArgument("run needs dt > 0, t_max >= 0 and at least 2 checkpoints");
  const CorrelationMatrix gamma0 = initial_state(j, res_I, res_II);
  const Eigen::MatrixXcd v = j.modes.cast<Complex>();
  const Eigen::MatrixXcd mode_gamma = v.transpose() * gamma0 * v;

  // Tr(X Gamma(t)) = u^dagger K u with K = (V^T X V) o mode_gamma^T, u_a = e^{-i lambda_a t}.
  auto reduced = [&](const Eigen::MatrixXd &x_modes) -> Eigen::MatrixXcd {
    return x_modes.cast<Complex>().cwiseProduct(mode_gamma.transpose());
  };
  const Eigen::MatrixXd v_I = j.modes.topRows(j.n_I);
  const Eigen::MatrixXd v_II = j.modes.bottomRows(j.n_II);
  const Eigen::MatrixXcd k_number_I = reduced(v_I.transpose() * v_I);
  const Eigen::MatrixXcd k_energy_I = reduced(v_I.transpose() * j.h0_I * v_I);
  const Eigen::MatrixXcd k_energy_II = reduced(v_II.transpose() * j.h0_II * v_II);

  Eigen::MatrixXcd v_support(static_cast<Eigen::Index>(j.support.size()), v.cols());
  for (std::size_t a = 0; a < j.support.size(); ++a)
    v_support.row(static_cast<Eigen::Index>(a)) = v.row(j.support[a]);

  const auto steps = static_cast<long>(std::floor(options.t_max / options.dt + 1e-9));
  std::vector<long> checkpoints;
  for (int c = 0; c < options.checkpoints; ++c)
    checkpoints.push_back(std::lround(static_cast<double>(c) * steps / (options.checkpoints - 1)));

  TraceRecord rec;
  const auto reserve = static_cast<std::size_t>(steps + 1);
  for (auto *col : {&rec.t, &rec.N_I, &rec.E_I, &rec.E_II, &rec.W_expect, &rec.J_I, &rec.J_II,
                    &rec.P_I, &rec.P_II, &rec.dW_dt, &rec.entropy_rate})
    col->reserve(reserve);

  double trace0 = 0.0, energy0 = 0.0;
  rec.spectrum_min = std::numeric_limits<double>::infinity();
  rec.spectrum_max = -std::numeric_limits<double>::infinity();
  std::size_t next_checkpoint = 0;

  for (long k = 0; k <= steps; ++k) {
    const double t = static_cast<double>(k) * options.dt;
    const Eigen::VectorXcd u = phases(j, t);
    auto expect = [&u](const Eigen::MatrixXcd &kmat) { return u.dot(kmat * u).real(); };

    rec.t.push_back(t);
    rec.N_I.push_back(expect(k_number_I));
    rec.E_I.push_back(expect(k_energy_I));
    rec.E_II.push_back(expect(k_energy_II));

    Currents c;
    double w = 0.0;
    if (!j.support.empty()) {
      const Eigen::MatrixXcd y = v_support * u.asDiagonal();
      const Eigen::MatrixXcd g_local = y * mode_gamma * y.adjoint();
      c = currents_local(j, g_local);
      w = j.coupling_local.cast<Complex>().cwiseProduct(g_local.transpose()).sum().real();
    }
    rec.W_expect.push_back(w);
    rec.J_I.push_back(c.J_I);
    rec.J_II.push_back(c.J_II);
    rec.P_I.push_back(c.P_I);
    rec.P_II.push_back(c.P_II);
    rec.dW_dt.push_back(c.dW_dt);
    rec.entropy_rate.push_back(entropy_rate(res_I, res_II, c.J_I, c.P_I, c.J_II, c.P_II));
    rec.current_imbalance = std::max(rec.current_imbalance, std::abs(c.J_I + c.J_II));

    if (next_checkpoint < checkpoints.size() && checkpoints[next_checkpoint] == k) {
      while (next_checkpoint < checkpoints.size() && checkpoints[next_checkpoint] == k)
        ++next_checkpoint;
      const Eigen::MatrixXcd y = v * u.asDiagonal();
      const Eigen::MatrixXcd gamma = y * mode_gamma * y.adjoint();
      const double trace = gamma.trace().real();
      const double energy = j.h.cast<Complex>().cwiseProduct(gamma.transpose()).sum().real();
      if (k == 0) {
        trace0 = trace;
        energy0 = energy;
      } else {
        rec.particle_drift = std::max(
            rec.particle_drift, std::abs(trace - trace0) / std::max(std::abs(trace0), 1e-300));
        rec.energy_drift = std::max(
            rec.energy_drift, std::abs(energy - energy0) / std::max(std::abs(energy0), 1e-300));
      }
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(gamma, Eigen::EigenvaluesOnly);
      rec.spectrum_min = std::min(rec.spectrum_min, solver.eigenvalues().minCoeff());
      rec.spectrum_max = std::max(rec.spectrum_max, solver.eigenvalues().maxCoeff());
    }
  }
  return rec;
}

void write_trace_csv(std::ostream &out, const TraceRecord &r) {
  out << "t,N_I,E_I,E_II,W_expect,J_I,P_I,entropy_rate\n";
  char buf[512];
  for (std::size_t i = 0; i < r.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.t[i],
                  r.N_I[i], r.E_I[i], r.E_II[i], r.W_expect[i], r.J_I[i], r.P_I[i],
                  r.entropy_rate[i]);
    out << buf;
  }
}

namespace {

struct Moments {
  double mean = 0.0;
  double var = 0.0; // unbiased
  std::size_t n = 0;
};

Moments moments(const std::vector<double> &x, std::size_t begin, std::size_t end) {
  Moments m;
  m.n = end - begin;
  for (std::size_t i = begin; i < end; ++i)
    m.mean += x[i];
  m.mean /= static_cast<double>(m.n);
  for (std::size_t i = begin; i < end; ++i)
    m.var += (x[i] - m.mean) * (x[i] - m.mean);
  m.var = m.n > 1 ? m.var / static_cast<double>(m.n - 1) : 0.0;
  return m;
}

PlateauStat plateau_stat(const std::vector<double> &x, std::size_t begin, std::size_t end,
                         const PlateauWindow &window, const char *name) {
  const std::size_t mid = begin + (end - begin) / 2;
  const Moments all = moments(x, begin, end);
  const Moments a = moments(x, begin, mid), b = moments(x, mid, end);
  const double pooled = std::sqrt(((a.n - 1) * a.var + (b.n - 1) * b.var) /
                                  static_cast<double>(a.n + b.n - 2));
  PlateauStat s{all.mean, std::sqrt(all.var), std::abs(a.mean - b.mean)};
  if (s.drift > 3.0 * pooled) {
    if (s.drift > window.relative_tolerance * std::abs(s.mean) &&
        s.drift > window.absolute_tolerance)
      throw NoPlateau(std::string(name) + " drifts across the window (half-window means differ by " +
                          std::to_string(s.drift) + ")",
                      s.drift);
    warn(std::string(name) + " plateau drift exceeds 3 pooled standard deviations");
  }
  return s;
}

} // namespace

Plateau plateau_current(const TraceRecord &record, const PlateauWindow &window) {
  std::size_t begin = record.size(), end = 0;
  for (std::size_t i = 0; i < record.size(); ++i)
    if (record.t[i] >= window.t_start && record.t[i] <= window.t_end) {
      begin = std::min(begin, i);
      end = i + 1;
    }
  if (end < begin + 4)
    throw InvalidArgument("plateau window holds fewer than 4 samples");
  Plateau p;
  p.samples = end - begin;
  p.J = plateau_stat(record.J_I, begin, end, window, "J_I");
  p.P = plateau_stat(record.P_I, begin, end, window, "P_I");
  return p;
}

EntropyCheck entropy_check(const TraceRecord &record, const ReservoirState &res_I,
                           const ReservoirState &res_II) {
  if (record.size() == 0)
    throw InvalidArgument("entropy check needs a nonempty record");
  if (res_I.zero_temperature() || res_II.zero_temperature())
    throw InvalidArgument("entropy production needs finite inverse temperatures");
  EntropyCheck e;
  std::vector<double> rate(record.size());
  for (std::size_t i = 0; i < record.size(); ++i) {
    rate[i] = entropy_rate(res_I, res_II, record.J_I[i], record.P_I[i], record.J_II[i],
                           record.P_II[i]);
    e.scale = std::max(e.scale, std::abs(res_I.beta * record.P_I[i]) +
                                    std::abs(res_I.beta * res_I.mu * record.J_I[i]) +
                                    std::abs(res_II.beta * record.P_II[i]) +
                                    std::abs(res_II.beta * res_II.mu * record.J_II[i]));
  }
  if (record.size() == 1) {
    e.average = rate[0];
  } else {
    double integral = 0.0;
    for (std::size_t i = 0; i + 1 < record.size(); ++i)
      integral += 0.5 * (rate[i] + rate[i + 1]) * (record.t[i + 1] - record.t[i]);
    e.average = integral / (record.t.back() - record.t.front());
  }
  e.nonnegative = e.average >= -1e-8 * e.scale;
  return e;
}

} // namespace ness
