#pragma once

#include "ness/model.hpp"

#include <Eigen/Dense>

#include <ostream>
#include <vector>

namespace ness {

enum class LatticeGeometry { chain, box };

/// Two tight-binding reservoirs joined by a few bonds. Each block is
/// onsite - hopping * (nearest-neighbour adjacency) with Dirichlet ends, so the
/// band is [onsite - 2d t, onsite + 2d t] and its bottom disperses like t k^2.
/// The default onsite 2 t puts the chain's band bottom at energy 0.
struct LatticeParams {
  LatticeGeometry geometry = LatticeGeometry::chain;
  /// Sites per reservoir (a perfect cube for the box geometry).
  int n_I = 200;
  int n_II = 200;
  double hopping = 1.0;
  double onsite = 2.0;
  double g = 0.02;
  /// Chain: mirror bond pairs across the junction. Box: side of the coupled face patch.
  int coupling_width = 1;
};

struct LatticeJunction {
  LatticeParams params;
  int n_I = 0;
  int n_II = 0;
  Eigen::MatrixXd h0_I;
  Eigen::MatrixXd h0_II;
  /// Unscaled coupling block (n_I x n_II); h carries g * v.
  Eigen::MatrixXd v;
  Eigen::MatrixXd h;

  /// Eigendecomposition of h, computed once at construction.
  Eigen::VectorXd energies;
  Eigen::MatrixXd modes;

  /// Sites touched by the current operators, and those operators
  /// -i[X, h] restricted to them (X = N_I, N_II, H_I, H_II, W), plus W itself.
  std::vector<int> support;
  Eigen::MatrixXcd particle_flow_I;
  Eigen::MatrixXcd particle_flow_II;
  Eigen::MatrixXcd energy_flow_I;
  Eigen::MatrixXcd energy_flow_II;
  Eigen::MatrixXcd coupling_flow;
  Eigen::MatrixXd coupling_local;

  int size() const noexcept { return n_I + n_II; }
};

/// Throws BadGeometry on impossible sizes or widths.
LatticeJunction build_junction(const LatticeParams &params);

/// Gamma_ij = <a*_j a_i>.
using CorrelationMatrix = Eigen::MatrixXcd;

/// f_FD(h0_I) (+) f_FD(h0_II) via eigendecomposition of each block.
CorrelationMatrix initial_state(const LatticeJunction &j, const ReservoirState &res_I,
                                const ReservoirState &res_II);

/// e^{-iht} Gamma0 e^{iht} through the cached eigenbasis.
CorrelationMatrix evolve(const LatticeJunction &j, const CorrelationMatrix &gamma0, double t);

/// Rates of change at one instant. Positive values are gains of the named reservoir.
struct Currents {
  double J_I = 0.0;
  double J_II = 0.0;
  double P_I = 0.0;
  double P_II = 0.0;
  /// d<W>/dt, also a commutator trace; equals -(P_I + P_II).
  double dW_dt = 0.0;
};

Currents currents(const LatticeJunction &j, const CorrelationMatrix &gamma);

struct RunOptions {
  double t_max = 150.0;
  double dt = 0.1;
  /// Times (evenly spread, including both ends) where the full Gamma(t) is
  /// formed for the trace, energy and spectrum checks.
  int checkpoints = 6;
};

struct TraceRecord {
  std::vector<double> t;
  std::vector<double> N_I;
  std::vector<double> E_I;
  std::vector<double> E_II;
  std::vector<double> W_expect;
  std::vector<double> J_I;
  std::vector<double> J_II;
  std::vector<double> P_I;
  std::vector<double> P_II;
  std::vector<double> dW_dt;
  /// sum_r beta_r (P_r - mu_r J_r); NaN when a reservoir has beta = inf.
  std::vector<double> entropy_rate;

  /// Largest relative change of Tr Gamma and Tr(h Gamma) over the checkpoints.
  double particle_drift = 0.0;
  double energy_drift = 0.0;
  /// Largest |J_I + J_II| over all samples.
  double current_imbalance = 0.0;
  /// Extreme eigenvalues of Gamma(t) over the checkpoints.
  double spectrum_min = 0.0;
  double spectrum_max = 0.0;

  std::size_t size() const noexcept { return t.size(); }
};

TraceRecord run(const LatticeJunction &j, const ReservoirState &res_I,
                const ReservoirState &res_II, const RunOptions &options = {});

/// Columns t, N_I, E_I, E_II, W_expect, J_I, P_I, entropy_rate.
void write_trace_csv(std::ostream &out, const TraceRecord &record);

struct PlateauWindow {
  double t_start = 40.0;
  double t_end = 150.0;
  /// NoPlateau when the half-window drift exceeds both 3 pooled std and
  /// relative_tolerance * |mean| (and absolute_tolerance).
  double relative_tolerance = 0.05;
  double absolute_tolerance = 1e-12;
};

struct PlateauStat {
  double mean = 0.0;
  double std = 0.0;
  /// |mean(first half) - mean(second half)|.
  double drift = 0.0;
};

struct Plateau {
  PlateauStat J;
  PlateauStat P;
  std::size_t samples = 0;
};

/// Window means of J_I and P_I. Warns when a drift exceeds 3 pooled std.
Plateau plateau_current(const TraceRecord &record, const PlateauWindow &window = {});

struct EntropyCheck {
  /// (1/T) int_0^T entropy_rate dt by the trapezoid rule.
  double average = 0.0;
  /// Largest |beta_r P_r| + |beta_r mu_r J_r| over the samples.
  double scale = 0.0;
  /// average >= -1e-8 scale.
  bool nonnegative = false;
};

EntropyCheck entropy_check(const TraceRecord &record, const ReservoirState &res_I,
                           const ReservoirState &res_II);

} // namespace ness
