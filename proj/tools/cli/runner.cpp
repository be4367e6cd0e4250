#include "runner.hpp"

#include "ness/dyson.hpp"
#include "ness/oracle.hpp"
#include "ness/transport.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <functional>
#include <limits>
#include <random>
#include <thread>

namespace ness::cli {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

using Job = std::function<std::vector<Row>()>;

Cell to_cell(const Json &v) {
  if (v.is_boolean())
    return v.get<bool>();
  if (v.is_number_integer())
    return v.get<std::int64_t>();
  if (v.is_number())
    return v.get<double>();
  const std::string s = v.get<std::string>();
  if (s == "inf" || s == "+inf" || s == "Infinity")
    return std::numeric_limits<double>::infinity();
  return s;
}

Row echo(const Json &point) {
  Row r;
  for (const auto &[key, value] : flatten(point))
    r.add(key, to_cell(value));
  return r;
}

std::vector<Job> plan_currents(const Json &p) {
  return {[p] {
    const JunctionSpec spec = junction_from_json(p["junction"]);
    const TransportResult t = tunnelling_transport(spec, quadrature_from_json(p["quadrature"]));
    Row r;
    r.add("J22", t.J22).add("P22", t.P22).add("E22", t.E22);
    return std::vector<Row>{r};
  }};
}

std::vector<Job> plan_iv_sweep(const Json &p) {
  const Json &o = p["options"];
  SweepAxis axis{"", o["dmu_start"], o["dmu_stop"], o["dmu_count"], false};
  const bool symmetric = o["bias"] == "symmetric";
  std::vector<Job> jobs;
  for (double dmu : axis.values())
    jobs.push_back([p, dmu, symmetric] {
      const JunctionSpec base = junction_from_json(p["junction"]);
      const QuadratureConfig q = quadrature_from_json(p["quadrature"]);
      if (!base.kernel1)
        throw MissingKernel("iv-sweep needs junction.kernel1");
      const double mu = base.res_I.mu;
      // A symmetric bias makes dmu -> -dmu exactly the reservoir swap.
      JunctionSpec s = base;
      s.res_I.mu = symmetric ? mu - 0.5 * dmu : mu;
      s.res_II.mu = symmetric ? mu + 0.5 * dmu : mu + dmu;
      const double J = particle_current_J22(s, q);
      const Resistance R = resistance(mu, base.res_I.beta, *base.kernel1, q, base.dimension);
      const double prediction = R.infinite ? 0.0 : base.g * base.g * base.xi * base.xi * dmu / R.value;
      Row r;
      r.add("dmu", dmu)
          .add("mu_I", s.res_I.mu)
          .add("mu_II", s.res_II.mu)
          .add("J22", J)
          .add("ohm_prediction", prediction)
          .add("residual", J - prediction);
      return std::vector<Row>{r};
    });
  return jobs;
}

std::vector<Job> plan_resistance(const Json &p) {
  return {[p] {
    const JunctionSpec spec = junction_from_json(p["junction"]);
    if (!spec.kernel1)
      throw MissingKernel("resistance-curve needs junction.kernel1");
    const double mu = spec.res_I.mu, beta = spec.res_I.beta;
    const Resistance R =
        resistance(mu, beta, *spec.kernel1, quadrature_from_json(p["quadrature"]), spec.dimension);
    double sommerfeld = kNaN;
    if (p["options"]["sommerfeld"].get<bool>() && spec.dimension == 3) {
      try {
        sommerfeld = resistance_sommerfeld(mu, beta, *spec.kernel1);
      } catch (const DegenerateKernel &) {
      }
    }
    Row r;
    r.add("temperature", 1.0 / beta)
        .add("R", R.infinite ? std::numeric_limits<double>::infinity() : R.value)
        .add("R_infinite", R.infinite)
        .add("R_sommerfeld", sommerfeld);
    return std::vector<Row>{r};
  }};
}

std::vector<Job> plan_onsager(const Json &p) {
  return {[p] {
    const JunctionSpec spec = junction_from_json(p["junction"]);
    if (!spec.kernel1)
      throw MissingKernel("onsager needs junction.kernel1");
    const QuadratureConfig q = quadrature_from_json(p["quadrature"]);
    const double beta = spec.res_I.beta, nu = beta * spec.res_I.mu;
    const OnsagerResult o = onsager_check(beta, nu, *spec.kernel1, p["options"]["h"], q, spec.dimension);
    const double coefficient = onsager_coefficient(beta, nu, *spec.kernel1, q, spec.dimension);
    Row r;
    r.add("nu", nu)
        .add("dP_dDnu", o.dP_dDnu)
        .add("minus_dJ_dDbeta", o.minus_dJ_dDbeta)
        .add("gap", o.gap)
        .add("richardson_error", o.richardson_error)
        .add("coefficient", coefficient);
    return std::vector<Row>{r};
  }};
}

std::vector<Job> plan_entropy_grid(const Json &p) {
  const auto betas = p["options"]["betas"].get<std::vector<double>>();
  const auto mus = p["options"]["mus"].get<std::vector<double>>();
  std::vector<Job> jobs;
  for (double bI : betas)
    for (double mI : mus)
      for (double bII : betas)
        for (double mII : mus)
          jobs.push_back([p, bI, mI, bII, mII] {
            JunctionSpec spec = junction_from_json(p["junction"]);
            spec.res_I = {bI, mI};
            spec.res_II = {bII, mII};
            const TransportResult t = tunnelling_transport(spec, quadrature_from_json(p["quadrature"]));
            Row r;
            r.add("grid_beta_I", bI)
                .add("grid_mu_I", mI)
                .add("grid_beta_II", bII)
                .add("grid_mu_II", mII)
                .add("coincident", spec.res_I == spec.res_II)
                .add("J22", t.J22)
                .add("P22", t.P22)
                .add("E22", t.E22);
            return std::vector<Row>{r};
          });
  return jobs;
}

std::vector<Job> plan_thermal_power(const Json &p) {
  return {[p] {
    const JunctionSpec spec = junction_from_json(p["junction"]);
    const ThermalPower t = thermal_power_P24(spec, quadrature_from_json(p["quadrature"]));
    Row r;
    r.add("P24", t.value).add("magnitude", t.magnitude).add("error", t.error);
    return std::vector<Row>{r};
  }};
}

std::vector<Job> plan_certify(const Json &p) {
  return {[p] {
    const JunctionSpec spec = junction_from_json(p["junction"]);
    const Json &o = p["options"];
    InteractionNormOptions opts;
    opts.truncation = o["truncation"];
    opts.tail_limit = o["tail_limit"];
    for (const Json &t : o["extra_terms"]) {
      InteractionTerm term;
      term.order = t["order"];
      term.blocks = t["blocks"];
      term.per_block = t["per_block"];
      opts.extra.push_back(term);
    }
    const Certificate cert = certify(interaction_norm(spec, opts));
    const int m0 = o["m0"], max_order = o["max_order"];
    const double observable = o["observable_norm"];
    Row r;
    r.add("interaction_norm", cert.interaction_norm)
        .add("x", cert.x)
        .add("converges", cert.converges)
        .add("tail", cert.tail_bound(m0).value_or(std::numeric_limits<double>::infinity()));
    for (int m = 1; m <= max_order; ++m)
      r.add("bound_" + std::to_string(m), cert.term_bound(m, observable));
    return std::vector<Row>{r};
  }};
}

std::string indexed_path(const std::string &path, std::size_t index, std::size_t count) {
  if (count <= 1)
    return path;
  const std::size_t dot = path.find_last_of('.');
  const std::size_t slash = path.find_last_of('/');
  const bool has_ext = dot != std::string::npos && (slash == std::string::npos || dot > slash);
  const std::string stem = has_ext ? path.substr(0, dot) : path;
  return stem + "_" + std::to_string(index) + (has_ext ? path.substr(dot) : "");
}

std::vector<Job> plan_oracle(const Json &p, std::size_t index, std::size_t count,
                             std::uint64_t seed) {
  return {[p, index, count, seed] {
    const JunctionSpec spec = junction_from_json(p["junction"]);
    const Json &o = p["options"];
    LatticeParams lp;
    lp.geometry = o["geometry"] == "box" ? LatticeGeometry::box : LatticeGeometry::chain;
    lp.n_I = o["n_I"];
    lp.n_II = o["n_II"];
    lp.hopping = o["hopping"];
    lp.onsite = o["onsite"];
    lp.g = spec.g;
    lp.coupling_width = o["coupling_width"];
    const LatticeJunction j = build_junction(lp);

    RunOptions ro;
    ro.t_max = o["t_max"];
    ro.dt = o["dt"];
    ro.checkpoints = o["checkpoints"];
    const TraceRecord rec = run(j, spec.res_I, spec.res_II, ro);

    const std::string trace = o["trace_path"];
    if (!trace.empty()) {
      const std::string path = indexed_path(trace, index, count);
      std::ofstream out(path, std::ios::binary);
      if (!out)
        throw InvalidArgument("cannot write trace file " + path);
      write_trace_csv(out, rec);
    }

    PlateauWindow window;
    window.t_start = o["window_start"];
    window.t_end = o["window_end"];
    const Plateau plateau = plateau_current(rec, window);

    double entropy = kNaN;
    bool nonnegative = false;
    if (std::isfinite(spec.res_I.beta) && std::isfinite(spec.res_II.beta)) {
      const EntropyCheck e = entropy_check(rec, spec.res_I, spec.res_II);
      entropy = e.average;
      nonnegative = e.nonnegative;
    }

    // Random probe times check the balance laws away from the sampling grid.
    const int probes = o["probes"];
    std::mt19937_64 rng(seed ^ (0x9E3779B97F4A7C15ULL * (index + 1)));
    const CorrelationMatrix gamma0 = initial_state(j, spec.res_I, spec.res_II);
    double particle_balance = 0.0, energy_balance = 0.0;
    for (int k = 0; k < probes; ++k) {
      const double t = static_cast<double>(rng() >> 11) * 0x1.0p-53 * ro.t_max;
      const Currents c = currents(j, evolve(j, gamma0, t));
      particle_balance = std::max(particle_balance, std::abs(c.J_I + c.J_II));
      energy_balance = std::max(energy_balance, std::abs(c.P_I + c.P_II + c.dW_dt));
    }

    Row r;
    r.add("J_plateau", plateau.J.mean)
        .add("J_std", plateau.J.std)
        .add("J_drift", plateau.J.drift)
        .add("P_plateau", plateau.P.mean)
        .add("P_std", plateau.P.std)
        .add("P_drift", plateau.P.drift)
        .add("plateau_samples", static_cast<std::int64_t>(plateau.samples))
        .add("entropy_average", entropy)
        .add("entropy_nonnegative", nonnegative)
        .add("particle_drift", rec.particle_drift)
        .add("energy_drift", rec.energy_drift)
        .add("current_imbalance", rec.current_imbalance)
        .add("spectrum_min", rec.spectrum_min)
        .add("spectrum_max", rec.spectrum_max)
        .add("probe_particle_balance", probes > 0 ? particle_balance : kNaN)
        .add("probe_energy_balance", probes > 0 ? energy_balance : kNaN);
    return std::vector<Row>{r};
  }};
}

std::vector<Job> plan(const std::string &command, const Json &p, std::size_t index,
                      std::size_t count, std::uint64_t seed) {
  if (command == "currents")
    return plan_currents(p);
  if (command == "iv-sweep")
    return plan_iv_sweep(p);
  if (command == "resistance-curve")
    return plan_resistance(p);
  if (command == "onsager")
    return plan_onsager(p);
  if (command == "entropy-grid")
    return plan_entropy_grid(p);
  if (command == "thermal-power")
    return plan_thermal_power(p);
  if (command == "certify")
    return plan_certify(p);
  return plan_oracle(p, index, count, seed);
}

} // namespace

int exit_code_for(const Error &error) {
  if (const auto *p = dynamic_cast<const PointError *>(&error))
    return p->exit_code();
  const std::string &k = error.kind();
  if (k == "NonConvergent" || k == "TruncationInsufficient" || k == "StepTooLarge" || k == "NoPlateau")
    return 3;
  if (k == "ParseError" || k == "ValidationError" || k == "InvalidArgument" || k == "MissingKernel" ||
      k == "DegenerateKernel" || k == "DimensionTooLow" || k == "BadGeometry" ||
      k == "InvalidIncidence")
    return 2;
  return 1;
}

RunOutcome execute(const RunConfig &config, const RunContext &context) {
  struct Task {
    std::size_t point;
    Job job;
  };
  const std::size_t points = config.point_count();
  std::vector<Json> echoes;
  std::vector<Task> tasks;
  for (std::size_t i = 0; i < points; ++i) {
    const Json p = config.point(i);
    echoes.push_back(p);
    for (Job &job : plan(config.command, p, i, points, context.seed))
      tasks.push_back({i, std::move(job)});
  }

  std::vector<std::vector<Row>> results(tasks.size());
  std::vector<std::exception_ptr> failures(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k; (k = next.fetch_add(1)) < tasks.size();) {
      try {
        results[k] = tasks[k].job();
      } catch (...) {
        failures[k] = std::current_exception();
      }
    }
  };
  const int threads = std::max(1, std::min<int>(context.threads, static_cast<int>(tasks.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t)
    pool.emplace_back(worker);
  worker();
  for (std::thread &t : pool)
    t.join();

  for (std::size_t k = 0; k < tasks.size(); ++k) {
    if (!failures[k])
      continue;
    try {
      std::rethrow_exception(failures[k]);
    } catch (const Error &e) {
      throw PointError(tasks[k].point, e.kind(), e.what(), exit_code_for(e));
    } catch (const std::exception &e) {
      throw PointError(tasks[k].point, "InternalError", e.what(), 1);
    }
  }

  RunOutcome outcome;
  std::vector<Row> echo_rows;
  for (const Json &p : echoes)
    echo_rows.push_back(echo(p));
  for (std::size_t k = 0; k < tasks.size(); ++k) {
    for (Row &r : results[k]) {
      Row full = echo_rows[tasks[k].point];
      full.cells.insert(full.cells.begin(),
                        {{"point", Cell{static_cast<std::int64_t>(tasks[k].point)}},
                         {"command", Cell{config.command}}});
      full.cells.insert(full.cells.end(), r.cells.begin(), r.cells.end());
      if (config.command == "certify") {
        for (const auto &[key, cell] : r.cells)
          if (key == "converges" && !std::get<bool>(cell))
            outcome.status = 4;
      }
      outcome.rows.push_back(std::move(full));
    }
  }
  return outcome;
}

} // namespace ness::cli
