#include "ness/model.hpp"

#include "ness/diagnostics.hpp"
#include "ness/errors.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_spline.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace ness {

void ReservoirState::validate() const {
  if (!(beta > 0.0))
    throw InvalidArgument("reservoir beta must be > 0 or +inf, got " + std::to_string(beta));
  if (!std::isfinite(mu))
    throw InvalidArgument("reservoir mu must be finite");
}

double fermi(double energy, const ReservoirState &r) {
  if (r.zero_temperature()) {
    if (energy < r.mu)
      return 1.0;
    if (energy > r.mu)
      return 0.0;
    return 0.5;
  }
  const double x = r.beta * (energy - r.mu);
  if (x > 0.0) {
    const double e = std::exp(-x);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(x));
}

double fermi_diff(double energy, const ReservoirState &res_I, const ReservoirState &res_II) {
  if (res_I == res_II)
    return 0.0;
  if (res_I.zero_temperature() || res_II.zero_temperature())
    return fermi(energy, res_II) - fermi(energy, res_I);

  // (e^a - e^b) / ((e^a + 1)(e^b + 1)) = expm1(a - b) * (1 - rho_II) * rho_I
  const double a = res_I.beta * (energy - res_I.mu);
  const double b = res_II.beta * (energy - res_II.mu);
  const double d = a - b;
  if (d > 700.0)
    return fermi(energy, res_II) - fermi(energy, res_I);
  const double rho_I = fermi(energy, res_I);
  const double hole_II = fermi(-energy, ReservoirState{res_II.beta, -res_II.mu});
  return std::expm1(d) * hole_II * rho_I;
}

double fermi_diff(double energy, const JunctionSpec &spec) {
  return fermi_diff(energy, spec.res_I, spec.res_II);
}

std::string to_string(KernelFamily family) {
  switch (family) {
  case KernelFamily::gaussian:
    return "gaussian";
  case KernelFamily::lorentzian:
    return "lorentzian";
  case KernelFamily::poly_cutoff:
    return "poly_cutoff";
  case KernelFamily::table:
    return "table";
  }
  return "unknown";
}

KernelFamily kernel_family_from_string(const std::string &name) {
  if (name == "gaussian")
    return KernelFamily::gaussian;
  if (name == "lorentzian")
    return KernelFamily::lorentzian;
  if (name == "poly_cutoff")
    return KernelFamily::poly_cutoff;
  if (name == "table")
    return KernelFamily::table;
  throw InvalidArgument("unknown kernel family '" + name + "'");
}

// Natural cubic spline of the diagonal u(k,k) in the energy variable E = k^2.
struct RadialFormFactor::Spline {
  gsl_spline *spline = nullptr;
  double e_min = 0.0;
  double e_max = 0.0;

  Spline(const std::vector<double> &energies, const std::vector<double> &values) {
    gsl_set_error_handler_off();
    spline = gsl_spline_alloc(gsl_interp_cspline, energies.size());
    if (gsl_spline_init(spline, energies.data(), values.data(), energies.size()) != GSL_SUCCESS) {
      gsl_spline_free(spline);
      throw InvalidArgument("table kernel: spline construction failed");
    }
    e_min = energies.front();
    e_max = energies.back();
  }
  Spline(const Spline &) = delete;
  Spline &operator=(const Spline &) = delete;
  ~Spline() { gsl_spline_free(spline); }

  // accel = nullptr keeps evaluation thread safe.
  Derivatives eval(double e) const {
    if (e > e_max)
      return {};
    if (e < e_min)
      return {gsl_spline_eval(spline, e_min, nullptr), 0.0, 0.0};
    return {gsl_spline_eval(spline, e, nullptr), gsl_spline_eval_deriv(spline, e, nullptr),
            gsl_spline_eval_deriv2(spline, e, nullptr)};
  }
};

RadialFormFactor RadialFormFactor::gaussian(double amplitude, double width) {
  if (!(width > 0.0) || !(amplitude >= 0.0) || !std::isfinite(amplitude))
    throw InvalidArgument("gaussian kernel needs width > 0 and finite amplitude >= 0");
  RadialFormFactor k;
  k.family_ = KernelFamily::gaussian;
  k.params_ = {amplitude, width};
  return k;
}

RadialFormFactor RadialFormFactor::lorentzian(double amplitude, double width) {
  if (!(width > 0.0) || !(amplitude >= 0.0) || !std::isfinite(amplitude))
    throw InvalidArgument("lorentzian kernel needs width > 0 and finite amplitude >= 0");
  RadialFormFactor k;
  k.family_ = KernelFamily::lorentzian;
  k.params_ = {amplitude, width};
  return k;
}

RadialFormFactor RadialFormFactor::poly_cutoff(double amplitude, double cutoff, int power) {
  if (!(cutoff > 0.0) || power < 0 || !(amplitude >= 0.0) || !std::isfinite(amplitude))
    throw InvalidArgument("poly_cutoff kernel needs cutoff > 0, power >= 0, finite amplitude >= 0");
  RadialFormFactor k;
  k.family_ = KernelFamily::poly_cutoff;
  k.params_ = {amplitude, cutoff, static_cast<double>(power)};
  return k;
}

RadialFormFactor RadialFormFactor::table(std::vector<double> ks, std::vector<double> values) {
  if (ks.size() != values.size())
    throw InvalidArgument("table kernel: k and value columns differ in length");
  if (ks.size() < 3)
    throw InvalidArgument("table kernel: need at least 3 samples");
  for (std::size_t i = 0; i < ks.size(); ++i) {
    if (!(ks[i] >= 0.0) || !std::isfinite(ks[i]))
      throw InvalidArgument("table kernel: k must be finite and >= 0");
    if (i > 0 && !(ks[i] > ks[i - 1]))
      throw InvalidArgument("table kernel: k must be strictly increasing");
    if (!(values[i] >= 0.0) || !std::isfinite(values[i]))
      throw InvalidArgument("table kernel: values must be finite and >= 0");
  }
  std::vector<double> energies(ks.size());
  std::transform(ks.begin(), ks.end(), energies.begin(), [](double k) { return k * k; });

  RadialFormFactor k;
  k.family_ = KernelFamily::table;
  k.spline_ = std::make_shared<const Spline>(energies, values);
  k.table_k_ = std::move(ks);
  k.table_v_ = std::move(values);
  return k;
}

RadialFormFactor RadialFormFactor::table_from_csv(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in)
    throw InvalidArgument("cannot open table kernel file " + path.string());
  std::vector<double> ks, vs;
  std::string line;
  int line_no = 0;
  auto parse = [](std::string_view s, double &out) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
      s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
      s.remove_suffix(1);
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size() && !s.empty();
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#')
      continue;
    const auto comma = line.find(',');
    double k = 0, v = 0;
    const bool ok = comma != std::string::npos &&
                    parse(std::string_view(line).substr(0, comma), k) &&
                    parse(std::string_view(line).substr(comma + 1), v);
    if (!ok) {
      if (ks.empty() && line_no == 1)
        continue; // header
      throw InvalidArgument(path.string() + ":" + std::to_string(line_no) +
                            ": expected 'k,value'");
    }
    ks.push_back(k);
    vs.push_back(v);
  }
  return table(std::move(ks), std::move(vs));
}

double RadialFormFactor::factor(double energy) const {
  if (energy < 0.0)
    energy = 0.0;
  switch (family_) {
  case KernelFamily::gaussian: {
    const double s = params_[1];
    return params_[0] * std::exp(-energy / (s * s));
  }
  case KernelFamily::lorentzian: {
    const double x = 1.0 + energy / (params_[1] * params_[1]);
    return params_[0] / (x * x);
  }
  case KernelFamily::poly_cutoff: {
    const double kc2 = params_[1] * params_[1];
    if (energy > kc2)
      return 0.0;
    return params_[0] * std::pow(1.0 - energy / kc2, params_[2]);
  }
  case KernelFamily::table:
    return std::sqrt(std::max(0.0, table_scale_ * spline_->eval(energy).value));
  }
  return 0.0;
}

double RadialFormFactor::operator()(double k, double l) const {
  if (family_ == KernelFamily::table) {
    const double tk = std::max(0.0, spline_->eval(k * k).value);
    const double tl = std::max(0.0, spline_->eval(l * l).value);
    return table_scale_ * std::sqrt(tk * tl);
  }
  return factor(k * k) * factor(l * l);
}

Derivatives RadialFormFactor::diagonal(double energy) const {
  if (energy < 0.0)
    energy = 0.0;
  switch (family_) {
  case KernelFamily::gaussian: {
    const double a = params_[0], s2 = params_[1] * params_[1];
    const double g = a * a * std::exp(-2.0 * energy / s2);
    return {g, -2.0 / s2 * g, 4.0 / (s2 * s2) * g};
  }
  case KernelFamily::lorentzian: {
    const double a2 = params_[0] * params_[0], s2 = params_[1] * params_[1];
    const double x = 1.0 + energy / s2;
    const double x4 = x * x * x * x;
    return {a2 / x4, -4.0 * a2 / (s2 * x4 * x), 20.0 * a2 / (s2 * s2 * x4 * x * x)};
  }
  case KernelFamily::poly_cutoff: {
    const double a2 = params_[0] * params_[0], kc2 = params_[1] * params_[1];
    const double n2 = 2.0 * params_[2];
    if (energy > kc2)
      return {};
    const double y = 1.0 - energy / kc2;
    Derivatives out;
    out.value = a2 * std::pow(y, n2);
    if (n2 >= 1.0)
      out.d1 = -n2 / kc2 * a2 * std::pow(y, n2 - 1.0);
    if (n2 >= 2.0)
      out.d2 = n2 * (n2 - 1.0) / (kc2 * kc2) * a2 * std::pow(y, n2 - 2.0);
    return out;
  }
  case KernelFamily::table: {
    Derivatives d = spline_->eval(energy);
    if (d.value < 0.0)
      d.value = 0.0;
    d.value *= table_scale_;
    d.d1 *= table_scale_;
    d.d2 *= table_scale_;
    return d;
  }
  }
  return {};
}

double RadialFormFactor::support_end() const {
  switch (family_) {
  case KernelFamily::poly_cutoff:
    return params_[1] * params_[1];
  case KernelFamily::table:
    return spline_->e_max;
  default:
    return std::numeric_limits<double>::infinity();
  }
}

std::vector<double> RadialFormFactor::breakpoints() const {
  switch (family_) {
  case KernelFamily::poly_cutoff:
    return {params_[1] * params_[1]};
  case KernelFamily::table: {
    std::vector<double> out;
    if (spline_->e_min > 0.0)
      out.push_back(spline_->e_min);
    out.push_back(spline_->e_max);
    return out;
  }
  default:
    return {};
  }
}

double RadialFormFactor::energy_scale() const {
  switch (family_) {
  case KernelFamily::gaussian:
  case KernelFamily::lorentzian:
  case KernelFamily::poly_cutoff:
    return params_[1] * params_[1];
  case KernelFamily::table:
    return spline_->e_max;
  }
  return 1.0;
}

bool RadialFormFactor::integrable(int dimension) const {
  if (is_zero())
    return true;
  // (1/2) int E^(d-2) u(sqrt E, sqrt E) dE: d = 1 diverges at E = 0 for kernels nonzero there.
  if (dimension < 2)
    return diagonal(0.0).value == 0.0;
  if (family_ == KernelFamily::lorentzian)
    return dimension < 5; // u(k,k) ~ E^-4
  return true;
}

RadialFormFactor RadialFormFactor::scaled(double lambda) const {
  RadialFormFactor out = *this;
  if (family_ == KernelFamily::table)
    out.table_scale_ *= lambda * lambda;
  else
    out.params_[0] *= std::abs(lambda); // u = h h stays >= 0 for either sign of lambda
  return out;
}

bool RadialFormFactor::is_zero() const {
  if (family_ == KernelFamily::table)
    return table_scale_ == 0.0 ||
           std::all_of(table_v_.begin(), table_v_.end(), [](double v) { return v == 0.0; });
  return params_[0] == 0.0;
}

double PairFormFactor::operator()(double k1, double k2, double l1, double l2) const {
  return at_energies(k1 * k1, k2 * k2, l1 * l1, l2 * l2);
}

double PairFormFactor::at_energies(double e1, double e2, double f1, double f2) const {
  return profile_.factor(e1) * profile_.factor(e2) * profile_.factor(f1) * profile_.factor(f2);
}

void JunctionSpec::validate() const {
  if (dimension < 1)
    throw InvalidArgument("dimension must be >= 1");
  res_I.validate();
  res_II.validate();
  if (!kernel1 && !kernel2)
    throw InvalidArgument("junction needs at least one kernel (kernel1 or kernel2)");
  if (!std::isfinite(g) || !std::isfinite(xi))
    throw InvalidArgument("couplings g and xi must be finite");
  if (dimension < 3)
    warn("dimension " + std::to_string(dimension) +
         " < 3: transport integrals are evaluated but Dyson certificates do not apply");
  if (kernel1 && !kernel1->integrable(dimension))
    warn("kernel1 diagonal is not integrable against k^(2d-3) in d = " +
         std::to_string(dimension) + "; results rely on Fermi-factor decay");
}

JunctionSpec JunctionSpec::swapped() const {
  JunctionSpec out = *this;
  std::swap(out.res_I, out.res_II);
  return out;
}

} // namespace ness
