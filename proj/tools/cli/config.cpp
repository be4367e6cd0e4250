#include "config.hpp"

#include <cmath>
#include <limits>

namespace ness::cli {

namespace {

std::string join(const std::string &path, const std::string &key) {
  return path.empty() ? key : path + "." + key;
}

bool is_inf_text(const Json &v) {
  return v.is_string() && (v == "inf" || v == "+inf" || v == "Infinity");
}

Json reservoir_defaults() { return Json{{"beta", 1.0}, {"mu", 0.0}}; }

Json junction_defaults() {
  return Json{{"dimension", 3}, {"res_I", reservoir_defaults()}, {"res_II", reservoir_defaults()},
              {"g", 1.0},       {"xi", 1.0}};
}

Json quadrature_defaults() {
  const QuadratureConfig q;
  return Json{{"rel_tol", q.rel_tol},
              {"abs_tol", q.abs_tol},
              {"tail_constant", q.tail_constant},
              {"max_subdivisions", q.max_subdivisions},
              {"rule_order", q.rule_order}};
}

Json kernel_defaults(const std::string &family) {
  if (family == "gaussian" || family == "lorentzian")
    return Json{{"family", family}, {"amplitude", 1.0}, {"width", 1.0}};
  if (family == "poly_cutoff")
    return Json{{"family", family}, {"amplitude", 1.0}, {"cutoff", 1.0}, {"power", 2}};
  return Json{{"family", family}, {"path", ""}, {"k", Json::array()}, {"values", Json::array()}};
}

Json options_defaults(const std::string &command) {
  if (command == "iv-sweep")
    return Json{{"dmu_start", -0.1}, {"dmu_stop", 0.1}, {"dmu_count", 11}, {"bias", "symmetric"}};
  if (command == "resistance-curve")
    return Json{{"sommerfeld", true}};
  if (command == "onsager")
    return Json{{"h", 1e-3}};
  if (command == "entropy-grid")
    return Json{{"betas", {0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0}},
                {"mus", {-1.0, -0.5, 0.0, 0.5, 1.0, 1.5, 2.0}}};
  if (command == "certify")
    return Json{{"truncation", 40}, {"tail_limit", 1e-2},  {"m0", 3},
                {"max_order", 10},  {"observable_norm", 1.0}, {"extra_terms", Json::array()}};
  if (command == "oracle")
    return Json{{"geometry", "chain"}, {"n_I", 200},          {"n_II", 200},
                {"hopping", 1.0},      {"onsite", 2.0},       {"coupling_width", 1},
                {"t_max", 150.0},      {"dt", 0.1},           {"checkpoints", 6},
                {"window_start", 40.0}, {"window_end", 150.0}, {"probes", 0},
                {"trace_path", ""}};
  return Json::object();
}

Json extra_term_template() { return Json{{"order", 1}, {"blocks", 1}, {"per_block", 0.0}}; }

Json merge(const Json &defaults, const Json &given, const std::string &path);

Json check_value(const Json &dv, const Json &gv, const std::string &path, const std::string &key) {
  if (dv.is_object())
    return merge(dv, gv, path);
  if (dv.is_number_integer()) {
    if (gv.is_number_integer())
      return gv;
    if (gv.is_number_float() && std::nearbyint(gv.get<double>()) == gv.get<double>() &&
        std::abs(gv.get<double>()) < 1e9)
      return Json(static_cast<std::int64_t>(gv.get<double>()));
    throw ValidationError(path, "expected an integer");
  }
  if (dv.is_number()) {
    if (gv.is_number())
      return Json(gv.get<double>());
    if (key == "beta" && is_inf_text(gv))
      return Json("inf");
    throw ValidationError(path, key == "beta" ? "expected a number or \"inf\"" : "expected a number");
  }
  if (dv.is_boolean()) {
    if (!gv.is_boolean())
      throw ValidationError(path, "expected true or false");
    return gv;
  }
  if (dv.is_string()) {
    if (!gv.is_string())
      throw ValidationError(path, "expected a string");
    return gv;
  }
  if (dv.is_array()) {
    if (!gv.is_array())
      throw ValidationError(path, "expected an array");
    Json out = Json::array();
    for (std::size_t i = 0; i < gv.size(); ++i) {
      const std::string at = path + "." + std::to_string(i);
      if (key == "extra_terms")
        out.push_back(merge(extra_term_template(), gv[i], at));
      else
        out.push_back(check_value(Json(0.0), gv[i], at, ""));
    }
    return out;
  }
  throw ValidationError(path, "unsupported value");
}

Json merge(const Json &defaults, const Json &given, const std::string &path) {
  if (!given.is_object())
    throw ValidationError(path.empty() ? "<root>" : path, "expected an object");
  for (const auto &[key, value] : given.items())
    if (!defaults.contains(key))
      throw ValidationError(join(path, key), "unknown key");
  Json out = Json::object();
  for (const auto &[key, dv] : defaults.items())
    out[key] = given.contains(key) ? check_value(dv, given[key], join(path, key), key) : dv;
  return out;
}

Json resolve_kernel(const Json &given, const std::string &path) {
  if (!given.is_object())
    throw ValidationError(path, "expected an object");
  std::string family = "gaussian";
  if (given.contains("family")) {
    if (!given["family"].is_string())
      throw ValidationError(path + ".family", "expected a string");
    family = given["family"].get<std::string>();
  }
  if (family != "gaussian" && family != "lorentzian" && family != "poly_cutoff" && family != "table")
    throw ValidationError(path + ".family",
                          "unknown family \"" + family + "\" (gaussian, lorentzian, poly_cutoff, table)");
  Json out = merge(kernel_defaults(family), given, path);
  if (family == "table") {
    const bool from_file = !out["path"].get<std::string>().empty();
    const bool inline_samples = !out["k"].empty() || !out["values"].empty();
    if (from_file == inline_samples)
      throw ValidationError(path, "table kernels need either path or k and values");
    if (from_file) {
      out.erase("k");
      out.erase("values");
    } else {
      out.erase("path");
    }
  }
  return out;
}

Json resolve_junction(const Json &given, const std::string &command) {
  if (!given.is_object())
    throw ValidationError("junction", "expected an object");
  Json plain = Json::object();
  for (const auto &[key, value] : given.items())
    if (key != "kernel1" && key != "kernel2")
      plain[key] = value;
  Json out = merge(junction_defaults(), plain, "junction");
  const Json gaussian = kernel_defaults("gaussian");
  for (const char *key : {"kernel1", "kernel2"}) {
    const std::string path = std::string("junction.") + key;
    if (given.contains(key)) {
      if (!given[key].is_null())
        out[key] = resolve_kernel(given[key], path);
    } else if (std::string(key) == "kernel1" || command == "thermal-power") {
      out[key] = gaussian;
    }
  }
  return out;
}

Json resolve_sweep_axis(const Json &given, const std::string &path) {
  const Json axis_defaults{{"path", ""}, {"start", 0.0}, {"stop", 0.0}, {"count", 1}, {"scale", "linear"}};
  if (given.is_object() && !given.contains("path"))
    throw ValidationError(path + ".path", "missing");
  return merge(axis_defaults, given, path);
}

Json::json_pointer pointer_for(const std::string &dotted) {
  std::string p = "/";
  for (char c : dotted)
    p += (c == '.') ? '/' : c;
  return Json::json_pointer(p);
}

double number_of(const Json &v, const std::string &path) {
  if (is_inf_text(v))
    return std::numeric_limits<double>::infinity();
  if (!v.is_number())
    throw ValidationError(path, "expected a number");
  return v.get<double>();
}

void require(bool ok, const std::string &field, const std::string &what) {
  if (!ok)
    throw ValidationError(field, what);
}

void validate_point(const std::string &command, const Json &p) {
  JunctionSpec spec;
  try {
    spec = junction_from_json(p["junction"]);
    spec.validate();
  } catch (const ValidationError &) {
    throw;
  } catch (const InvalidArgument &e) {
    throw ValidationError("junction", e.what());
  }
  try {
    quadrature_from_json(p["quadrature"]).validate();
  } catch (const InvalidArgument &e) {
    throw ValidationError("quadrature", e.what());
  }
  const Json &o = p["options"];
  if (command == "iv-sweep") {
    require(o["dmu_count"] >= 1, "options.dmu_count", "must be >= 1");
    require(o["bias"] == "symmetric" || o["bias"] == "offset", "options.bias",
            "must be symmetric or offset");
    require(spec.res_I.beta == spec.res_II.beta, "junction.res_II.beta",
            "iv-sweep needs equal inverse temperatures");
  } else if (command == "onsager") {
    require(o["h"].get<double>() > 0.0, "options.h", "must be > 0");
    require(std::isfinite(spec.res_I.beta), "junction.res_I.beta", "onsager needs a finite beta");
  } else if (command == "entropy-grid") {
    require(!o["betas"].empty(), "options.betas", "must not be empty");
    require(!o["mus"].empty(), "options.mus", "must not be empty");
    for (std::size_t i = 0; i < o["betas"].size(); ++i) {
      const double b = o["betas"][i].get<double>();
      require(b > 0.0 && std::isfinite(b), "options.betas." + std::to_string(i),
              "must be finite and > 0");
    }
  } else if (command == "certify") {
    require(o["truncation"] >= 1, "options.truncation", "must be >= 1");
    require(o["tail_limit"].get<double>() > 0.0, "options.tail_limit", "must be > 0");
    require(o["m0"] >= 0, "options.m0", "must be >= 0");
    require(o["max_order"] >= 1, "options.max_order", "must be >= 1");
    require(o["observable_norm"].get<double>() >= 0.0, "options.observable_norm", "must be >= 0");
    for (std::size_t i = 0; i < o["extra_terms"].size(); ++i) {
      const Json &t = o["extra_terms"][i];
      const std::string at = "options.extra_terms." + std::to_string(i);
      require(t["order"] >= 1, at + ".order", "must be >= 1");
      require(t["blocks"] >= 1, at + ".blocks", "must be >= 1");
      require(t["per_block"].get<double>() >= 0.0, at + ".per_block", "must be >= 0");
    }
  } else if (command == "oracle") {
    const std::string geometry = o["geometry"];
    require(geometry == "chain" || geometry == "box", "options.geometry", "must be chain or box");
    require(o["n_I"] >= 1 && o["n_II"] >= 1, "options.n_I", "site counts must be >= 1");
    require(o["coupling_width"] >= 1, "options.coupling_width", "must be >= 1");
    require(o["dt"].get<double>() > 0.0, "options.dt", "must be > 0");
    require(o["t_max"].get<double>() > 0.0, "options.t_max", "must be > 0");
    require(o["checkpoints"] >= 2, "options.checkpoints", "must be >= 2");
    require(o["probes"] >= 0, "options.probes", "must be >= 0");
    require(o["window_start"].get<double>() < o["window_end"].get<double>(), "options.window_start",
            "must be below window_end");
  }
}

} // namespace

std::vector<double> SweepAxis::values() const {
  std::vector<double> out(static_cast<std::size_t>(count));
  // Weighted form so that a range symmetric about 0 yields exact negatives.
  const double n = count - 1;
  for (int i = 0; i < count; ++i) {
    if (count == 1)
      out[i] = start;
    else if (log)
      out[i] = std::exp(((n - i) * std::log(start) + i * std::log(stop)) / n);
    else
      out[i] = ((n - i) * start + i * stop) / n;
  }
  out.front() = start;
  if (count > 1)
    out.back() = stop;
  return out;
}

std::size_t RunConfig::point_count() const {
  std::size_t n = 1;
  for (const SweepAxis &a : sweep)
    n *= static_cast<std::size_t>(a.count);
  return n;
}

Json RunConfig::point(std::size_t index) const {
  Json p = parameters;
  for (std::size_t k = sweep.size(); k-- > 0;) {
    const SweepAxis &a = sweep[k];
    const double v = a.values()[index % a.count];
    index /= a.count;
    Json &leaf = p[pointer_for(a.path)];
    if (leaf.is_number_integer()) {
      const double r = std::nearbyint(v);
      if (std::abs(r - v) > 1e-9 * std::max(1.0, std::abs(v)))
        throw ValidationError(a.path, "integer parameter swept to non-integer value " +
                                          std::to_string(v));
      leaf = static_cast<std::int64_t>(r);
    } else {
      leaf = v;
    }
  }
  return p;
}

RunConfig parse_config(std::string_view text) {
  Json root;
  try {
    root = Json::parse(text.begin(), text.end(), nullptr, true, true);
  } catch (const Json::parse_error &e) {
    std::size_t line = 1, column = 1;
    const std::size_t end = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
    for (std::size_t i = 0; i < end; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw ParseError(e.what(), line, column);
  }
  if (!root.is_object())
    throw ValidationError("<root>", "expected an object");
  for (const auto &[key, value] : root.items())
    if (key != "command" && key != "junction" && key != "quadrature" && key != "sweep" &&
        key != "output" && key != "options")
      throw ValidationError(key, "unknown key");

  RunConfig cfg;
  if (!root.contains("command") || !root["command"].is_string())
    throw ValidationError("command", "missing or not a string");
  cfg.command = root["command"];
  bool known = false;
  for (const std::string &c : commands())
    known = known || c == cfg.command;
  if (!known)
    throw ValidationError("command", "unknown command \"" + cfg.command + "\"");

  cfg.parameters["junction"] = resolve_junction(root.value("junction", Json::object()), cfg.command);
  cfg.parameters["quadrature"] =
      merge(quadrature_defaults(), root.value("quadrature", Json::object()), "quadrature");
  cfg.parameters["options"] =
      merge(options_defaults(cfg.command), root.value("options", Json::object()), "options");

  const Json out = merge(Json{{"path", ""}, {"format", "csv"}}, root.value("output", Json::object()),
                         "output");
  cfg.output.path = out["path"];
  cfg.output.format = out["format"];
  require(cfg.output.format == "csv" || cfg.output.format == "json", "output.format",
          "must be csv or json");

  if (root.contains("sweep")) {
    require(root["sweep"].is_array(), "sweep", "expected an array of axes");
    for (std::size_t i = 0; i < root["sweep"].size(); ++i) {
      const std::string at = "sweep." + std::to_string(i);
      const Json axis = resolve_sweep_axis(root["sweep"][i], at);
      SweepAxis a;
      a.path = axis["path"];
      a.start = axis["start"];
      a.stop = axis["stop"];
      a.count = axis["count"];
      const std::string scale = axis["scale"];
      require(scale == "linear" || scale == "log", at + ".scale", "must be linear or log");
      a.log = scale == "log";
      require(a.count >= 1, at + ".count", "must be >= 1");
      require(std::isfinite(a.start) && std::isfinite(a.stop), at, "start and stop must be finite");
      require(!a.log || (a.start > 0.0 && a.stop > 0.0), at, "log axes need start, stop > 0");
      const bool rooted = a.path.rfind("junction.", 0) == 0 || a.path.rfind("quadrature.", 0) == 0 ||
                          a.path.rfind("options.", 0) == 0;
      const Json::json_pointer ptr = pointer_for(a.path);
      require(rooted && cfg.parameters.contains(ptr), at + ".path",
              "no parameter \"" + a.path + "\"");
      const Json &leaf = cfg.parameters[ptr];
      require(leaf.is_number() || is_inf_text(leaf), at + ".path",
              "\"" + a.path + "\" is not numeric");
      cfg.sweep.push_back(a);
    }
  }

  for (std::size_t i = 0; i < cfg.point_count(); ++i)
    validate_point(cfg.command, cfg.point(i));
  return cfg;
}

ReservoirState reservoir_from_json(const Json &node) {
  ReservoirState r;
  r.beta = number_of(node["beta"], "beta");
  r.mu = number_of(node["mu"], "mu");
  return r;
}

RadialFormFactor kernel_from_json(const Json &node) {
  const std::string family = node["family"];
  if (family == "gaussian")
    return RadialFormFactor::gaussian(node["amplitude"], node["width"]);
  if (family == "lorentzian")
    return RadialFormFactor::lorentzian(node["amplitude"], node["width"]);
  if (family == "poly_cutoff")
    return RadialFormFactor::poly_cutoff(node["amplitude"], node["cutoff"], node["power"]);
  if (node.contains("path"))
    return RadialFormFactor::table_from_csv(node["path"].get<std::string>());
  return RadialFormFactor::table(node["k"].get<std::vector<double>>(),
                                 node["values"].get<std::vector<double>>());
}

JunctionSpec junction_from_json(const Json &node) {
  JunctionSpec spec;
  spec.dimension = node["dimension"];
  spec.res_I = reservoir_from_json(node["res_I"]);
  spec.res_II = reservoir_from_json(node["res_II"]);
  spec.g = node["g"];
  spec.xi = node["xi"];
  for (const char *key : {"kernel1", "kernel2"}) {
    if (!node.contains(key))
      continue;
    RadialFormFactor k = [&] {
      try {
        return kernel_from_json(node[key]);
      } catch (const InvalidArgument &e) {
        throw ValidationError(std::string("junction.") + key, e.what());
      }
    }();
    if (std::string(key) == "kernel1")
      spec.kernel1 = k;
    else
      spec.kernel2 = PairFormFactor(k);
  }
  return spec;
}

QuadratureConfig quadrature_from_json(const Json &node) {
  QuadratureConfig q;
  q.rel_tol = node["rel_tol"];
  q.abs_tol = node["abs_tol"];
  q.tail_constant = node["tail_constant"];
  q.max_subdivisions = node["max_subdivisions"];
  q.rule_order = node["rule_order"];
  return q;
}

std::vector<std::pair<std::string, Json>> flatten(const Json &node, const std::string &prefix) {
  std::vector<std::pair<std::string, Json>> out;
  if (node.is_object()) {
    for (const auto &[key, value] : node.items()) {
      auto sub = flatten(value, join(prefix, key));
      out.insert(out.end(), sub.begin(), sub.end());
    }
  } else if (node.is_array()) {
    out.emplace_back(prefix, Json(node.dump()));
  } else {
    out.emplace_back(prefix, node);
  }
  return out;
}

} // namespace ness::cli
