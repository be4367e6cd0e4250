#pragma once

#include "ness/errors.hpp"
#include "ness/model.hpp"
#include "ness/quadrature.hpp"

#include <json.hpp>

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace ness::cli {

using Json = nlohmann::ordered_json;

/// Malformed config text; line and column are 1-based.
class ParseError : public Error {
public:
  ParseError(const std::string &what, std::size_t line, std::size_t column)
      : Error("ParseError", what), line_(line), column_(column) {}
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

private:
  std::size_t line_;
  std::size_t column_;
};

/// Well-formed config that breaks the schema; field is the dotted path.
class ValidationError : public Error {
public:
  ValidationError(const std::string &field, const std::string &what)
      : Error("ValidationError", field + ": " + what), field_(field) {}
  const std::string &field() const noexcept { return field_; }

private:
  std::string field_;
};

inline const std::vector<std::string> &commands() {
  static const std::vector<std::string> names{"currents",      "iv-sweep",     "resistance-curve",
                                              "onsager",       "entropy-grid", "thermal-power",
                                              "certify",       "oracle"};
  return names;
}

struct SweepAxis {
  /// Dotted path into the resolved parameters, e.g. "junction.res_II.mu".
  std::string path;
  double start = 0.0;
  double stop = 0.0;
  int count = 1;
  bool log = false;

  std::vector<double> values() const;
};

struct OutputSpec {
  /// Empty means stdout.
  std::string path;
  std::string format = "csv";
};

struct RunConfig {
  std::string command;
  /// {"junction", "quadrature", "options"} with every default filled in.
  Json parameters;
  std::vector<SweepAxis> sweep;
  OutputSpec output;

  /// Product of axis counts (1 without a sweep).
  std::size_t point_count() const;
  /// Parameters at one sweep point; the last axis varies fastest.
  Json point(std::size_t index) const;
};

/// JSON with comments allowed. Validates every sweep point.
RunConfig parse_config(std::string_view text);

ReservoirState reservoir_from_json(const Json &node);
RadialFormFactor kernel_from_json(const Json &node);
JunctionSpec junction_from_json(const Json &node);
QuadratureConfig quadrature_from_json(const Json &node);

/// Scalar leaves as dotted keys; arrays become compact JSON text.
std::vector<std::pair<std::string, Json>> flatten(const Json &node, const std::string &prefix = "");

} // namespace ness::cli
