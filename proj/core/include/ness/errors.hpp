#pragma once

#include <stdexcept>
#include <string>

namespace ness {

/// Base class for all library errors. Carries a stable kind name so the CLI
/// can emit machine-readable error records.
class Error : public std::runtime_error {
public:
  Error(std::string kind, const std::string &what)
      : std::runtime_error(what), kind_(std::move(kind)) {}
  const std::string &kind() const noexcept { return kind_; }

private:
  std::string kind_;
};

/// Adaptive quadrature hit its subdivision limit above tolerance.
class NonConvergent : public Error {
public:
  NonConvergent(const std::string &what, double value, double estimate)
      : Error("NonConvergent", what), value_(value), estimate_(estimate) {}
  double value() const noexcept { return value_; }
  double estimate() const noexcept { return estimate_; }

private:
  double value_;
  double estimate_;
};

class DegenerateKernel : public Error {
public:
  explicit DegenerateKernel(const std::string &what) : Error("DegenerateKernel", what) {}
};

class MissingKernel : public Error {
public:
  explicit MissingKernel(const std::string &what) : Error("MissingKernel", what) {}
};

class StepTooLarge : public Error {
public:
  StepTooLarge(const std::string &what, double relative_error)
      : Error("StepTooLarge", what), relative_error_(relative_error) {}
  double relative_error() const noexcept { return relative_error_; }

private:
  double relative_error_;
};

class BoundViolated : public Error {
public:
  explicit BoundViolated(const std::string &what) : Error("BoundViolated", what) {}
};

class TruncationInsufficient : public Error {
public:
  TruncationInsufficient(const std::string &what, double tail)
      : Error("TruncationInsufficient", what), tail_(tail) {}
  /// Relative weight of the outermost retained shell (may be +inf).
  double tail() const noexcept { return tail_; }

private:
  double tail_;
};

class DimensionTooLow : public Error {
public:
  explicit DimensionTooLow(const std::string &what) : Error("DimensionTooLow", what) {}
};

class InvalidIncidence : public Error {
public:
  explicit InvalidIncidence(const std::string &what) : Error("InvalidIncidence", what) {}
};

class BadGeometry : public Error {
public:
  explicit BadGeometry(const std::string &what) : Error("BadGeometry", what) {}
};

class NoPlateau : public Error {
public:
  NoPlateau(const std::string &what, double drift)
      : Error("NoPlateau", what), drift_(drift) {}
  double drift() const noexcept { return drift_; }

private:
  double drift_;
};

/// Invalid domain parameters (negative beta, empty table, ...).
class InvalidArgument : public Error {
public:
  explicit InvalidArgument(const std::string &what) : Error("InvalidArgument", what) {}
};

} // namespace ness
