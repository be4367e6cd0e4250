#pragma once

#include "config.hpp"
#include "table.hpp"

#include <cstdint>
#include <vector>

namespace ness::cli {

struct RunContext {
  int threads = 1;
  /// Seeds the oracle's random probe times; mixed with the sweep index.
  std::uint64_t seed = 0;
};

struct RunOutcome {
  std::vector<Row> rows;
  /// 0, or 4 when a certificate reports x >= 1.
  int status = 0;
};

/// Executes every sweep point. Rows come back in sweep order whatever the
/// completion order; the first failing point in sweep order is rethrown,
/// wrapped so the index is known.
RunOutcome execute(const RunConfig &config, const RunContext &context = {});

/// Module error raised while evaluating one sweep point.
class PointError : public Error {
public:
  PointError(std::size_t index, std::string inner_kind, const std::string &what, int exit_code)
      : Error(std::move(inner_kind), what), index_(index), exit_code_(exit_code) {}
  std::size_t index() const noexcept { return index_; }
  int exit_code() const noexcept { return exit_code_; }

private:
  std::size_t index_;
  int exit_code_;
};

/// 3 for numerical non-convergence, 2 for bad inputs, 1 otherwise.
int exit_code_for(const Error &error);

} // namespace ness::cli
