#include "config.hpp"
#include "runner.hpp"
#include "table.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace ness::cli;

void report(const std::string &kind, const std::string &message, int code,
            const std::string &extra = "") {
  std::cerr << "{\"error\":{\"kind\":" << json_quote(kind) << ",\"message\":" << json_quote(message)
            << ",\"exit_code\":" << code << extra << "}}\n";
}

int run_cli(const std::string &config_path, std::string out_path, std::string format, int threads,
            std::uint64_t seed) {
  std::ifstream in(config_path, std::ios::binary);
  if (!in) {
    report("ValidationError", "cannot read config file " + config_path, 2,
           ",\"field\":" + json_quote("--config"));
    return 2;
  }
  std::stringstream text;
  text << in.rdbuf();

  RunConfig config;
  try {
    config = parse_config(text.str());
  } catch (const ParseError &e) {
    report(e.kind(), e.what(), 2,
           ",\"line\":" + std::to_string(e.line()) + ",\"column\":" + std::to_string(e.column()));
    return 2;
  } catch (const ValidationError &e) {
    report(e.kind(), e.what(), 2, ",\"field\":" + json_quote(e.field()));
    return 2;
  } catch (const ness::Error &e) {
    report(e.kind(), e.what(), exit_code_for(e));
    return exit_code_for(e);
  }
  if (!out_path.empty())
    config.output.path = out_path;
  if (!format.empty())
    config.output.format = format;

  RunOutcome outcome;
  try {
    outcome = execute(config, RunContext{threads, seed});
  } catch (const PointError &e) {
    report(e.kind(), e.what(), e.exit_code(), ",\"point\":" + std::to_string(e.index()));
    return e.exit_code();
  } catch (const ness::Error &e) {
    report(e.kind(), e.what(), exit_code_for(e));
    return exit_code_for(e);
  }

  std::ostringstream body;
  if (config.output.format == "json")
    write_json(body, outcome.rows);
  else
    write_csv(body, outcome.rows);
  if (config.output.path.empty()) {
    std::cout << body.str() << std::flush;
  } else {
    std::ofstream out(config.output.path, std::ios::binary);
    out << body.str();
    if (!out) {
      report("IOError", "cannot write " + config.output.path, 1);
      return 1;
    }
  }
  return outcome.status;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Steady-state transport calculator for two free-fermion reservoirs"};
  std::string config_path, out_path, format;
  int threads = 1;
  std::uint64_t seed = 0;
  app.add_option("--config", config_path, "Run configuration (JSON, comments allowed)")
      ->required();
  app.add_option("--out", out_path, "Output file; overrides output.path (default stdout)");
  app.add_option("--format", format, "Output format; overrides output.format")
      ->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--threads", threads, "Worker threads for sweep points")->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "Seed for the oracle's random probe times");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  return run_cli(config_path, out_path, format, threads, seed);
}
