#pragma once

#include "holab/config.hpp"

#include <nlohmann/json.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace holab {

inline constexpr int kSchemaVersion = 1;

// Exit codes of `run` and of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitAssertion = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitRuntime = 3;

struct Assertion {
  std::string name;
  double statistic = 0.0;
  double p = 1.0;  // p-value, or the threshold for non-statistical checks
  bool pass = false;
};

struct ExperimentOutput {
  nlohmann::json estimates;
  std::string csv;  // header row first
  std::vector<Assertion> tests;
  std::vector<std::pair<std::string, std::string>> files;  // extra artifacts: name, content

  bool pass() const;
  std::vector<std::string> failures() const;
};

/// Runs the experiment of a resolved config. Output depends only on the
/// config and seed, never on the thread budget.
ExperimentOutput execute(const RunConfig& resolved_config, int threads);

/// result.json content: schema version, config, estimates, tests, failures.
nlohmann::json result_document(const RunConfig& resolved_config, const ExperimentOutput& out);

/// Resolves the config, executes it and writes manifest.json, result.json
/// and result.csv under config.output. Returns kExitOk iff every assertion
/// passed.
int run(const RunConfig& config, std::ostream& log);

}  // namespace holab
