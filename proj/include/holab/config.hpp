#pragma once

#include "holab/estimator.hpp"
#include "holab/rootsys.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace holab {

enum class Experiment { kOracle, kRadial, kFull, kCouple, kEquivalence, kHw, kMartingale, kTheorem1, kBasis, kLln };
std::string to_string(Experiment e);
Experiment experiment_from_string(std::string_view name);

/// Parse failure with the 1-based line number of the first error (0 when
/// the error is not tied to a line).
class ConfigError : public std::runtime_error {
 public:
  ConfigError(int line, const std::string& what)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// Text format: flat sections, `key = value`, numeric arrays in brackets,
// `#` starts a comment.
//
//   [system]      family, rank, normalization, k
//   [experiment]  name, x0, y0, horizon, dt, wall_safety, intensity_cap, paths,
//                 lambda, grid, order, method, t, function, min_coupled,
//                 qv_low, qv_high
//   [run]         seed, output, threads
struct RunConfig {
  Family family = Family::Rank1;
  int rank = 1;
  std::optional<double> normalization;
  std::vector<double> k{1.0};

  Experiment experiment = Experiment::kRadial;
  std::vector<double> x0;
  std::vector<double> y0;
  double horizon = 10.0;
  double dt = 0.01;
  double wall_safety = 0.05;
  double intensity_cap = 0.1;
  std::size_t paths = 1000;
  double lambda = 1.0;
  std::vector<double> grid;
  std::vector<int> order;
  Method method = Method::kThinning;
  double t = 5.0;
  std::string function = "G_rho";
  double min_coupled = 0.99;
  double qv_low = 3.6;   // realized d<|Y-X|>/dt band
  double qv_high = 4.4;

  std::uint64_t seed = 1;
  std::string output = "holab_out";
  int threads = 0;  // 0: default budget

  /// Fills every data-dependent default (normalization, points, grid,
  /// order) so the config states each value explicitly. Throws ConfigError.
  RunConfig resolved() const;

  bool operator==(const RunConfig&) const = default;
};

RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::string& path);
std::string to_text(const RunConfig& c);

/// Every field; `with_run` adds the [run] section values that do not affect
/// numerical output (output path, thread budget).
nlohmann::json to_json(const RunConfig& c, bool with_run = true);

}  // namespace holab
