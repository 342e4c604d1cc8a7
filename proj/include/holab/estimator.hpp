#pragma once

#include "holab/jumps.hpp"
#include "holab/oracle.hpp"
#include "holab/types.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace holab {

struct McEstimate {
  double value = 0.0;
  double std_error = 0.0;  // sample standard deviation / sqrt(n)
  std::size_t n = 0;
  std::uint64_t seed = 0;
  std::size_t excluded = 0;  // undetermined trajectories, reported alongside n
};

enum class Method { kThinning, kSkewProduct };
std::string to_string(Method m);
Method method_from_string(std::string_view name);

struct EstimatorOptions {
  int threads = 1;
  Method method = Method::kThinning;
  std::vector<int> root_order;         // skew product; empty: default order
  std::uint64_t trajectory_offset = 0;  // first trajectory id
};

/// Frequencies of the settled angular part, keyed by Weyl group index.
struct HwTable {
  Vec start;
  std::map<int, McEstimate> per_w;  // every group element, zero counts included
  std::map<int, std::size_t> counts;
  std::size_t n = 0;
  std::size_t determined = 0;

  double excluded_fraction() const {
    return n ? static_cast<double>(n - determined) / static_cast<double>(n) : 0.0;
  }
  double sum() const;
};

/// Runs n full-process trajectories from x0 and classifies each by its final
/// angular part. Throws when more than 20% are undetermined.
HwTable estimate_hw(const Model& model, const Vec& x0, const JumpConfig& cfg, std::size_t n,
                    const EstimatorOptions& options = {});

/// max over w of |h_w(v x) - h_{v^-1 w}(x)| / joint stderr.
double equivariance_z(const Model& model, int v, const HwTable& at_vx, const HwTable& at_x);

struct MartingaleReport {
  double target = 0.0;  // f(x0)
  McEstimate estimate;  // E_{x0} f(X_t)
  double z = 0.0;
  bool degenerate = false;  // zero sample variance: z is 0 when the mean matches exactly
  double t = 0.0;

  bool pass(double z_max = 3.0) const { return std::abs(z) < z_max; }
};

/// Monte Carlo E_{x0}[f(X_t)] for the full process against f(x0).
MartingaleReport martingale_check(const ScalarField& f, const Model& model, const Vec& x0, double t,
                                  const JumpConfig& cfg, std::size_t n, const EstimatorOptions& options = {});

struct PanelEntry {
  std::string name;
  double difference = 0.0;  // E_{x0} f - E_{y0} f
  double std_error = 0.0;   // of the paired differences
  double sup_abs = 1.0;
  double bound = 0.0;       // 2 sup|f| P(T_couple > T)
  bool pass = false;        // |difference| <= bound + 3 std_error
};

struct Theorem1Report {
  double horizon = 0.0;
  std::size_t n = 0;
  double coupled_fraction = 0.0;
  std::vector<PanelEntry> panel;
  std::vector<double> coupling_times;  // sorted, coupled pairs only

  bool pass() const;
  /// 2 sup|f| (1 - P(T_couple <= t)) for t at most the horizon.
  double bound_at(double t, double sup_abs = 1.0) const;
};

/// Bounded W-invariant panel on the radial part: tanh of each coordinate,
/// exp(-|x|), cos of each coordinate and the constant 1.
std::vector<std::pair<std::string, ScalarField>> theorem1_panel(int rank);

/// Mirror-coupled radial pairs from x0 and y0 to the horizon.
Theorem1Report theorem1_experiment(const Model& model, const Vec& x0, const Vec& y0, const StepperConfig& cfg,
                                   std::size_t n, int threads = 1);

struct BasisFit {
  Mat matrix;                          // rows G_rho, G_-rho; columns h_id, h_s
  std::vector<std::vector<double>> residuals;  // [row][grid point]
  std::vector<std::vector<double>> tolerance;  // 3 x propagated MC error
  std::vector<double> origin_values;  // (c_id + c_s) / 2 per row: G_{w rho}(0) = 1
  double det = 0.0;
  double condition = 0.0;  // of the design matrix
  bool residual_pass = false;
  bool det_pass = false;

  bool pass() const { return residual_pass && det_pass; }
};

/// Least-squares fit of G_{w rho}(x_i) = sum_v c_{w,v} h_v(x_i). h_se are the
/// standard errors of h_id; errors propagate as sqrt(c_id^2 + c_s^2) h_se.
BasisFit fit_basis_change(std::span<const double> grid, std::span<const double> h_id, std::span<const double> h_s,
                          std::span<const double> h_se, std::span<const double> g_plus,
                          std::span<const double> g_minus);

struct BasisChangeReport {
  Rank1Params params;
  std::vector<double> grid;
  std::vector<HwTable> tables;
  std::vector<double> g_plus;
  std::vector<double> g_minus;
  BasisFit fit;
};

/// Rank-one basis change between (G_rho, G_-rho) and (h_id, h_s) on a grid
/// that must contain points of both chambers.
BasisChangeReport basis_change_rank1(const Rank1Params& p, std::span<const double> grid, const JumpConfig& cfg,
                                     std::size_t n, const EstimatorOptions& options = {});

/// The default grid {+-0.5, +-1, +-2, +-4}.
std::vector<double> default_basis_grid();

struct LlnReport {
  double horizon = 0.0;
  std::size_t n = 0;
  Vec rho;
  Vec mean;       // of X_T / T
  Vec std_error;
  Vec z;
  Vec variance;   // sample variance of X_T / T, per component

  bool pass(double z_max = 3.0) const;
};

/// Radial process from x0: mean of X_T / T against rho.
LlnReport lln_check(const Model& model, const Vec& x0, const StepperConfig& cfg, std::size_t n, int threads = 1);

/// Noise-free integration of x' = b(x) to time t with step dt.
Vec drift_flow(const Model& model, const Vec& x0, double t, double dt = 1e-3);

}  // namespace holab
