#pragma once

#include "holab/model.hpp"
#include "holab/rng.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace holab {

struct StepperConfig {
  double dt_max = 0.01;
  double wall_safety = 0.05;  // dt <= wall_safety * d^2, d the distance to the nearest wall
  double t_horizon = 10.0;
  std::uint64_t seed = 1;
  double couple_tolerance = 1e-6;
  int max_rejections = 30;
  double intensity_cap = 0.1;  // jump processes: total intensity * dt <= intensity_cap
  bool store_path = false;
  bool stop_at_coupling = false;  // mirror_couple: stop once the pair has merged

  void validate() const;
};

struct TrajectoryRecord {
  std::vector<double> times;  // filled when store_path
  std::vector<Vec> positions;
  Vec terminal;
  double terminal_time = 0.0;
  double wall_min = 0.0;  // running min over t and alpha > 0 of |<alpha, X_t>|
  std::uint64_t steps = 0;
  std::uint64_t rejections = 0;
};

struct CouplingRecord {
  TrajectoryRecord x_path;
  TrajectoryRecord y_path;
  std::vector<double> z;  // |Y_t - X_t| on the shared grid, when store_path
  std::optional<double> coupling_time;
  double horizon = 0.0;
  double qv = 0.0;               // sum of (dz)^2 up to coupling
  double qv_time = 0.0;          // time span over which qv was accumulated
  double drift_gap_sup = 0.0;    // sup_t |int_0^t (b(Y) - b(X)) ds|
};

struct AcceptedStep {
  Vec x;
  double dt;
  int rejections;
};

/// x + b(x) dt + sqrt(dt) g with no chamber check.
Vec euler_step(const Model& model, const Vec& x, double dt, const Vec& g);

/// Step size at x: min(dt_max, wall_safety d^2, remaining) and, when
/// total_rate > 0, intensity_cap / total_rate.
double effective_dt(const Model& model, const Vec& x, const StepperConfig& cfg, double remaining,
                    double total_rate = 0.0);

/// True when the wall term wall_safety d^2 limits the step at x. Such steps
/// take the drift implicitly.
bool wall_limited(const Model& model, const Vec& x, const StepperConfig& cfg);

/// True when y lies in the same (open) chamber copy as x.
bool same_chamber(const Model& model, const Vec& x, const Vec& y);

/// One Euler-Maruyama step from x with drift b, halving dt with fresh noise
/// until the proposal stays in x's chamber. Noise is addressed by
/// (rng, step, attempt). With `implicit` the drift is evaluated at the new
/// point, y = x + b(y) dt + sqrt(dt) g, which never leaves the chamber.
/// Throws WallContact after max_rejections halvings.
AcceptedStep advance_in_chamber(const Model& model, const Vec& x, const Vec& b, double dt, const KeyedRng& rng,
                                std::uint64_t step, int max_rejections, double time = 0.0, bool implicit = false);

/// step_radial: drift evaluated at x, then advance_in_chamber.
AcceptedStep step_radial(const Model& model, const Vec& x, double dt, const KeyedRng& rng, std::uint64_t step,
                         int max_rejections = 30, bool implicit = false);

/// Radial HO process (generator 1/2 L) from x0 in the open positive chamber.
TrajectoryRecord simulate_radial(const Model& model, const Vec& x0, const StepperConfig& cfg,
                                 std::uint64_t trajectory = 0);

/// Same stepping from any regular start on [t0, horizon], staying in the
/// start's chamber copy. `segment` selects an independent noise segment of
/// the trajectory. With rate_scale > 0 the step is also capped by
/// intensity_cap / (rate_scale * total jump intensity), the grid the jump
/// simulators use.
TrajectoryRecord simulate_in_chamber(const Model& model, const Vec& x0, double t0, const StepperConfig& cfg,
                                     std::uint64_t trajectory, std::uint32_t segment, double rate_scale = 0.0);

/// Mirror-coupled pair: Y is driven by the reflection of X's noise across
/// the hyperplane orthogonal to Y - X, until the pair merges.
CouplingRecord mirror_couple(const Model& model, const Vec& x0, const Vec& y0, const StepperConfig& cfg,
                             std::uint64_t pair = 0);

struct CouplingSummary {
  std::size_t n = 0;
  std::size_t n_coupled = 0;
  double horizon = 0.0;
  std::vector<double> coupling_times;  // sorted, coupled pairs only
  /// Kaplan-Meier survival S(t) = P(T_couple > t) at each distinct event time.
  std::vector<std::pair<double, double>> survival;

  double fraction_coupled() const { return n ? static_cast<double>(n_coupled) / static_cast<double>(n) : 0.0; }
  /// Empirical P(T_couple <= t), censored pairs counted as not coupled.
  double ecdf(double t) const;
};

/// Summarizes coupling times; pairs uncoupled by the horizon are right-censored.
CouplingSummary coupling_statistics(std::span<const CouplingRecord> records);
CouplingSummary coupling_statistics(std::span<const std::optional<double>> coupling_times, double horizon);

}  // namespace holab
