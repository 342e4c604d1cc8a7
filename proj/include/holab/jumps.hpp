#pragma once

#include "holab/diffusion.hpp"
#include "holab/stats.hpp"

#include <optional>
#include <string>
#include <vector>

namespace holab {

/// x -> r_root x at `time`.
struct JumpEvent {
  double time;
  int root;  // positive root index
  Vec before;
  Vec after;
};

struct AngularChange {
  double time;
  int element;  // Weyl group index
};

struct FullTrajectory {
  TrajectoryRecord base;               // positions with the jumps applied
  std::vector<JumpEvent> jumps;        // in time order
  std::vector<AngularChange> angular_path;  // w_t, starting at time 0
  std::optional<int> final_angular;    // set when the angular part has visibly settled
  double residual_intensity = 0.0;     // sum of 1/2 c_alpha at the terminal point
  std::vector<double> functional_totals;  // skew product: A^j at the horizon, per level
};

struct JumpConfig {
  StepperConfig stepper;
  int max_jumps = 1000;             // per root
  double rate_scale = 1.0;          // multiplies every jump intensity (power checks)
  double settle_fraction = 0.2;     // no jump in the last fraction of the horizon ...
  double residual_threshold = 1e-6; // ... and residual intensity below this

  void validate() const;
};

/// Full HO process (generator 1/2 L) by per-step thinning: the diffusion step
/// of module diffusion, then each root fires with probability
/// 1 - exp(-1/2 c_alpha dt); at most one jump per step (smallest mark wins).
FullTrajectory simulate_thinning(const Model& model, const Vec& x0, const JumpConfig& cfg,
                                 std::uint64_t trajectory = 0);

/// Full HO process by the root-by-root skew-product construction. Level 0 is
/// the diffusion in x0's chamber; level j+1 adds reflections in root
/// root_order[j] whenever the additive functional A^j = int c dt along the
/// level-j path crosses the next Exp(1/2) mark, restarting a fresh level-j
/// process from the reflected point.
FullTrajectory simulate_skew_product(const Model& model, const Vec& x0, const JumpConfig& cfg,
                                     std::span<const int> root_order, std::uint64_t trajectory = 0);

/// Identity order 0, 1, ..., |R+| - 1.
std::vector<int> default_root_order(const Model& model);

/// Number of jumps with time in [t0, t1).
std::size_t jumps_in_window(const FullTrajectory& tr, double t0, double t1);

struct EquivalenceReport {
  std::vector<TestResult> main;    // thinning vs skew product
  std::vector<TestResult> null;    // thinning split in halves
  std::vector<TestResult> power;   // thinning vs thinning with doubled rates
  double family_alpha = 0.01;
  bool main_pass = false;
  bool null_pass = false;
  bool power_detected = false;
  std::size_t n_paths = 0;

  bool pass() const { return main_pass && null_pass && power_detected; }
};

struct CompareOptions {
  std::vector<int> root_order;  // empty: default order
  int threads = 1;
  double family_alpha = 0.01;
};

/// Two-sample tests between ensembles (Bonferroni at family_alpha within each
/// comparison): KS on <theta_i, X_T>, chi-square on the final angular part,
/// chi-square on jump counts, KS on the first jump time.
std::vector<TestResult> compare_ensembles(const Model& model, std::span<const FullTrajectory> a,
                                          std::span<const FullTrajectory> b, double family_alpha);

/// Thinning vs skew product, split-sample null calibration and a doubled-rate
/// power check. Requires n_paths >= 1000.
EquivalenceReport compare_constructions(const Model& model, const Vec& x0, const JumpConfig& cfg,
                                        std::size_t n_paths, const CompareOptions& options = {});

struct PairedFull {
  FullTrajectory x;
  FullTrajectory y;
  std::optional<double> radial_coupling_time;
  bool neither_jumped = false;
  bool merged = false;  // neither jumped and the paths coincide from some time on
};

/// Mirror-coupled radial pair, then the skew-product jump insertion on both
/// coordinates with shared exponential marks.
PairedFull couple_full(const Model& model, const Vec& x0, const Vec& y0, const JumpConfig& cfg,
                       std::uint64_t pair = 0);

}  // namespace holab
