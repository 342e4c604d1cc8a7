#include "holab/jumps.hpp"

#include "holab/ho_operators.hpp"
#include "holab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace holab {

namespace {

double min_abs_pairing(const Model& model, const Vec& x) {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < model.positive_count(); ++i) m = std::min(m, std::abs(model.root(i).dot(x)));
  return m;
}

double total_intensity(const Model& model, const Vec& x) {
  double total = 0.0;
  for (std::size_t i = 0; i < model.positive_count(); ++i) total += jump_rate(model, i, x);
  return total;
}

// Angular path, residual intensity and the settled final angular part.
void finish(const Model& model, const JumpConfig& cfg, const Vec& x0, FullTrajectory& out) {
  const auto& group = model.group();
  int w = radial_decompose(model.system(), group, x0).angular;
  out.angular_path.clear();
  out.angular_path.push_back({0.0, w});
  for (const auto& j : out.jumps) {
    w = group.multiply(group.reflection(static_cast<std::size_t>(j.root)), w);
    out.angular_path.push_back({j.time, w});
  }
  out.residual_intensity = cfg.rate_scale * total_intensity(model, out.base.terminal);
  const double horizon = cfg.stepper.t_horizon;
  const double last_jump = out.jumps.empty() ? -1.0 : out.jumps.back().time;
  const bool quiet = last_jump < (1.0 - cfg.settle_fraction) * horizon;
  if (quiet && out.residual_intensity < cfg.residual_threshold) {
    out.final_angular = w;
  } else {
    out.final_angular.reset();
  }
}

void require_regular(const Model& model, const Vec& x0) {
  if (x0.size() != model.rank()) throw std::invalid_argument("start point has wrong dimension");
  if (!model.system().is_regular(x0)) throw std::invalid_argument("start point must be regular");
}

// Path segment of some level of the skew-product construction.
struct Segment {
  std::vector<double> t;
  std::vector<Vec> x;
  std::vector<JumpEvent> jumps;
};

class SkewBuilder {
 public:
  SkewBuilder(const Model& model, const JumpConfig& cfg, std::span<const int> order, std::uint64_t trajectory,
              std::uint32_t segment_base, const TrajectoryRecord* base_override)
      : model_(model),
        cfg_(cfg),
        order_(order),
        trajectory_(trajectory),
        marks_(cfg.stepper.seed, trajectory, 0),
        next_segment_(segment_base),
        override_(base_override),
        mark_counter_(order.size() + 1, 0),
        totals_(order.size(), 0.0),
        jump_counts_(order.size(), 0) {
    stepper_ = cfg.stepper;
    stepper_.store_path = true;
  }

  Segment build(std::size_t level, const Vec& x, double t0, bool outermost) {
    if (level == 0) return diffuse(x, t0);
    Segment seg = build(level - 1, x, t0, outermost);
    const auto root = static_cast<std::size_t>(order_[level - 1]);
    const Vec& alpha = model_.root(root);
    double a = 0.0;
    double mark = next_mark(level);
    for (std::size_t i = 0; i + 1 < seg.t.size(); ++i) {
      a += cfg_.rate_scale * jump_coefficient(model_, root, seg.x[i]) * (seg.t[i + 1] - seg.t[i]);
      if (a < mark) continue;

      if (++jump_counts_[level - 1] > cfg_.max_jumps)
        throw std::runtime_error("skew product: more than " + std::to_string(cfg_.max_jumps) +
                                 " jumps for root " + std::to_string(root));
      const double tj = seg.t[i + 1];
      const Vec before = seg.x[i + 1];
      const Vec after = reflect(alpha, before);
      Segment tail = build(level - 1, after, tj, false);

      seg.t.resize(i + 1);
      seg.x.resize(i + 1);
      std::erase_if(seg.jumps, [tj](const JumpEvent& e) { return e.time > tj; });
      seg.jumps.push_back({tj, static_cast<int>(root), before, after});
      seg.t.insert(seg.t.end(), tail.t.begin(), tail.t.end());
      seg.x.insert(seg.x.end(), tail.x.begin(), tail.x.end());
      seg.jumps.insert(seg.jumps.end(), tail.jumps.begin(), tail.jumps.end());
      mark += next_mark(level);
    }
    if (outermost) totals_[level - 1] = a;
    return seg;
  }

  const std::vector<double>& totals() const { return totals_; }

 private:
  Segment diffuse(const Vec& x, double t0) {
    if (override_ && !override_used_) {
      override_used_ = true;
      return {override_->times, override_->positions, {}};
    }
    TrajectoryRecord rec = simulate_in_chamber(model_, x, t0, stepper_, trajectory_, next_segment_++, cfg_.rate_scale);
    return {std::move(rec.times), std::move(rec.positions), {}};
  }

  double next_mark(std::size_t level) {
    // Exp(1/2) marks against A = int c ds: jumps at intensity 1/2 c.
    return marks_.exponential(Stream::kSkewMarks, mark_counter_[level]++, static_cast<std::uint32_t>(level), 0.5);
  }

  const Model& model_;
  const JumpConfig& cfg_;
  std::span<const int> order_;
  std::uint64_t trajectory_;
  KeyedRng marks_;
  std::uint32_t next_segment_;
  const TrajectoryRecord* override_;
  bool override_used_ = false;
  StepperConfig stepper_;
  std::vector<std::uint64_t> mark_counter_;
  std::vector<double> totals_;
  std::vector<int> jump_counts_;
};

void check_order(const Model& model, std::span<const int> order) {
  const std::size_t m = model.positive_count();
  if (order.size() != m) throw std::invalid_argument("root order must list every positive root once");
  std::vector<bool> seen(m, false);
  for (int r : order) {
    if (r < 0 || static_cast<std::size_t>(r) >= m || seen[static_cast<std::size_t>(r)])
      throw std::invalid_argument("root order must be a permutation of the positive roots");
    seen[static_cast<std::size_t>(r)] = true;
  }
}

FullTrajectory skew_impl(const Model& model, const Vec& x0, const JumpConfig& cfg, std::span<const int> order,
                         std::uint64_t trajectory, std::uint32_t segment_base, const TrajectoryRecord* base) {
  SkewBuilder builder(model, cfg, order, trajectory, segment_base, base);
  Segment seg = builder.build(order.size(), x0, 0.0, true);
  std::stable_sort(seg.jumps.begin(), seg.jumps.end(),
                   [](const JumpEvent& a, const JumpEvent& b) { return a.time < b.time; });

  FullTrajectory out;
  out.jumps = std::move(seg.jumps);
  out.functional_totals = builder.totals();
  out.base.terminal = seg.x.back();
  out.base.terminal_time = seg.t.back();
  out.base.steps = seg.t.size() - 1;
  double wmin = std::numeric_limits<double>::infinity();
  for (const auto& p : seg.x) wmin = std::min(wmin, min_abs_pairing(model, p));
  out.base.wall_min = wmin;
  if (cfg.stepper.store_path) {
    out.base.times = std::move(seg.t);
    out.base.positions = std::move(seg.x);
  }
  finish(model, cfg, x0, out);
  return out;
}

std::vector<Vec> test_directions(const Model& model) {
  const int n = model.rank();
  std::vector<Vec> dirs;
  if (n == 1) {
    dirs.push_back(make_vec({1.0}));
    return dirs;
  }
  dirs.push_back(model.rho().normalized());
  for (int j = 0; j < n; ++j) {
    Vec e = Vec::Zero(n);
    e(j) = 1.0;
    dirs.push_back(e);
  }
  for (int j = 1; dirs.size() < 5 && j < n; ++j) {
    Vec e = Vec::Zero(n);
    e(0) = 1.0;
    e(j) = 1.0;
    dirs.push_back(e.normalized());
    if (dirs.size() >= 5) break;
    e(j) = -1.0;
    dirs.push_back(e.normalized());
  }
  return dirs;
}

}  // namespace

void JumpConfig::validate() const {
  stepper.validate();
  if (max_jumps < 1) throw std::invalid_argument("max_jumps must be >= 1");
  if (!(rate_scale > 0.0)) throw std::invalid_argument("rate_scale must be positive");
  if (!(settle_fraction > 0.0 && settle_fraction < 1.0)) throw std::invalid_argument("settle_fraction must be in (0,1)");
  if (!(residual_threshold > 0.0)) throw std::invalid_argument("residual_threshold must be positive");
}

FullTrajectory simulate_thinning(const Model& model, const Vec& x0, const JumpConfig& cfg, std::uint64_t trajectory) {
  cfg.validate();
  require_regular(model, x0);
  const StepperConfig& st = cfg.stepper;
  const KeyedRng rng(st.seed, trajectory, 0);
  const std::size_t m = model.positive_count();

  FullTrajectory out;
  TrajectoryRecord& rec = out.base;
  Vec x = x0;
  double t = 0.0;
  rec.wall_min = min_abs_pairing(model, x);
  if (st.store_path) {
    rec.times.push_back(t);
    rec.positions.push_back(x);
  }
  Vec b;
  std::vector<double> rates(m);
  std::vector<int> per_root(m, 0);
  std::uint64_t step = 0;
  while (t < st.t_horizon) {
    const double total = cfg.rate_scale * coefficients_unchecked(model, x, b, rates);
    const double remaining = st.t_horizon - t;
    const double dt0 = effective_dt(model, x, st, remaining, total);
    auto s = advance_in_chamber(model, x, b, dt0, rng, step, st.max_rejections, t, wall_limited(model, x, st));
    rec.rejections += static_cast<std::uint64_t>(s.rejections);
    Vec xn = std::move(s.x);
    const double tn = (s.dt == remaining) ? st.t_horizon : t + s.dt;

    int fired = -1;
    double best = 2.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double u = rng.uniforms(Stream::kJumpMarks, step, static_cast<std::uint32_t>(i / 2))[i % 2];
      const double p = -std::expm1(-cfg.rate_scale * rates[i] * s.dt);
      if (u < p && u < best) {
        best = u;
        fired = static_cast<int>(i);
      }
    }
    if (fired >= 0) {
      if (++per_root[static_cast<std::size_t>(fired)] > cfg.max_jumps)
        throw std::runtime_error("thinning: more than " + std::to_string(cfg.max_jumps) + " jumps for root " +
                                 std::to_string(fired));
      const Vec after = reflect(model.root(static_cast<std::size_t>(fired)), xn);
      out.jumps.push_back({tn, fired, xn, after});
      xn = after;
    }
    x = std::move(xn);
    t = tn;
    ++step;
    rec.wall_min = std::min(rec.wall_min, min_abs_pairing(model, x));
    if (st.store_path) {
      rec.times.push_back(t);
      rec.positions.push_back(x);
    }
  }
  rec.steps = step;
  rec.terminal = x;
  rec.terminal_time = t;
  finish(model, cfg, x0, out);
  return out;
}

std::vector<int> default_root_order(const Model& model) {
  std::vector<int> order(model.positive_count());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  return order;
}

FullTrajectory simulate_skew_product(const Model& model, const Vec& x0, const JumpConfig& cfg,
                                     std::span<const int> root_order, std::uint64_t trajectory) {
  cfg.validate();
  require_regular(model, x0);
  check_order(model, root_order);
  return skew_impl(model, x0, cfg, root_order, trajectory, 0, nullptr);
}

std::size_t jumps_in_window(const FullTrajectory& tr, double t0, double t1) {
  return static_cast<std::size_t>(
      std::count_if(tr.jumps.begin(), tr.jumps.end(), [&](const JumpEvent& j) { return j.time >= t0 && j.time < t1; }));
}

std::vector<TestResult> compare_ensembles(const Model& model, std::span<const FullTrajectory> a,
                                          std::span<const FullTrajectory> b, double family_alpha) {
  std::vector<TestResult> tests;

  const auto dirs = test_directions(model);
  for (std::size_t d = 0; d < dirs.size(); ++d) {
    std::vector<double> pa, pb;
    for (const auto& t : a) pa.push_back(dirs[d].dot(t.base.terminal));
    for (const auto& t : b) pb.push_back(dirs[d].dot(t.base.terminal));
    tests.push_back(ks_two_sample("ks_projection_" + std::to_string(d), pa, pb, 0.0));
  }

  const std::size_t g = model.group().size();
  std::vector<double> ca(g, 0.0), cb(g, 0.0);
  for (const auto& t : a)
    if (t.final_angular) ca[static_cast<std::size_t>(*t.final_angular)] += 1.0;
  for (const auto& t : b)
    if (t.final_angular) cb[static_cast<std::size_t>(*t.final_angular)] += 1.0;
  if (pairwise_sum(ca) > 0.0 && pairwise_sum(cb) > 0.0)
    tests.push_back(chi_square_homogeneity("chi2_final_angular", ca, cb, 0.0));

  constexpr std::size_t kCountBins = 6;
  std::vector<double> ja(kCountBins, 0.0), jb(kCountBins, 0.0);
  for (const auto& t : a) ja[std::min(t.jumps.size(), kCountBins - 1)] += 1.0;
  for (const auto& t : b) jb[std::min(t.jumps.size(), kCountBins - 1)] += 1.0;
  tests.push_back(chi_square_homogeneity("chi2_jump_count", ja, jb, 0.0));

  std::vector<double> fa, fb;
  for (const auto& t : a)
    if (!t.jumps.empty()) fa.push_back(t.jumps.front().time);
  for (const auto& t : b)
    if (!t.jumps.empty()) fb.push_back(t.jumps.front().time);
  if (fa.size() >= 20 && fb.size() >= 20) tests.push_back(ks_two_sample("ks_first_jump_time", fa, fb, 0.0));

  const double per_test = family_alpha / static_cast<double>(tests.size());
  for (auto& t : tests) {
    t.threshold = per_test;
    t.pass = t.p_value >= per_test;
  }
  return tests;
}

EquivalenceReport compare_constructions(const Model& model, const Vec& x0, const JumpConfig& cfg, std::size_t n_paths,
                                        const CompareOptions& options) {
  if (n_paths < 1000) throw std::invalid_argument("compare_constructions needs at least 1000 paths");
  cfg.validate();
  require_regular(model, x0);
  const std::vector<int> order = options.root_order.empty() ? default_root_order(model) : options.root_order;
  check_order(model, order);

  JumpConfig quiet = cfg;
  quiet.stepper.store_path = false;
  JumpConfig doubled = quiet;
  doubled.rate_scale *= 2.0;
  const std::uint64_t n = n_paths;

  // Disjoint trajectory ids keep the ensembles independent.
  const auto thin = parallel_map(n, options.threads, [&](std::size_t i) { return simulate_thinning(model, x0, quiet, i); });
  const auto skew = parallel_map(n, options.threads, [&](std::size_t i) {
    return skew_impl(model, x0, quiet, order, n + i, 0, nullptr);
  });
  const auto corrupt =
      parallel_map(n, options.threads, [&](std::size_t i) { return simulate_thinning(model, x0, doubled, 2 * n + i); });

  EquivalenceReport r;
  r.family_alpha = options.family_alpha;
  r.n_paths = n_paths;
  r.main = compare_ensembles(model, thin, skew, options.family_alpha);
  const std::span<const FullTrajectory> all(thin);
  r.null = compare_ensembles(model, all.first(n / 2), all.subspan(n / 2), options.family_alpha);
  r.power = compare_ensembles(model, thin, corrupt, options.family_alpha);
  auto all_pass = [](const std::vector<TestResult>& v) {
    return std::all_of(v.begin(), v.end(), [](const TestResult& t) { return t.pass; });
  };
  r.main_pass = all_pass(r.main);
  r.null_pass = all_pass(r.null);
  r.power_detected = !all_pass(r.power);
  return r;
}

PairedFull couple_full(const Model& model, const Vec& x0, const Vec& y0, const JumpConfig& cfg, std::uint64_t pair) {
  cfg.validate();
  require_regular(model, x0);
  require_regular(model, y0);
  const auto& sys = model.system();
  const auto& group = model.group();
  const auto dx = radial_decompose(sys, group, x0);
  const auto dy = radial_decompose(sys, group, y0);
  if (dx.angular != dy.angular) throw std::invalid_argument("couple_full: start points must share a chamber");

  // Couple the radial parts in the positive chamber, then map back.
  StepperConfig st = cfg.stepper;
  st.store_path = true;
  st.stop_at_coupling = false;
  CouplingRecord cr = mirror_couple(model, dx.radial, dy.radial, st, pair);
  const Mat& w = group[static_cast<std::size_t>(dx.angular)].matrix;
  for (auto& p : cr.x_path.positions) p = w * p;
  for (auto& p : cr.y_path.positions) p = w * p;

  const auto order = default_root_order(model);
  PairedFull out;
  out.radial_coupling_time = cr.coupling_time;
  // Same trajectory id for both: the exponential marks are shared.
  out.x = skew_impl(model, x0, cfg, order, pair, 1, &cr.x_path);
  out.y = skew_impl(model, y0, cfg, order, pair, 1u << 16, &cr.y_path);
  out.neither_jumped = out.x.jumps.empty() && out.y.jumps.empty();
  out.merged = out.neither_jumped && cr.coupling_time.has_value();
  return out;
}

}  // namespace holab
