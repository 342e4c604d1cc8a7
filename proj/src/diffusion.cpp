#include "holab/diffusion.hpp"

#include "holab/ho_operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace holab {

namespace {

Vec gaussian(const KeyedRng& rng, int dim, std::uint64_t step, int attempt) {
  Vec g(dim);
  for (int b = 0; 2 * b < dim; ++b) {
    const auto z = rng.normals(Stream::kDiffusion, step, static_cast<std::uint32_t>(attempt * 4 + b));
    g(2 * b) = z[0];
    if (2 * b + 1 < dim) g(2 * b + 1) = z[1];
  }
  return g;
}

double min_abs_pairing(const Model& model, const Vec& x) {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < model.positive_count(); ++i) m = std::min(m, std::abs(model.root(i).dot(x)));
  return m;
}

constexpr double kMinDt = 1e-16;

// Solves y - dt b(y) = z in the chamber of x. The left side is the gradient of
// a strictly convex function with a barrier at every wall, so the solution is
// unique. Newton with a fraction-to-boundary rule: a step may shrink each
// pairing <alpha,y> by at most a factor 10.
bool implicit_solve(const Model& model, const Vec& x, const Vec& z, double dt, Vec& y) {
  const std::size_t m = model.positive_count();
  const int n = model.rank();
  std::vector<double> sign(m), pair(m), rates(m);
  for (std::size_t i = 0; i < m; ++i) sign[i] = model.root(i).dot(x) > 0.0 ? 1.0 : -1.0;
  auto pairings = [&](const Vec& v) {
    for (std::size_t i = 0; i < m; ++i) {
      pair[i] = sign[i] * model.root(i).dot(v);
      if (!(pair[i] > 0.0)) return false;
    }
    return true;
  };
  y = z;
  if (!pairings(y)) {
    y = x;
    pairings(y);
  }
  Vec b;
  for (int iter = 0; iter < 200; ++iter) {
    coefficients_unchecked(model, y, b, rates);
    Mat h = Mat::Identity(n, n);
    for (std::size_t i = 0; i < m; ++i)
      h.noalias() += (dt * 2.0 * rates[i] / model.root_norm_sq(i)) * model.root(i) * model.root(i).transpose();
    const Vec p = -h.llt().solve(Vec(y - z - dt * b));
    double step = 1.0;
    bool converged = p.norm() <= 1e-13 * (1.0 + y.norm());
    for (std::size_t i = 0; i < m; ++i) {
      const double dp = sign[i] * model.root(i).dot(p);
      if (dp < 0.0) step = std::min(step, 0.9 * pair[i] / -dp);
      // Below the rounding error of <alpha, y> itself no further progress is possible.
      const double resolution = 8.0 * std::numeric_limits<double>::epsilon() * std::sqrt(model.root_norm_sq(i)) * y.norm();
      converged = converged && std::abs(dp) <= 1e-12 * pair[i] + resolution;
    }
    y += step * p;
    if (!pairings(y)) return false;
    if (converged) return true;
  }
  return false;
}

// Proposal from x with noise increment w = sqrt(dt) g; false when the implicit
// solve fails, which the caller treats like a rejection.
bool propose(const Model& model, const Vec& x, const Vec& b, double dt, const Vec& w, bool implicit, Vec& y) {
  if (implicit) return implicit_solve(model, x, x + w, dt, y);
  y = x + b * dt + w;
  return true;
}

void push(TrajectoryRecord& rec, double t, const Vec& x, bool store) {
  if (!store) return;
  rec.times.push_back(t);
  rec.positions.push_back(x);
}

}  // namespace

void StepperConfig::validate() const {
  if (!(dt_max > 0.0)) throw std::invalid_argument("dt_max must be positive");
  if (!(wall_safety > 0.0)) throw std::invalid_argument("wall_safety must be positive");
  if (!(t_horizon > 0.0)) throw std::invalid_argument("horizon must be positive");
  if (!(couple_tolerance > 0.0)) throw std::invalid_argument("couple_tolerance must be positive");
  if (max_rejections < 0) throw std::invalid_argument("max_rejections must be non-negative");
  if (!(intensity_cap > 0.0)) throw std::invalid_argument("intensity_cap must be positive");
}

Vec euler_step(const Model& model, const Vec& x, double dt, const Vec& g) {
  return x + drift(model, x) * dt + std::sqrt(dt) * g;
}

double effective_dt(const Model& model, const Vec& x, const StepperConfig& cfg, double remaining, double total_rate) {
  const double d = model.system().wall_distance(x);
  // Steps below kMinDt no longer advance t at unit scale; the implicit drift
  // keeps such steps inside the chamber.
  double dt = std::min({cfg.dt_max, std::max(cfg.wall_safety * d * d, kMinDt), remaining});
  if (total_rate > 0.0) dt = std::min(dt, cfg.intensity_cap / total_rate);
  return dt;
}

bool wall_limited(const Model& model, const Vec& x, const StepperConfig& cfg) {
  const double d = model.system().wall_distance(x);
  return cfg.wall_safety * d * d < cfg.dt_max;
}

bool same_chamber(const Model& model, const Vec& x, const Vec& y) {
  for (std::size_t i = 0; i < model.positive_count(); ++i) {
    const double a = model.root(i).dot(x);
    const double b = model.root(i).dot(y);
    if (!(a * b > 0.0)) return false;
  }
  return true;
}

AcceptedStep advance_in_chamber(const Model& model, const Vec& x, const Vec& b, double dt, const KeyedRng& rng,
                                std::uint64_t step, int max_rejections, double time, bool implicit) {
  for (int attempt = 0; attempt <= max_rejections; ++attempt) {
    const Vec g = gaussian(rng, model.rank(), step, attempt);
    Vec y;
    if (propose(model, x, b, dt, std::sqrt(dt) * g, implicit, y) && same_chamber(model, x, y))
      return {std::move(y), dt, attempt};
    dt *= 0.5;
  }
  throw WallContact("step rejected " + std::to_string(max_rejections + 1) + " times near a wall", time,
                    model.system().wall_distance(x));
}

AcceptedStep step_radial(const Model& model, const Vec& x, double dt, const KeyedRng& rng, std::uint64_t step,
                         int max_rejections, bool implicit) {
  return advance_in_chamber(model, x, drift(model, x), dt, rng, step, max_rejections, 0.0, implicit);
}

TrajectoryRecord simulate_in_chamber(const Model& model, const Vec& x0, double t0, const StepperConfig& cfg,
                                     std::uint64_t trajectory, std::uint32_t segment, double rate_scale) {
  if (!model.system().is_regular(x0)) throw std::invalid_argument("start point must be regular");
  const KeyedRng rng(cfg.seed, trajectory, segment);
  TrajectoryRecord rec;
  Vec x = x0;
  double t = t0;
  rec.wall_min = min_abs_pairing(model, x);
  push(rec, t, x, cfg.store_path);
  Vec b;
  std::vector<double> rates(model.positive_count());
  std::uint64_t step = 0;
  while (t < cfg.t_horizon) {
    const double total = coefficients_unchecked(model, x, b, rates);
    const double remaining = cfg.t_horizon - t;
    double dt = effective_dt(model, x, cfg, remaining, rate_scale * total);
    auto s = advance_in_chamber(model, x, b, dt, rng, step++, cfg.max_rejections, t, wall_limited(model, x, cfg));
    x = std::move(s.x);
    // The last step lands exactly on the horizon unless it was halved.
    t = (s.dt == remaining) ? cfg.t_horizon : t + s.dt;
    rec.rejections += static_cast<std::uint64_t>(s.rejections);
    rec.wall_min = std::min(rec.wall_min, min_abs_pairing(model, x));
    push(rec, t, x, cfg.store_path);
  }
  rec.steps = step;
  rec.terminal = x;
  rec.terminal_time = t;
  return rec;
}

TrajectoryRecord simulate_radial(const Model& model, const Vec& x0, const StepperConfig& cfg,
                                 std::uint64_t trajectory) {
  cfg.validate();
  if (!model.system().in_open_chamber(x0)) throw std::invalid_argument("radial start must lie in the open chamber");
  return simulate_in_chamber(model, x0, 0.0, cfg, trajectory, 0);
}

CouplingRecord mirror_couple(const Model& model, const Vec& x0, const Vec& y0, const StepperConfig& cfg,
                             std::uint64_t pair) {
  cfg.validate();
  const auto& sys = model.system();
  if (!sys.in_open_chamber(x0) || !sys.in_open_chamber(y0))
    throw std::invalid_argument("coupling start points must lie in the open chamber");

  const KeyedRng rng(cfg.seed, pair, 0);
  CouplingRecord rec;
  Vec x = x0;
  Vec y = y0;
  double t = 0.0;
  Vec bx, by;
  std::vector<double> rates(model.positive_count());
  Vec gap_integral = Vec::Zero(model.rank());
  double z = (y - x).norm();
  std::optional<double> coupled;
  if (z <= cfg.couple_tolerance) {
    coupled = 0.0;
    y = x;
    z = 0.0;
  }

  rec.x_path.wall_min = min_abs_pairing(model, x);
  rec.y_path.wall_min = min_abs_pairing(model, y);
  push(rec.x_path, t, x, cfg.store_path);
  push(rec.y_path, t, y, cfg.store_path);
  if (cfg.store_path) rec.z.push_back(z);

  std::uint64_t step = 0;
  while (t < cfg.t_horizon && !(coupled && cfg.stop_at_coupling)) {
    const double remaining = cfg.t_horizon - t;
    coefficients_unchecked(model, x, bx, rates);
    if (coupled) {
      const double dt = effective_dt(model, x, cfg, remaining);
      auto s = advance_in_chamber(model, x, bx, dt, rng, step++, cfg.max_rejections, t, wall_limited(model, x, cfg));
      x = std::move(s.x);
      y = x;
      t = (s.dt == remaining) ? cfg.t_horizon : t + s.dt;
      rec.x_path.rejections += static_cast<std::uint64_t>(s.rejections);
    } else {
      coefficients_unchecked(model, y, by, rates);
      double dt = std::min(effective_dt(model, x, cfg, remaining), effective_dt(model, y, cfg, remaining));
      const Vec u = y - x;
      const double u2 = u.squaredNorm();
      const bool implicit_x = wall_limited(model, x, cfg);
      const bool implicit_y = wall_limited(model, y, cfg);
      bool accepted = false;
      for (int attempt = 0; attempt <= cfg.max_rejections; ++attempt) {
        const Vec g = gaussian(rng, model.rank(), step, attempt);
        const Vec rg = g - (2.0 * u.dot(g) / u2) * u;
        const double sq = std::sqrt(dt);
        Vec xn, yn;
        if (propose(model, x, bx, dt, sq * g, implicit_x, xn) && propose(model, y, by, dt, sq * rg, implicit_y, yn) &&
            same_chamber(model, x, xn) && same_chamber(model, y, yn)) {
          rec.x_path.rejections += static_cast<std::uint64_t>(attempt);
          // Drift actually applied, explicit or implicit.
          gap_integral += (yn - y - sq * rg) - (xn - x - sq * g);
          rec.drift_gap_sup = std::max(rec.drift_gap_sup, gap_integral.norm());
          const Vec zn = yn - xn;
          t = (dt == remaining) ? cfg.t_horizon : t + dt;
          double z_new = zn.norm();
          // Merge on closeness or on crossing the mirror hyperplane.
          if (z_new <= cfg.couple_tolerance || zn.dot(u) <= 0.0) {
            z_new = 0.0;
            yn = xn;
            coupled = t;
          }
          rec.qv += (z_new - z) * (z_new - z);
          rec.qv_time = t;
          z = z_new;
          x = std::move(xn);
          y = std::move(yn);
          accepted = true;
          break;
        }
        dt *= 0.5;
      }
      if (!accepted)
        throw WallContact("coupled step rejected near a wall", t, std::min(sys.wall_distance(x), sys.wall_distance(y)));
      ++step;
    }
    rec.x_path.wall_min = std::min(rec.x_path.wall_min, min_abs_pairing(model, x));
    rec.y_path.wall_min = std::min(rec.y_path.wall_min, min_abs_pairing(model, y));
    push(rec.x_path, t, x, cfg.store_path);
    push(rec.y_path, t, y, cfg.store_path);
    if (cfg.store_path) rec.z.push_back(z);
  }
  rec.coupling_time = coupled;
  rec.x_path.steps = rec.y_path.steps = step;
  rec.x_path.terminal = x;
  rec.y_path.terminal = y;
  rec.x_path.terminal_time = rec.y_path.terminal_time = t;
  rec.horizon = cfg.t_horizon;
  return rec;
}

double CouplingSummary::ecdf(double t) const {
  if (n == 0) return 0.0;
  const auto it = std::upper_bound(coupling_times.begin(), coupling_times.end(), t);
  return static_cast<double>(it - coupling_times.begin()) / static_cast<double>(n);
}

CouplingSummary coupling_statistics(std::span<const std::optional<double>> times, double horizon) {
  if (times.size() < 2) throw std::invalid_argument("coupling_statistics needs at least 2 records");
  CouplingSummary s;
  s.n = times.size();
  s.horizon = horizon;
  for (const auto& t : times)
    if (t) s.coupling_times.push_back(*t);
  s.n_coupled = s.coupling_times.size();
  std::sort(s.coupling_times.begin(), s.coupling_times.end());

  // Kaplan-Meier with right-censoring at the horizon.
  double surv = 1.0;
  std::size_t at_risk = s.n;
  for (std::size_t i = 0; i < s.coupling_times.size();) {
    std::size_t j = i;
    while (j < s.coupling_times.size() && s.coupling_times[j] == s.coupling_times[i]) ++j;
    const auto events = j - i;
    surv *= 1.0 - static_cast<double>(events) / static_cast<double>(at_risk);
    at_risk -= events;
    s.survival.emplace_back(s.coupling_times[i], surv);
    i = j;
  }
  return s;
}

CouplingSummary coupling_statistics(std::span<const CouplingRecord> records) {
  if (records.size() < 2) throw std::invalid_argument("coupling_statistics needs at least 2 records");
  std::vector<std::optional<double>> times;
  times.reserve(records.size());
  double horizon = 0.0;
  for (const auto& r : records) {
    times.push_back(r.coupling_time);
    horizon = std::max(horizon, r.horizon);
  }
  return coupling_statistics(times, horizon);
}

}  // namespace holab
