#include "holab/estimator.hpp"

#include "holab/ho_operators.hpp"
#include "holab/parallel.hpp"
#include "holab/stats.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace holab {

namespace {

McEstimate estimate_from(std::span<const double> samples, std::uint64_t seed, std::size_t excluded) {
  const SampleMoments m = moments(samples);
  return {m.mean, m.stderr_mean, m.n, seed, excluded};
}

FullTrajectory run_full(const Model& model, const Vec& x0, const JumpConfig& cfg, const EstimatorOptions& opt,
                        std::span<const int> order, std::uint64_t id) {
  if (opt.method == Method::kThinning) return simulate_thinning(model, x0, cfg, id);
  return simulate_skew_product(model, x0, cfg, order, id);
}

// Agresti-Coull standard error of a proportion; never zero.
double adjusted_se(std::size_t count, std::size_t n) {
  const double p = (static_cast<double>(count) + 2.0) / (static_cast<double>(n) + 4.0);
  return std::sqrt(p * (1.0 - p) / (static_cast<double>(n) + 4.0));
}

}  // namespace

std::string to_string(Method m) { return m == Method::kThinning ? "thinning" : "skew"; }

Method method_from_string(std::string_view name) {
  if (name == "thinning") return Method::kThinning;
  if (name == "skew" || name == "skew_product") return Method::kSkewProduct;
  throw std::invalid_argument("unknown method '" + std::string(name) + "' (expected thinning or skew)");
}

double HwTable::sum() const {
  std::vector<double> v;
  for (const auto& [w, e] : per_w) v.push_back(e.value);
  return pairwise_sum(v);
}

HwTable estimate_hw(const Model& model, const Vec& x0, const JumpConfig& cfg, std::size_t n,
                    const EstimatorOptions& options) {
  if (n < 100) throw std::invalid_argument("estimate_hw needs at least 100 trajectories");
  if (!model.system().is_regular(x0)) throw std::invalid_argument("estimate_hw: start point must be regular");
  JumpConfig quiet = cfg;
  quiet.stepper.store_path = false;
  const std::vector<int> order = options.root_order.empty() ? default_root_order(model) : options.root_order;

  const auto finals = parallel_map(n, options.threads, [&](std::size_t i) {
    return run_full(model, x0, quiet, options, order, options.trajectory_offset + i).final_angular;
  });

  HwTable table;
  table.start = x0;
  table.n = n;
  const std::size_t g = model.group().size();
  for (std::size_t w = 0; w < g; ++w) table.counts[static_cast<int>(w)] = 0;
  for (const auto& f : finals)
    if (f) ++table.counts[*f];
  for (const auto& [w, c] : table.counts) table.determined += c;

  const std::size_t excluded = n - table.determined;
  if (5 * excluded > n)
    throw std::runtime_error("estimate_hw: " + std::to_string(excluded) + " of " + std::to_string(n) +
                             " trajectories have no settled angular part; use a longer horizon");

  for (const auto& [w, c] : table.counts) {
    std::vector<double> ind(table.determined, 0.0);
    std::fill_n(ind.begin(), c, 1.0);
    table.per_w[w] = estimate_from(ind, cfg.stepper.seed, excluded);
  }
  return table;
}

double equivariance_z(const Model& model, int v, const HwTable& at_vx, const HwTable& at_x) {
  const auto& group = model.group();
  const int v_inv = group.inverse(v);
  double worst = 0.0;
  for (const auto& [w, e] : at_vx.per_w) {
    const int u = group.multiply(v_inv, w);
    const auto& other = at_x.per_w.at(u);
    const double se = std::hypot(adjusted_se(at_vx.counts.at(w), at_vx.determined),
                                 adjusted_se(at_x.counts.at(u), at_x.determined));
    worst = std::max(worst, std::abs(e.value - other.value) / se);
  }
  return worst;
}

MartingaleReport martingale_check(const ScalarField& f, const Model& model, const Vec& x0, double t,
                                  const JumpConfig& cfg, std::size_t n, const EstimatorOptions& options) {
  if (!(t > 0.0)) throw std::invalid_argument("martingale_check: t must be positive");
  if (n < 2) throw std::invalid_argument("martingale_check: need at least 2 trajectories");
  JumpConfig run = cfg;
  run.stepper.t_horizon = t;
  run.stepper.store_path = false;
  const std::vector<int> order = options.root_order.empty() ? default_root_order(model) : options.root_order;

  const auto values = parallel_map(n, options.threads, [&](std::size_t i) {
    return f(run_full(model, x0, run, options, order, options.trajectory_offset + i).base.terminal);
  });

  MartingaleReport r;
  r.t = t;
  r.target = f(x0);
  r.estimate = estimate_from(values, cfg.stepper.seed, 0);
  const double diff = r.estimate.value - r.target;
  if (r.estimate.std_error == 0.0) {
    r.degenerate = true;
    r.z = diff == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), diff);
  } else {
    r.z = diff / r.estimate.std_error;
  }
  return r;
}

std::vector<std::pair<std::string, ScalarField>> theorem1_panel(int rank) {
  std::vector<std::pair<std::string, ScalarField>> panel;
  for (int i = 0; i < rank; ++i)
    panel.emplace_back("tanh_x" + std::to_string(i + 1), ScalarField{[i](const Vec& x) { return std::tanh(x(i)); }});
  panel.emplace_back("exp_minus_norm", ScalarField{[](const Vec& x) { return std::exp(-x.norm()); }});
  // tanh and exp saturate once the process has drifted away; cos does not.
  for (int i = 0; i < rank; ++i)
    panel.emplace_back("cos_x" + std::to_string(i + 1), ScalarField{[i](const Vec& x) { return std::cos(x(i)); }});
  panel.emplace_back("constant", ScalarField{[](const Vec&) { return 1.0; }});
  return panel;
}

bool Theorem1Report::pass() const {
  return !panel.empty() && std::all_of(panel.begin(), panel.end(), [](const PanelEntry& e) { return e.pass; });
}

double Theorem1Report::bound_at(double t, double sup_abs) const {
  if (n == 0) return 2.0 * sup_abs;
  const auto it = std::upper_bound(coupling_times.begin(), coupling_times.end(), t);
  const double coupled = static_cast<double>(it - coupling_times.begin()) / static_cast<double>(n);
  return 2.0 * sup_abs * (1.0 - coupled);
}

Theorem1Report theorem1_experiment(const Model& model, const Vec& x0, const Vec& y0, const StepperConfig& cfg,
                                   std::size_t n, int threads) {
  if (n < 2) throw std::invalid_argument("theorem1_experiment: need at least 2 pairs");
  StepperConfig run = cfg;
  run.store_path = false;
  run.stop_at_coupling = true;
  const auto panel = theorem1_panel(model.rank());

  struct PairOutcome {
    std::optional<double> coupling_time;
    std::vector<double> diffs;
  };
  const auto outcomes = parallel_map(n, threads, [&](std::size_t i) {
    const CouplingRecord rec = mirror_couple(model, x0, y0, run, i);
    PairOutcome o;
    o.coupling_time = rec.coupling_time;
    // Once merged the two paths agree, so the paired difference is 0.
    for (const auto& [name, f] : panel)
      o.diffs.push_back(rec.coupling_time ? 0.0 : f(rec.x_path.terminal) - f(rec.y_path.terminal));
    return o;
  });

  Theorem1Report r;
  r.horizon = cfg.t_horizon;
  r.n = n;
  std::vector<std::optional<double>> times;
  for (const auto& o : outcomes) times.push_back(o.coupling_time);
  const CouplingSummary s = coupling_statistics(times, cfg.t_horizon);
  r.coupled_fraction = s.fraction_coupled();
  r.coupling_times = s.coupling_times;

  for (std::size_t j = 0; j < panel.size(); ++j) {
    std::vector<double> d;
    d.reserve(n);
    for (const auto& o : outcomes) d.push_back(o.diffs[j]);
    const SampleMoments m = moments(d);
    PanelEntry e;
    e.name = panel[j].first;
    e.difference = m.mean;
    e.std_error = m.stderr_mean;
    e.sup_abs = 1.0;
    e.bound = 2.0 * e.sup_abs * (1.0 - r.coupled_fraction);
    e.pass = std::abs(e.difference) <= e.bound + 3.0 * e.std_error;
    r.panel.push_back(std::move(e));
  }
  return r;
}

BasisFit fit_basis_change(std::span<const double> grid, std::span<const double> h_id, std::span<const double> h_s,
                          std::span<const double> h_se, std::span<const double> g_plus,
                          std::span<const double> g_minus) {
  const std::size_t m = grid.size();
  if (m < 4) throw std::invalid_argument("basis change: need at least 4 grid points");
  if (h_id.size() != m || h_s.size() != m || h_se.size() != m || g_plus.size() != m || g_minus.size() != m)
    throw std::invalid_argument("basis change: size mismatch");
  const bool both = std::any_of(grid.begin(), grid.end(), [](double x) { return x > 0.0; }) &&
                    std::any_of(grid.begin(), grid.end(), [](double x) { return x < 0.0; });
  if (!both) throw std::invalid_argument("basis change: grid must contain points of both chambers");

  Eigen::MatrixXd design(m, 2);
  Eigen::MatrixXd rhs(m, 2);
  for (std::size_t i = 0; i < m; ++i) {
    design(i, 0) = h_id[i];
    design(i, 1) = h_s[i];
    rhs(i, 0) = g_plus[i];
    rhs(i, 1) = g_minus[i];
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(design, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  BasisFit fit;
  fit.condition = sv(1) > 0.0 ? sv(0) / sv(1) : std::numeric_limits<double>::infinity();
  if (!(fit.condition < 100.0))
    throw std::invalid_argument("basis change: ill-conditioned design (condition " + std::to_string(fit.condition) +
                                "); spread the grid over both chambers");
  const Eigen::MatrixXd coef = svd.solve(rhs);  // 2 x 2, column per G row

  fit.matrix = Mat(2, 2);
  for (int w = 0; w < 2; ++w)
    for (int v = 0; v < 2; ++v) fit.matrix(w, v) = coef(v, w);
  fit.det = fit.matrix.determinant();
  fit.det_pass = std::abs(fit.det) >= 0.5;

  fit.residual_pass = true;
  fit.residuals.assign(2, std::vector<double>(m));
  fit.tolerance.assign(2, std::vector<double>(m));
  for (int w = 0; w < 2; ++w) {
    const double scale = std::hypot(fit.matrix(w, 0), fit.matrix(w, 1));
    fit.origin_values.push_back(0.5 * (fit.matrix(w, 0) + fit.matrix(w, 1)));
    for (std::size_t i = 0; i < m; ++i) {
      const double g = (w == 0 ? g_plus : g_minus)[i];
      fit.residuals[w][i] = g - (fit.matrix(w, 0) * h_id[i] + fit.matrix(w, 1) * h_s[i]);
      fit.tolerance[w][i] = 3.0 * scale * h_se[i];
      if (!(std::abs(fit.residuals[w][i]) <= fit.tolerance[w][i])) fit.residual_pass = false;
    }
  }
  return fit;
}

std::vector<double> default_basis_grid() { return {-4.0, -2.0, -1.0, -0.5, 0.5, 1.0, 2.0, 4.0}; }

BasisChangeReport basis_change_rank1(const Rank1Params& p, std::span<const double> grid, const JumpConfig& cfg,
                                     std::size_t n, const EstimatorOptions& options) {
  const RootSystem sys = RootSystem::build(Family::Rank1, 1, p.alpha);
  const Model model(sys, MultiplicityFunction::uniform(sys, p.k));
  BasisChangeReport r;
  r.params = p;
  r.grid.assign(grid.begin(), grid.end());
  const int s = model.group().reflection(0);

  std::vector<double> h_id, h_s, h_se;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] == 0.0) throw std::invalid_argument("basis change: grid points must be regular");
    EstimatorOptions opt = options;
    opt.trajectory_offset = options.trajectory_offset + i * n;
    r.tables.push_back(estimate_hw(model, make_vec({grid[i]}), cfg, n, opt));
    const HwTable& t = r.tables.back();
    h_id.push_back(t.per_w.at(WeylGroup::identity()).value);
    h_s.push_back(t.per_w.at(s).value);
    h_se.push_back(adjusted_se(t.counts.at(WeylGroup::identity()), t.determined));
  }
  r.g_plus = r.g_minus = std::vector<double>(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    r.g_plus[i] = rank1_G(p, p.rho(), grid[i]);
    r.g_minus[i] = rank1_G(p, -p.rho(), grid[i]);
  }
  r.fit = fit_basis_change(grid, h_id, h_s, h_se, r.g_plus, r.g_minus);
  return r;
}

bool LlnReport::pass(double z_max) const {
  for (int i = 0; i < z.size(); ++i)
    if (!(std::abs(z(i)) < z_max)) return false;
  return z.size() > 0;
}

LlnReport lln_check(const Model& model, const Vec& x0, const StepperConfig& cfg, std::size_t n, int threads) {
  if (n < 2) throw std::invalid_argument("lln_check: need at least 2 paths");
  StepperConfig run = cfg;
  run.store_path = false;
  const auto terminals =
      parallel_map(n, threads, [&](std::size_t i) { return Vec(simulate_radial(model, x0, run, i).terminal); });
  const int d = model.rank();
  LlnReport r;
  r.horizon = cfg.t_horizon;
  r.n = n;
  r.rho = model.rho();
  r.mean = r.std_error = r.z = r.variance = Vec::Zero(d);
  for (int c = 0; c < d; ++c) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = terminals[i](c) / cfg.t_horizon;
    const SampleMoments m = moments(v);
    r.mean(c) = m.mean;
    r.std_error(c) = m.stderr_mean;
    r.variance(c) = m.variance;
    r.z(c) = (m.mean - r.rho(c)) / m.stderr_mean;
  }
  return r;
}

Vec drift_flow(const Model& model, const Vec& x0, double t, double dt) {
  if (!model.system().in_open_chamber(x0)) throw std::invalid_argument("drift_flow: start must be in the chamber");
  // Classical RK4; the flow moves away from the walls.
  Vec x = x0;
  double s = 0.0;
  while (s < t) {
    const double h = std::min(dt, t - s);
    const Vec k1 = drift(model, x);
    const Vec k2 = drift(model, x + 0.5 * h * k1);
    const Vec k3 = drift(model, x + 0.5 * h * k2);
    const Vec k4 = drift(model, x + h * k3);
    x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    s += h;
  }
  return x;
}

}  // namespace holab
