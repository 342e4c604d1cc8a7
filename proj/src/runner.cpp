#include "holab/runner.hpp"

#include "holab/diffusion.hpp"
#include "holab/estimator.hpp"
#include "holab/jumps.hpp"
#include "holab/oracle.hpp"
#include "holab/parallel.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#ifndef HOLAB_VERSION
#define HOLAB_VERSION "0.0.0"
#endif

namespace holab {

namespace {

std::string num(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, p);
}

Vec to_vec(const std::vector<double>& v) {
  Vec x(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) x(static_cast<Eigen::Index>(i)) = v[i];
  return x;
}

nlohmann::json to_json_vec(const Vec& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Model make_model(const RunConfig& c) {
  RootSystem sys = RootSystem::build(c.family, c.rank, c.normalization);
  MultiplicityFunction k(sys, c.k);
  return Model(std::move(sys), std::move(k));
}

StepperConfig stepper(const RunConfig& c) {
  StepperConfig s;
  s.dt_max = c.dt;
  s.wall_safety = c.wall_safety;
  s.intensity_cap = c.intensity_cap;
  s.t_horizon = c.horizon;
  s.seed = c.seed;
  return s;
}

JumpConfig jump_config(const RunConfig& c) {
  JumpConfig j;
  j.stepper = stepper(c);
  return j;
}

Rank1Params rank1_params(const RunConfig& c) {
  if (c.family != Family::Rank1) throw ConfigError(0, "this experiment needs family = rank1");
  return Rank1Params::make(*c.normalization, c.k.front());
}

nlohmann::json tests_json(const std::vector<TestResult>& tests) {
  nlohmann::json a = nlohmann::json::array();
  for (const auto& t : tests)
    a.push_back({{"name", t.name}, {"statistic", t.statistic}, {"p", t.p_value}, {"threshold", t.threshold},
                 {"pass", t.pass}});
  return a;
}

void add_tests(ExperimentOutput& out, const std::string& prefix, const std::vector<TestResult>& tests) {
  for (const auto& t : tests) out.tests.push_back({prefix + t.name, t.statistic, t.p_value, t.pass});
}

std::string word_string(const WeylElement& e) {
  if (e.word.empty()) return "id";
  std::string s;
  for (std::size_t i = 0; i < e.word.size(); ++i) s += (i ? "." : "") + std::string("s") + std::to_string(e.word[i]);
  return s;
}

nlohmann::json hw_json(const Model& model, const HwTable& t) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& [w, e] : t.per_w)
    rows.push_back({{"w", w},
                    {"word", word_string(model.group()[static_cast<std::size_t>(w)])},
                    {"count", t.counts.at(w)},
                    {"value", e.value},
                    {"stderr", e.std_error}});
  return {{"start", to_json_vec(t.start)},
          {"n", t.n},
          {"determined", t.determined},
          {"excluded", t.n - t.determined},
          {"sum", t.sum()},
          {"per_w", rows}};
}

ExperimentOutput run_oracle(const RunConfig& c) {
  const Rank1Params p = rank1_params(c);
  ExperimentOutput out;
  std::ostringstream csv;
  csv << "x,F,G,E,O\n";
  const auto parts = rank1_G_parts(p, c.lambda, c.grid);
  const auto f = rank1_F_eigen(p, c.lambda * c.lambda - p.rho() * p.rho(), c.grid);
  double worst = 0.0;
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < c.grid.size(); ++i) {
    csv << num(c.grid[i]) << ',' << num(f[i]) << ',' << num(parts[i].value()) << ',' << num(parts[i].even) << ','
        << num(parts[i].odd) << '\n';
    worst = std::max(worst, std::abs(parts[i].even - f[i]));
    rows.push_back({{"x", c.grid[i]}, {"F", f[i]}, {"G", parts[i].value()}});
  }
  out.csv = csv.str();
  out.estimates = {{"values", rows}, {"max_even_minus_F", worst}};
  out.tests.push_back({"even_part_equals_F", worst, 1e-8, worst < 1e-8});
  return out;
}

ExperimentOutput run_radial(const RunConfig& c, int threads) {
  const Model model = make_model(c);
  const Vec x0 = to_vec(c.x0);
  const StepperConfig s = stepper(c);
  struct Outcome {
    bool aborted = false;
    Vec terminal;
    double wall_min = 0.0;
    std::uint64_t steps = 0;
  };
  const auto outcomes = parallel_map(c.paths, threads, [&](std::size_t i) {
    Outcome o;
    try {
      const auto r = simulate_radial(model, x0, s, i);
      o.terminal = r.terminal;
      o.wall_min = r.wall_min;
      o.steps = r.steps;
    } catch (const WallContact&) {
      o.aborted = true;
    }
    return o;
  });
  std::ostringstream csv;
  csv << "path,aborted";
  for (int j = 0; j < model.rank(); ++j) csv << ",x" << j + 1;
  csv << ",wall_min,steps\n";
  std::size_t aborts = 0;
  double wall_min = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    const auto& o = outcomes[i];
    csv << i << ',' << (o.aborted ? 1 : 0);
    for (int j = 0; j < model.rank(); ++j) csv << ',' << (o.aborted ? "" : num(o.terminal(j)));
    csv << ',' << num(o.wall_min) << ',' << o.steps << '\n';
    if (o.aborted) {
      ++aborts;
    } else {
      wall_min = std::min(wall_min, o.wall_min);
    }
  }
  ExperimentOutput out;
  out.csv = csv.str();
  out.estimates = {{"paths", c.paths}, {"wall_contact_aborts", aborts}, {"min_wall_pairing", wall_min}};
  out.tests.push_back({"zero_wall_contacts", static_cast<double>(aborts), 0.0, aborts == 0});
  return out;
}

// Full paths of the first few trajectories: t, x_1..x_n, angular word, and a
// flag on the grid point where a jump took effect.
std::string trajectory_dump(const Model& model, const Vec& x0, const RunConfig& c, JumpConfig cfg) {
  constexpr std::size_t kDumped = 5;
  cfg.stepper.store_path = true;
  std::ostringstream csv;
  csv << "path,t";
  for (int j = 0; j < model.rank(); ++j) csv << ",x" << j + 1;
  csv << ",angular_word,jump_flag\n";
  for (std::size_t i = 0; i < std::min(kDumped, c.paths); ++i) {
    const FullTrajectory p = c.method == Method::kThinning ? simulate_thinning(model, x0, cfg, i)
                                                           : simulate_skew_product(model, x0, cfg, c.order, i);
    const auto& times = p.base.times;
    std::size_t next_jump = 0, next_change = 0;
    int w = WeylGroup::identity();
    for (std::size_t r = 0; r < times.size(); ++r) {
      int flag = 0;
      while (next_jump < p.jumps.size() && p.jumps[next_jump].time <= times[r]) {
        flag = 1;
        ++next_jump;
      }
      while (next_change < p.angular_path.size() && p.angular_path[next_change].time <= times[r])
        w = p.angular_path[next_change++].element;
      csv << i << ',' << num(times[r]);
      for (int j = 0; j < model.rank(); ++j) csv << ',' << num(p.base.positions[r](j));
      csv << ',' << word_string(model.group()[w]) << ',' << flag << '\n';
    }
  }
  return csv.str();
}

ExperimentOutput run_full(const RunConfig& c, int threads) {
  const Model model = make_model(c);
  const Vec x0 = to_vec(c.x0);
  const JumpConfig cfg = jump_config(c);
  const auto paths = parallel_map(c.paths, threads, [&](std::size_t i) {
    return c.method == Method::kThinning ? simulate_thinning(model, x0, cfg, i)
                                         : simulate_skew_product(model, x0, cfg, c.order, i);
  });
  std::ostringstream csv;
  csv << "path";
  for (int j = 0; j < model.rank(); ++j) csv << ",x" << j + 1;
  csv << ",jumps,first_jump,final_angular\n";
  std::vector<double> counts;
  std::size_t settled = 0;
  for (std::size_t i = 0; i < paths.size(); ++i) {
    const auto& p = paths[i];
    csv << i;
    for (int j = 0; j < model.rank(); ++j) csv << ',' << num(p.base.terminal(j));
    csv << ',' << p.jumps.size() << ',' << (p.jumps.empty() ? "" : num(p.jumps.front().time)) << ','
        << (p.final_angular ? std::to_string(*p.final_angular) : "") << '\n';
    counts.push_back(static_cast<double>(p.jumps.size()));
    if (p.final_angular) ++settled;
  }
  ExperimentOutput out;
  out.csv = csv.str();
  out.estimates = {{"method", to_string(c.method)},
                   {"mean_jumps", moments(counts).mean},
                   {"settled", settled},
                   {"paths", c.paths}};
  out.tests.push_back({"completed", static_cast<double>(paths.size()), 0.0, true});
  out.files.emplace_back("trajectories.csv", trajectory_dump(model, x0, c, cfg));
  return out;
}

ExperimentOutput run_couple(const RunConfig& c, int threads) {
  const Model model = make_model(c);
  const Vec x0 = to_vec(c.x0);
  const Vec y0 = to_vec(c.y0);
  const StepperConfig s = stepper(c);
  const auto recs = parallel_map(c.paths, threads, [&](std::size_t i) {
    CouplingRecord r = mirror_couple(model, x0, y0, s, i);
    r.x_path.positions.clear();
    r.y_path.positions.clear();
    return r;
  });
  const CouplingSummary sum = coupling_statistics(recs);
  std::vector<double> rates;
  std::vector<double> gaps;
  std::ostringstream csv;
  csv << "pair,coupling_time,qv,qv_time,drift_gap_sup\n";
  for (std::size_t i = 0; i < recs.size(); ++i) {
    const auto& r = recs[i];
    csv << i << ',' << (r.coupling_time ? num(*r.coupling_time) : "") << ',' << num(r.qv) << ',' << num(r.qv_time)
        << ',' << num(r.drift_gap_sup) << '\n';
    if (r.qv_time > 0.0) rates.push_back(r.qv / r.qv_time);
    gaps.push_back(r.drift_gap_sup);
  }
  double median = std::numeric_limits<double>::quiet_NaN();
  if (!rates.empty()) {
    std::sort(rates.begin(), rates.end());
    const std::size_t m = rates.size();
    median = m % 2 ? rates[m / 2] : 0.5 * (rates[m / 2 - 1] + rates[m / 2]);
  }
  nlohmann::json km = nlohmann::json::array();
  for (const auto& [t, sv] : sum.survival) km.push_back({t, sv});
  ExperimentOutput out;
  out.csv = csv.str();
  out.estimates = {{"pairs", sum.n},
                   {"coupled", sum.n_coupled},
                   {"coupled_fraction", sum.fraction_coupled()},
                   {"median_qv_rate", median},
                   {"max_drift_gap_sup", gaps.empty() ? 0.0 : *std::max_element(gaps.begin(), gaps.end())},
                   {"survival", km}};
  out.tests.push_back({"coupled_fraction", sum.fraction_coupled(), c.min_coupled,
                       sum.fraction_coupled() >= c.min_coupled});
  out.tests.push_back({"median_qv_rate_in_band", median, c.qv_low, median >= c.qv_low && median <= c.qv_high});
  return out;
}

ExperimentOutput run_equivalence(const RunConfig& c, int threads) {
  const Model model = make_model(c);
  CompareOptions opt;
  opt.root_order = c.order;
  opt.threads = threads;
  const EquivalenceReport r = compare_constructions(model, to_vec(c.x0), jump_config(c), c.paths, opt);
  ExperimentOutput out;
  out.estimates = {{"paths", r.n_paths},
                   {"family_alpha", r.family_alpha},
                   {"main", tests_json(r.main)},
                   {"null", tests_json(r.null)},
                   {"power", tests_json(r.power)}};
  std::ostringstream csv;
  csv << "comparison,test,statistic,p,threshold,pass\n";
  for (const auto& [label, v] : {std::pair{"main", &r.main}, {"null", &r.null}, {"power", &r.power}})
    for (const auto& t : *v)
      csv << label << ',' << t.name << ',' << num(t.statistic) << ',' << num(t.p_value) << ',' << num(t.threshold)
          << ',' << (t.pass ? 1 : 0) << '\n';
  out.csv = csv.str();
  add_tests(out, "main/", r.main);
  add_tests(out, "null/", r.null);
  std::size_t rejected = 0;
  double min_p = 1.0;
  for (const auto& t : r.power) {
    if (!t.pass) ++rejected;
    min_p = std::min(min_p, t.p_value);
  }
  out.tests.push_back({"power/doubled_rate_detected", static_cast<double>(rejected), min_p, r.power_detected});
  return out;
}

ExperimentOutput run_hw(const RunConfig& c, int threads) {
  const Model model = make_model(c);
  EstimatorOptions opt;
  opt.threads = threads;
  opt.method = c.method;
  opt.root_order = c.order;
  const HwTable t = estimate_hw(model, to_vec(c.x0), jump_config(c), c.paths, opt);
  ExperimentOutput out;
  out.estimates = hw_json(model, t);
  std::ostringstream csv;
  csv << "w,word,count,value,stderr\n";
  bool in_range = true;
  for (const auto& [w, e] : t.per_w) {
    csv << w << ',' << word_string(model.group()[static_cast<std::size_t>(w)]) << ',' << t.counts.at(w) << ','
        << num(e.value) << ',' << num(e.std_error) << '\n';
    in_range = in_range && e.value >= 0.0 && e.value <= 1.0;
  }
  out.csv = csv.str();
  out.tests.push_back({"rows_sum_to_one", t.sum(), 1e-12, std::abs(t.sum() - 1.0) <= 1e-12});
  out.tests.push_back({"values_in_unit_interval", in_range ? 1.0 : 0.0, 0.0, in_range});
  return out;
}

ScalarField martingale_function(const RunConfig& c) {
  if (c.function == "one") return {[](const Vec&) { return 1.0; }};
  if (c.function == "identity") return {[](const Vec& x) { return x(0); }};
  const Rank1Params p = rank1_params(c);
  const double lambda = c.function == "G_rho" ? p.rho() : -p.rho();
  auto table = std::make_shared<Rank1Table>(p, lambda);
  return {[table](const Vec& x) { return (*table)(x(0)); }};
}

ExperimentOutput run_martingale(const RunConfig& c, int threads) {
  const Model model = make_model(c);
  EstimatorOptions opt;
  opt.threads = threads;
  opt.method = c.method;
  opt.root_order = c.order;
  const MartingaleReport r =
      martingale_check(martingale_function(c), model, to_vec(c.x0), c.t, jump_config(c), c.paths, opt);
  ExperimentOutput out;
  out.estimates = {{"function", c.function},
                   {"t", r.t},
                   {"target", r.target},
                   {"mean", r.estimate.value},
                   {"stderr", r.estimate.std_error},
                   {"n", r.estimate.n},
                   {"z", std::isfinite(r.z) ? nlohmann::json(r.z) : nlohmann::json(num(r.z))},
                   {"degenerate", r.degenerate}};
  out.csv = "function,t,target,mean,stderr,z\n" + c.function + ',' + num(r.t) + ',' + num(r.target) + ',' +
            num(r.estimate.value) + ',' + num(r.estimate.std_error) + ',' + num(r.z) + '\n';
  out.tests.push_back({"abs_z_below_3", r.z, normal_two_sided_p(r.z), r.pass()});
  return out;
}

ExperimentOutput run_theorem1(const RunConfig& c, int threads) {
  const Model model = make_model(c);
  const Theorem1Report r = theorem1_experiment(model, to_vec(c.x0), to_vec(c.y0), stepper(c), c.paths, threads);
  ExperimentOutput out;
  nlohmann::json panel = nlohmann::json::array();
  std::ostringstream csv;
  csv << "function,difference,stderr,bound,pass\n";
  for (const auto& e : r.panel) {
    panel.push_back({{"name", e.name},
                     {"difference", e.difference},
                     {"stderr", e.std_error},
                     {"sup_abs", e.sup_abs},
                     {"bound", e.bound},
                     {"pass", e.pass}});
    csv << e.name << ',' << num(e.difference) << ',' << num(e.std_error) << ',' << num(e.bound) << ','
        << (e.pass ? 1 : 0) << '\n';
    out.tests.push_back({"within_coupling_bound/" + e.name, std::abs(e.difference), e.bound + 3.0 * e.std_error,
                         e.pass});
  }
  out.csv = csv.str();
  out.estimates = {{"horizon", r.horizon}, {"pairs", r.n}, {"coupled_fraction", r.coupled_fraction}, {"panel", panel}};
  return out;
}

ExperimentOutput run_basis(const RunConfig& c, int threads) {
  const Rank1Params p = rank1_params(c);
  EstimatorOptions opt;
  opt.threads = threads;
  opt.method = c.method;
  const BasisChangeReport r = basis_change_rank1(p, c.grid, jump_config(c), c.paths, opt);
  const Mat& m = r.fit.matrix;
  ExperimentOutput out;
  std::ostringstream csv;
  csv << "x,h_id,h_s,G_rho,G_minus_rho,residual_G_rho,residual_G_minus_rho,tolerance\n";
  for (std::size_t i = 0; i < r.grid.size(); ++i) {
    const auto& t = r.tables[i];
    csv << num(r.grid[i]) << ',' << num(t.per_w.at(0).value) << ',' << num(t.per_w.at(1).value) << ','
        << num(r.g_plus[i]) << ',' << num(r.g_minus[i]) << ',' << num(r.fit.residuals[0][i]) << ','
        << num(r.fit.residuals[1][i]) << ',' << num(r.fit.tolerance[0][i]) << '\n';
  }
  out.csv = csv.str();
  out.estimates = {{"matrix", {{m(0, 0), m(0, 1)}, {m(1, 0), m(1, 1)}}},
                   {"rows", {"G_rho", "G_minus_rho"}},
                   {"columns", {"h_id", "h_s"}},
                   {"det", r.fit.det},
                   {"condition", r.fit.condition},
                   {"origin_values", r.fit.origin_values},
                   {"residuals", r.fit.residuals},
                   {"tolerance", r.fit.tolerance}};
  double worst = 0.0;
  for (int w = 0; w < 2; ++w)
    for (std::size_t i = 0; i < r.grid.size(); ++i)
      worst = std::max(worst, std::abs(r.fit.residuals[w][i]) / r.fit.tolerance[w][i]);
  out.tests.push_back({"residuals_within_3_mc_errors", worst, 1.0, r.fit.residual_pass});
  out.tests.push_back({"det_bounded_away_from_zero", r.fit.det, 0.5, r.fit.det_pass});
  return out;
}

ExperimentOutput run_lln(const RunConfig& c, int threads) {
  const Model model = make_model(c);
  const LlnReport r = lln_check(model, to_vec(c.x0), stepper(c), c.paths, threads);
  ExperimentOutput out;
  out.estimates = {{"horizon", r.horizon},
                   {"paths", r.n},
                   {"rho", to_json_vec(r.rho)},
                   {"mean", to_json_vec(r.mean)},
                   {"stderr", to_json_vec(r.std_error)},
                   {"z", to_json_vec(r.z)},
                   {"variance", to_json_vec(r.variance)}};
  std::ostringstream csv;
  csv << "component,rho,mean,stderr,z\n";
  for (int i = 0; i < r.z.size(); ++i) {
    csv << i + 1 << ',' << num(r.rho(i)) << ',' << num(r.mean(i)) << ',' << num(r.std_error(i)) << ','
        << num(r.z(i)) << '\n';
    out.tests.push_back({"component_" + std::to_string(i + 1) + "_within_3_stderr", r.z(i),
                         normal_two_sided_p(r.z(i)), std::abs(r.z(i)) < 3.0});
  }
  out.csv = csv.str();
  return out;
}

std::string timestamp_utc() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream o;
  o << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return o.str();
}

void write_file(const std::filesystem::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << content;
  if (!out) throw std::runtime_error("write failed for " + p.string());
}

}  // namespace

bool ExperimentOutput::pass() const {
  return std::all_of(tests.begin(), tests.end(), [](const Assertion& a) { return a.pass; });
}

std::vector<std::string> ExperimentOutput::failures() const {
  std::vector<std::string> f;
  for (const auto& a : tests)
    if (!a.pass) f.push_back(a.name);
  return f;
}

ExperimentOutput execute(const RunConfig& c, int threads) {
  switch (c.experiment) {
    case Experiment::kOracle: return run_oracle(c);
    case Experiment::kRadial: return run_radial(c, threads);
    case Experiment::kFull: return run_full(c, threads);
    case Experiment::kCouple: return run_couple(c, threads);
    case Experiment::kEquivalence: return run_equivalence(c, threads);
    case Experiment::kHw: return run_hw(c, threads);
    case Experiment::kMartingale: return run_martingale(c, threads);
    case Experiment::kTheorem1: return run_theorem1(c, threads);
    case Experiment::kBasis: return run_basis(c, threads);
    case Experiment::kLln: return run_lln(c, threads);
  }
  throw std::logic_error("unhandled experiment");
}

nlohmann::json result_document(const RunConfig& c, const ExperimentOutput& out) {
  nlohmann::json tests = nlohmann::json::array();
  for (const auto& a : out.tests) {
    const auto finite = [](double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(num(x)); };
    tests.push_back({{"name", a.name}, {"statistic", finite(a.statistic)}, {"p", finite(a.p)}, {"pass", a.pass}});
  }
  return {{"schema_version", kSchemaVersion},
          {"experiment", to_string(c.experiment)},
          {"config", to_json(c, false)},
          {"estimates", out.estimates},
          {"tests", tests},
          {"pass", out.pass()},
          {"failures", out.failures()}};
}

int run(const RunConfig& config, std::ostream& log) {
  RunConfig c;
  try {
    c = config.resolved();
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
  const int threads = c.threads > 0 ? c.threads : default_thread_budget();
  const auto start = std::chrono::steady_clock::now();
  ExperimentOutput out;
  try {
    out = execute(c, threads);
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    log << "invalid input: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    log << "run failed: " << e.what() << '\n';
    return kExitRuntime;
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  const nlohmann::json result = result_document(c, out);
  std::vector<std::string> files = {"result.json", "result.csv"};
  for (const auto& f : out.files) files.push_back(f.first);
  nlohmann::json manifest = {{"schema_version", kSchemaVersion},
                             {"tool", "holab"},
                             {"version", HOLAB_VERSION},
                             {"config", to_json(c, true)},
                             {"config_text", to_text(c)},
                             {"threads_used", threads},
                             {"wall_clock_seconds", wall},
                             {"files", files},
                             {"pass", out.pass()},
                             {"failures", out.failures()},
                             {"timestamp", timestamp_utc()}};
  try {
    const std::filesystem::path dir(c.output);
    std::filesystem::create_directories(dir);
    write_file(dir / "result.json", result.dump(2) + "\n");
    write_file(dir / "result.csv", out.csv);
    for (const auto& [name, content] : out.files) write_file(dir / name, content);
    write_file(dir / "manifest.json", manifest.dump(2) + "\n");
  } catch (const std::exception& e) {
    log << "I/O error: " << e.what() << '\n';
    return kExitRuntime;
  }

  for (const auto& a : out.tests)
    log << (a.pass ? "PASS " : "FAIL ") << a.name << " statistic=" << num(a.statistic) << " p=" << num(a.p) << '\n';
  log << (out.pass() ? "all assertions passed" : "assertion failures: " + std::to_string(out.failures().size()))
      << " (" << c.output << ")\n";
  return out.pass() ? kExitOk : kExitAssertion;
}

}  // namespace holab
