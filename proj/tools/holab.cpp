#include "holab/config.hpp"
#include "holab/model.hpp"
#include "holab/parallel.hpp"
#include "holab/runner.hpp"

#include <CLI11.hpp>

#include <cctype>
#include <charconv>
#include <cmath>
#include <iostream>
#include <optional>

namespace {

using holab::RunConfig;

// Command-line values that override the config file.
struct Overrides {
  std::string config_path;
  std::string family, method, function, output, experiment;
  int rank = 0;
  std::string system, grid;
  double normalization = 0, horizon = 0, dt = 0, lambda = 0, t = 0, wall_safety = 0, intensity_cap = 0;
  std::vector<double> k, x0, y0;
  std::vector<int> order;
  std::size_t paths = 0;
  std::uint64_t seed = 0;
  int threads = 0;
  std::vector<CLI::Option*> given;

  CLI::Option* opt(const std::string& name) const {
    for (auto* o : given)
      if (o->get_name() == name) return o;
    return nullptr;
  }
  bool has(const std::string& name) const {
    auto* o = opt(name);
    return o && o->count() > 0;
  }
};

void add_options(CLI::App* app, Overrides& o, bool system_only = false) {
  auto add = [&](CLI::Option* opt) { o.given.push_back(opt); };
  add(app->add_option("--config", o.config_path, "config file ([system]/[experiment]/[run] key = value)"));
  add(app->add_option("--family", o.family, "root system family: A, B, C, D, BC, rank1"));
  add(app->add_option("--rank", o.rank, "rank"));
  add(app->add_option("--system", o.system, "family and rank in one token, e.g. B2, A3, rank1"));
  add(app->add_option("--normalization,--alpha", o.normalization, "root scale (rank1: root length)"));
  add(app->add_option("--k", o.k, "multiplicity per root orbit (>= 1/2)")->delimiter(','));
  if (system_only) return;
  add(app->add_option("--x0", o.x0, "start point")->delimiter(','));
  add(app->add_option("--y0", o.y0, "second start point (couple, theorem1)")->delimiter(','));
  add(app->add_option("--horizon", o.horizon, "time horizon"));
  add(app->add_option("--dt", o.dt, "maximal time step"));
  add(app->add_option("--wall_safety", o.wall_safety, "near-wall step factor: dt <= wall_safety * d^2"));
  add(app->add_option("--intensity_cap", o.intensity_cap, "jump processes: total intensity * dt <= cap"));
  add(app->add_option("--paths", o.paths, "number of trajectories or pairs"));
  add(app->add_option("--lambda", o.lambda, "spectral parameter (oracle)"));
  add(app->add_option("--grid", o.grid, "evaluation grid: a:b:n (n points) or v1,v2,..."));
  add(app->add_option("--order", o.order, "skew-product root order, e.g. 0,1,2")->delimiter(','));
  add(app->add_option("--method", o.method, "thinning or skew"));
  add(app->add_option("--t", o.t, "martingale time"));
  add(app->add_option("--function", o.function, "martingale function: G_rho, G_minus_rho, one, identity"));
  add(app->add_option("--seed", o.seed, "random seed"));
  add(app->add_option("--output,--out", o.output, "output directory"));
  add(app->add_option("--threads", o.threads, "thread budget (default: HOLAB_THREADS or all cores)"));
}

std::string str(double x) {
  char buf[32];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, p);
}
std::string str(int x) { return std::to_string(x); }

// "a:b:n" expands to n equally spaced points; otherwise a comma list.
std::vector<double> parse_grid(const std::string& text) {
  auto number = [&](const std::string& s) {
    try {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used == s.size()) return v;
    } catch (const std::exception&) {
    }
    throw std::invalid_argument("malformed --grid value '" + s + "'");
  };
  std::vector<std::string> parts;
  const char sep = text.find(':') != std::string::npos ? ':' : ',';
  std::size_t start = 0;
  for (std::size_t pos; (pos = text.find(sep, start)) != std::string::npos; start = pos + 1)
    parts.push_back(text.substr(start, pos - start));
  parts.push_back(text.substr(start));
  std::vector<double> grid;
  if (sep == ':') {
    if (parts.size() != 3) throw std::invalid_argument("--grid range must be a:b:n");
    const double a = number(parts[0]), b = number(parts[1]);
    const double n = number(parts[2]);
    if (!(n >= 1) || n != std::floor(n)) throw std::invalid_argument("--grid point count must be a positive integer");
    const auto count = static_cast<std::size_t>(n);
    for (std::size_t i = 0; i < count; ++i)
      grid.push_back(count == 1 ? a : a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1));
    return grid;
  }
  for (const auto& p : parts) grid.push_back(number(p));
  return grid;
}

// "B2" -> (B, 2); "rank1" -> (rank1, 1).
std::pair<std::string, std::string> split_system(const std::string& s) {
  std::size_t i = s.size();
  while (i > 0 && std::isdigit(static_cast<unsigned char>(s[i - 1]))) --i;
  if (i == 0 || i == s.size()) throw std::invalid_argument("--system must be a family followed by a rank, e.g. B2");
  if (s.substr(0, i) == "rank") return {"rank1", s.substr(i)};
  return {s.substr(0, i), s.substr(i)};
}

// Builds the config through the text parser so the same validation applies.
RunConfig build_config(const Overrides& o, std::optional<holab::Experiment> experiment) {
  RunConfig c = o.config_path.empty() ? RunConfig{} : holab::load_config(o.config_path);
  auto fmt = [](const auto& v) {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + str(v[i]);
    return s + "]";
  };
  std::string sys, exp, run;
  if (o.has("--system")) {
    const auto [family, rank] = split_system(o.system);
    sys += "family = " + family + "\nrank = " + rank + "\n";
  }
  if (o.has("--family")) sys += "family = " + o.family + "\n";
  if (o.has("--rank")) sys += "rank = " + std::to_string(o.rank) + "\n";
  if (o.has("--normalization")) sys += "normalization = " + str(o.normalization) + "\n";
  if (o.has("--k")) sys += "k = " + fmt(o.k) + "\n";
  if (experiment) exp += "name = " + holab::to_string(*experiment) + "\n";
  if (o.has("--x0")) exp += "x0 = " + fmt(o.x0) + "\n";
  if (o.has("--y0")) exp += "y0 = " + fmt(o.y0) + "\n";
  if (o.has("--horizon")) exp += "horizon = " + str(o.horizon) + "\n";
  if (o.has("--dt")) exp += "dt = " + str(o.dt) + "\n";
  if (o.has("--wall_safety")) exp += "wall_safety = " + str(o.wall_safety) + "\n";
  if (o.has("--intensity_cap")) exp += "intensity_cap = " + str(o.intensity_cap) + "\n";
  if (o.has("--paths")) exp += "paths = " + std::to_string(o.paths) + "\n";
  if (o.has("--lambda")) exp += "lambda = " + str(o.lambda) + "\n";
  if (o.has("--grid")) exp += "grid = " + fmt(parse_grid(o.grid)) + "\n";
  if (o.has("--order")) exp += "order = " + fmt(o.order) + "\n";
  if (o.has("--method")) exp += "method = " + o.method + "\n";
  if (o.has("--t")) exp += "t = " + str(o.t) + "\n";
  if (o.has("--function")) exp += "function = " + o.function + "\n";
  if (o.has("--seed")) run += "seed = " + std::to_string(o.seed) + "\n";
  if (o.has("--output")) run += "output = \"" + o.output + "\"\n";
  if (o.has("--threads")) run += "threads = " + std::to_string(o.threads) + "\n";
  // Overrides parse as a second document on top of the file values.
  RunConfig over = holab::parse_config("[system]\n" + sys + "[experiment]\n" + exp + "[run]\n" + run);
  auto pick = [](auto& dst, const auto& src, bool given) {
    if (given) dst = src;
  };
  pick(c.family, over.family, o.has("--family") || o.has("--system"));
  pick(c.rank, over.rank, o.has("--rank") || o.has("--system"));
  pick(c.normalization, over.normalization, o.has("--normalization"));
  pick(c.k, over.k, o.has("--k"));
  pick(c.experiment, over.experiment, experiment.has_value());
  pick(c.x0, over.x0, o.has("--x0"));
  pick(c.y0, over.y0, o.has("--y0"));
  pick(c.horizon, over.horizon, o.has("--horizon"));
  pick(c.dt, over.dt, o.has("--dt"));
  pick(c.wall_safety, over.wall_safety, o.has("--wall_safety"));
  pick(c.intensity_cap, over.intensity_cap, o.has("--intensity_cap"));
  pick(c.paths, over.paths, o.has("--paths"));
  pick(c.lambda, over.lambda, o.has("--lambda"));
  pick(c.grid, over.grid, o.has("--grid"));
  pick(c.order, over.order, o.has("--order"));
  pick(c.method, over.method, o.has("--method"));
  pick(c.t, over.t, o.has("--t"));
  pick(c.function, over.function, o.has("--function"));
  pick(c.seed, over.seed, o.has("--seed"));
  pick(c.output, over.output, o.has("--output"));
  pick(c.threads, over.threads, o.has("--threads"));
  return c;
}

int rootsys_info(const Overrides& o) {
  RunConfig c = build_config(o, std::nullopt).resolved();
  holab::RootSystem sys = holab::RootSystem::build(c.family, c.rank, c.normalization);
  holab::MultiplicityFunction k(sys, c.k);
  const holab::Model model(sys, k);
  nlohmann::json j = holab::to_json(sys, k);
  j["positive_count"] = sys.positive_count();
  j["simple_roots"] = sys.simple_roots();
  const auto& r = model.rho();
  j["rho"] = std::vector<double>(r.data(), r.data() + r.size());
  j["weyl_group_order"] = model.group().size();
  j["orbit_count"] = sys.orbit_count();
  std::cout << j.dump(2) << '\n';
  return holab::kExitOk;
}

int oracle_eval(const Overrides& o) {
  RunConfig c = build_config(o, holab::Experiment::kOracle).resolved();
  const auto out = holab::execute(c, 1);
  std::cout << out.csv;
  return out.pass() ? holab::kExitOk : holab::kExitAssertion;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Heckman-Opdam process laboratory"};
  app.require_subcommand(1);
  app.set_version_flag("--version", HOLAB_VERSION);

  struct Command {
    CLI::App* app;
    Overrides o;
    std::optional<holab::Experiment> experiment;
  };
  std::vector<std::unique_ptr<Command>> commands;
  auto command = [&](CLI::App* parent, const std::string& name, const std::string& help,
                     std::optional<holab::Experiment> e, bool system_only = false) {
    auto cmd = std::make_unique<Command>();
    cmd->app = parent->add_subcommand(name, help);
    cmd->experiment = e;
    add_options(cmd->app, cmd->o, system_only);
    commands.push_back(std::move(cmd));
    return commands.back().get();
  };
  using E = holab::Experiment;

  auto* rootsys = app.add_subcommand("rootsys", "root system utilities");
  rootsys->require_subcommand(1);
  Command* info = command(rootsys, "info", "roots, simple roots, rho and |W| as JSON", std::nullopt, true);
  auto* oracle = app.add_subcommand("oracle", "rank-one hypergeometric oracle");
  oracle->require_subcommand(1);
  Command* eval = command(oracle, "eval", "CSV x,F,G,E,O on --grid for --lambda", E::kOracle);
  auto* simulate = app.add_subcommand("simulate", "simulate trajectories");
  simulate->require_subcommand(1);
  command(simulate, "radial", "radial process, wall-contact audit", E::kRadial);
  command(simulate, "full", "full process with jumps (--method thinning|skew)", E::kFull);
  command(&app, "couple", "mirror coupling of two radial processes", E::kCouple);
  command(&app, "equivalence", "thinning vs skew-product construction", E::kEquivalence);
  command(&app, "hw", "estimate h_w(x0) for every w", E::kHw);
  command(&app, "martingale", "E f(X_t) against f(x0)", E::kMartingale);
  command(&app, "theorem1", "coupling bound for the invariant test panel", E::kTheorem1);
  command(&app, "basis", "rank-one basis change between G and h", E::kBasis);
  command(&app, "lln", "X_T / T against rho", E::kLln);
  Command* run = command(&app, "run", "run the experiment named in --config", std::nullopt);
  std::string run_experiment;
  run->app->add_option("--experiment", run_experiment, "experiment name, overrides the config");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? holab::kExitOk : holab::kExitConfig;
  }

  try {
    if (info->app->parsed()) return rootsys_info(info->o);
    if (eval->app->parsed()) return oracle_eval(eval->o);
    for (const auto& cmd : commands) {
      if (!cmd->app->parsed()) continue;
      std::optional<holab::Experiment> e = cmd->experiment;
      if (cmd.get() == run && !run_experiment.empty()) e = holab::experiment_from_string(run_experiment);
      return holab::run(build_config(cmd->o, e), std::cerr);
    }
  } catch (const holab::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return holab::kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return holab::kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return holab::kExitRuntime;
  }
  return holab::kExitConfig;
}
