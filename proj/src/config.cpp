#include "holab/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace holab {

namespace {

constexpr std::pair<Experiment, const char*> kExperimentNames[] = {
    {Experiment::kOracle, "oracle"},         {Experiment::kRadial, "radial"}, {Experiment::kFull, "full"},
    {Experiment::kCouple, "couple"},         {Experiment::kEquivalence, "equivalence"},
    {Experiment::kHw, "hw"},                 {Experiment::kMartingale, "martingale"},
    {Experiment::kTheorem1, "theorem1"},     {Experiment::kBasis, "basis"},
    {Experiment::kLln, "lln"},
};

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(std::string_view s, int line) {
  s = trim(s);
  double v = 0.0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || s.empty() || !std::isfinite(v))
    throw ConfigError(line, "expected a number, got '" + std::string(s) + "'");
  return v;
}

long long to_integer(std::string_view s, int line) {
  s = trim(s);
  long long v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || s.empty())
    throw ConfigError(line, "expected an integer, got '" + std::string(s) + "'");
  return v;
}

std::vector<std::string_view> array_items(std::string_view s, int line) {
  s = trim(s);
  if (s.size() < 2 || s.front() != '[' || s.back() != ']')
    throw ConfigError(line, "malformed array '" + std::string(s) + "' (expected [a, b, ...])");
  const std::string_view body = trim(s.substr(1, s.size() - 2));
  std::vector<std::string_view> items;
  if (body.empty()) return items;
  std::size_t start = 0;
  for (;;) {
    const auto comma = body.find(',', start);
    const auto item = trim(body.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (item.empty() || item.find_first_of("[]") != std::string_view::npos)
      throw ConfigError(line, "malformed array '" + std::string(s) + "'");
    items.push_back(item);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return items;
}

std::vector<double> to_doubles(std::string_view s, int line) {
  std::vector<double> v;
  for (auto item : array_items(s, line)) v.push_back(to_double(item, line));
  return v;
}

std::string to_string_value(std::string_view s, int line) {
  s = trim(s);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') return std::string(s.substr(1, s.size() - 2));
  if (s.empty() || s.find_first_of("\"[]") != std::string_view::npos)
    throw ConfigError(line, "expected a string, got '" + std::string(s) + "'");
  return std::string(s);
}

// Scalar or array, for k.
std::vector<double> to_doubles_or_scalar(std::string_view s, int line) {
  s = trim(s);
  if (!s.empty() && s.front() == '[') return to_doubles(s, line);
  return {to_double(s, line)};
}

using Setter = std::function<void(RunConfig&, std::string_view, int)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"system.family", [](RunConfig& c, auto v, int l) {
         try {
           c.family = family_from_string(to_string_value(v, l));
         } catch (const std::invalid_argument& e) {
           throw ConfigError(l, e.what());
         }
       }},
      {"system.rank", [](RunConfig& c, auto v, int l) {
         const auto r = to_integer(v, l);
         if (r < 1 || r > kMaxRank) throw ConfigError(l, "rank must be in [1, " + std::to_string(kMaxRank) + "]");
         c.rank = static_cast<int>(r);
       }},
      {"system.normalization", [](RunConfig& c, auto v, int l) {
         const double x = to_double(v, l);
         if (!(x > 0.0)) throw ConfigError(l, "normalization must be positive");
         c.normalization = x;
       }},
      {"system.k", [](RunConfig& c, auto v, int l) {
         auto k = to_doubles_or_scalar(v, l);
         if (k.empty()) throw ConfigError(l, "k needs at least one value");
         for (double x : k)
           if (!(x >= 0.5)) throw ConfigError(l, "multiplicity k = " + std::to_string(x) + " violates k >= 1/2");
         c.k = std::move(k);
       }},
      {"experiment.name", [](RunConfig& c, auto v, int l) {
         try {
           c.experiment = experiment_from_string(to_string_value(v, l));
         } catch (const std::invalid_argument& e) {
           throw ConfigError(l, e.what());
         }
       }},
      {"experiment.x0", [](RunConfig& c, auto v, int l) { c.x0 = to_doubles(v, l); }},
      {"experiment.y0", [](RunConfig& c, auto v, int l) { c.y0 = to_doubles(v, l); }},
      {"experiment.horizon", [](RunConfig& c, auto v, int l) {
         c.horizon = to_double(v, l);
         if (!(c.horizon > 0.0)) throw ConfigError(l, "horizon must be positive");
       }},
      {"experiment.dt", [](RunConfig& c, auto v, int l) {
         c.dt = to_double(v, l);
         if (!(c.dt > 0.0)) throw ConfigError(l, "dt must be positive");
       }},
      {"experiment.wall_safety", [](RunConfig& c, auto v, int l) {
         c.wall_safety = to_double(v, l);
         if (!(c.wall_safety > 0.0)) throw ConfigError(l, "wall_safety must be positive");
       }},
      {"experiment.intensity_cap", [](RunConfig& c, auto v, int l) {
         c.intensity_cap = to_double(v, l);
         if (!(c.intensity_cap > 0.0)) throw ConfigError(l, "intensity_cap must be positive");
       }},
      {"experiment.paths", [](RunConfig& c, auto v, int l) {
         const auto n = to_integer(v, l);
         if (n < 2) throw ConfigError(l, "paths must be at least 2");
         c.paths = static_cast<std::size_t>(n);
       }},
      {"experiment.lambda", [](RunConfig& c, auto v, int l) { c.lambda = to_double(v, l); }},
      {"experiment.grid", [](RunConfig& c, auto v, int l) { c.grid = to_doubles(v, l); }},
      {"experiment.order", [](RunConfig& c, auto v, int l) {
         c.order.clear();
         for (auto item : array_items(v, l)) c.order.push_back(static_cast<int>(to_integer(item, l)));
       }},
      {"experiment.method", [](RunConfig& c, auto v, int l) {
         try {
           c.method = method_from_string(to_string_value(v, l));
         } catch (const std::invalid_argument& e) {
           throw ConfigError(l, e.what());
         }
       }},
      {"experiment.t", [](RunConfig& c, auto v, int l) {
         c.t = to_double(v, l);
         if (!(c.t > 0.0)) throw ConfigError(l, "t must be positive");
       }},
      {"experiment.function", [](RunConfig& c, auto v, int l) {
         c.function = to_string_value(v, l);
         if (c.function != "G_rho" && c.function != "G_minus_rho" && c.function != "one" && c.function != "identity")
           throw ConfigError(l, "function must be one of G_rho, G_minus_rho, one, identity");
       }},
      {"experiment.min_coupled", [](RunConfig& c, auto v, int l) { c.min_coupled = to_double(v, l); }},
      {"experiment.qv_low", [](RunConfig& c, auto v, int l) { c.qv_low = to_double(v, l); }},
      {"experiment.qv_high", [](RunConfig& c, auto v, int l) { c.qv_high = to_double(v, l); }},
      {"run.seed", [](RunConfig& c, auto v, int l) {
         const auto t = trim(v);
         std::uint64_t s = 0;
         const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), s);
         if (ec != std::errc() || p != t.data() + t.size() || t.empty())
           throw ConfigError(l, "seed must be a non-negative integer below 2^64, got '" + std::string(t) + "'");
         c.seed = s;
       }},
      {"run.output", [](RunConfig& c, auto v, int l) { c.output = to_string_value(v, l); }},
      {"run.threads", [](RunConfig& c, auto v, int l) {
         const auto n = to_integer(v, l);
         if (n < 0) throw ConfigError(l, "threads must be non-negative");
         c.threads = static_cast<int>(n);
       }},
  };
  return table;
}

std::string fmt(double x) {
  char buf[32];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, p);
}

template <class T>
std::string fmt_array(const std::vector<T>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    if constexpr (std::is_floating_point_v<T>) {
      s += fmt(v[i]);
    } else {
      s += std::to_string(v[i]);
    }
  }
  return s + "]";
}

}  // namespace

std::string to_string(Experiment e) {
  for (const auto& [x, name] : kExperimentNames)
    if (x == e) return name;
  return "unknown";
}

Experiment experiment_from_string(std::string_view name) {
  for (const auto& [x, n] : kExperimentNames)
    if (name == n) return x;
  throw std::invalid_argument("unknown experiment '" + std::string(name) + "'");
}

RunConfig parse_config(std::string_view text) {
  RunConfig c;
  std::string section;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(line_no, "malformed section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      if (section != "system" && section != "experiment" && section != "run")
        throw ConfigError(line_no, "unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(line_no, "expected key = value");
    if (section.empty()) throw ConfigError(line_no, "key outside of a section");
    const std::string key = section + "." + std::string(trim(line.substr(0, eq)));
    const auto it = setters().find(key);
    if (it == setters().end()) throw ConfigError(line_no, "unknown key '" + key + "'");
    it->second(c, line.substr(eq + 1), line_no);
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(0, "cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

RunConfig RunConfig::resolved() const {
  RunConfig r = *this;
  RootSystem sys = [&] {
    try {
      return RootSystem::build(family, rank, normalization);
    } catch (const std::exception& e) {
      throw ConfigError(0, e.what());
    }
  }();
  r.normalization = sys.normalization();
  if (static_cast<int>(k.size()) != sys.orbit_count()) {
    if (k.size() != 1)
      throw ConfigError(0, "k has " + std::to_string(k.size()) + " values but the system has " +
                               std::to_string(sys.orbit_count()) + " root orbits");
    r.k.assign(static_cast<std::size_t>(sys.orbit_count()), k.front());
  }
  const Vec rh = rho(sys, MultiplicityFunction(sys, r.k));
  auto as_vector = [](const Vec& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
  if (r.x0.empty()) r.x0 = as_vector(rh);
  if (r.y0.empty()) r.y0 = as_vector(3.0 * rh);
  const auto n = static_cast<std::size_t>(sys.rank());
  if (r.x0.size() != n || r.y0.size() != n)
    throw ConfigError(0, "x0 and y0 must have " + std::to_string(n) + " coordinates");
  if (r.grid.empty()) r.grid = default_basis_grid();
  if (r.order.empty()) {
    for (std::size_t i = 0; i < sys.positive_count(); ++i) r.order.push_back(static_cast<int>(i));
  }
  return r;
}

std::string to_text(const RunConfig& c) {
  std::ostringstream o;
  o << "[system]\n";
  o << "family = " << to_string(c.family) << "\n";
  o << "rank = " << c.rank << "\n";
  if (c.normalization) o << "normalization = " << fmt(*c.normalization) << "\n";
  o << "k = " << fmt_array(c.k) << "\n";
  o << "\n[experiment]\n";
  o << "name = " << to_string(c.experiment) << "\n";
  if (!c.x0.empty()) o << "x0 = " << fmt_array(c.x0) << "\n";
  if (!c.y0.empty()) o << "y0 = " << fmt_array(c.y0) << "\n";
  o << "horizon = " << fmt(c.horizon) << "\n";
  o << "dt = " << fmt(c.dt) << "\n";
  o << "wall_safety = " << fmt(c.wall_safety) << "\n";
  o << "intensity_cap = " << fmt(c.intensity_cap) << "\n";
  o << "paths = " << c.paths << "\n";
  o << "lambda = " << fmt(c.lambda) << "\n";
  if (!c.grid.empty()) o << "grid = " << fmt_array(c.grid) << "\n";
  if (!c.order.empty()) o << "order = " << fmt_array(c.order) << "\n";
  o << "method = " << to_string(c.method) << "\n";
  o << "t = " << fmt(c.t) << "\n";
  o << "function = " << c.function << "\n";
  o << "min_coupled = " << fmt(c.min_coupled) << "\n";
  o << "qv_low = " << fmt(c.qv_low) << "\n";
  o << "qv_high = " << fmt(c.qv_high) << "\n";
  o << "\n[run]\n";
  o << "seed = " << c.seed << "\n";
  o << "output = \"" << c.output << "\"\n";
  o << "threads = " << c.threads << "\n";
  return o.str();
}

nlohmann::json to_json(const RunConfig& c, bool with_run) {
  nlohmann::json j;
  j["system"] = {{"family", to_string(c.family)}, {"rank", c.rank}, {"k", c.k}};
  j["system"]["normalization"] = c.normalization ? nlohmann::json(*c.normalization) : nlohmann::json(nullptr);
  j["experiment"] = {{"name", to_string(c.experiment)},
                     {"x0", c.x0},
                     {"y0", c.y0},
                     {"horizon", c.horizon},
                     {"dt", c.dt},
                     {"wall_safety", c.wall_safety},
                     {"intensity_cap", c.intensity_cap},
                     {"paths", c.paths},
                     {"lambda", c.lambda},
                     {"grid", c.grid},
                     {"order", c.order},
                     {"method", to_string(c.method)},
                     {"t", c.t},
                     {"function", c.function},
                     {"min_coupled", c.min_coupled},
                     {"qv_low", c.qv_low},
                     {"qv_high", c.qv_high}};
  j["run"] = {{"seed", c.seed}};
  if (with_run) {
    j["run"]["output"] = c.output;
    j["run"]["threads"] = c.threads;
  }
  return j;
}

}  // namespace holab
