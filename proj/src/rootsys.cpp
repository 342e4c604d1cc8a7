#include "holab/rootsys.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace holab {

namespace {

constexpr double kRootTol = 1e-9;

// Ambient coordinates for the classical families, before any basis change.
std::vector<std::vector<double>> classical_roots(Family family, int n) {
  std::vector<std::vector<double>> out;
  auto unit = [n](int i, double s) {
    std::vector<double> v(n, 0.0);
    v[i] = s;
    return v;
  };
  const bool pairs = family != Family::A;
  if (family == Family::A) {
    const int m = n + 1;
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        if (i == j) continue;
        std::vector<double> v(m, 0.0);
        v[i] = 1.0;
        v[j] = -1.0;
        out.push_back(v);
      }
    return out;
  }
  if (pairs) {
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        for (double si : {1.0, -1.0})
          for (double sj : {1.0, -1.0}) {
            std::vector<double> v(n, 0.0);
            v[i] = si;
            v[j] = sj;
            out.push_back(v);
          }
  }
  for (int i = 0; i < n; ++i)
    for (double s : {1.0, -1.0}) {
      if (family == Family::B || family == Family::BC) out.push_back(unit(i, s));
      if (family == Family::C || family == Family::BC) out.push_back(unit(i, 2.0 * s));
    }
  return out;
}

// Orthonormal (Helmert) basis of the sum-zero hyperplane of R^{n+1}.
std::vector<std::vector<double>> helmert_basis(int n) {
  std::vector<std::vector<double>> basis;
  for (int j = 1; j <= n; ++j) {
    std::vector<double> v(n + 1, 0.0);
    const double s = 1.0 / std::sqrt(static_cast<double>(j) * (j + 1));
    for (int i = 0; i < j; ++i) v[i] = s;
    v[j] = -j * s;
    basis.push_back(v);
  }
  return basis;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

std::string to_string(Family family) {
  switch (family) {
    case Family::A: return "A";
    case Family::B: return "B";
    case Family::C: return "C";
    case Family::D: return "D";
    case Family::BC: return "BC";
    case Family::Rank1: return "rank1";
  }
  return "?";
}

Family family_from_string(std::string_view name) {
  if (name == "A") return Family::A;
  if (name == "B") return Family::B;
  if (name == "C") return Family::C;
  if (name == "D") return Family::D;
  if (name == "BC") return Family::BC;
  if (name == "rank1") return Family::Rank1;
  throw std::invalid_argument("unknown root system family '" + std::string(name) + "'");
}

double default_normalization(Family family) { return family == Family::Rank1 ? 2.0 : 1.0; }

Vec reflect(const Vec& alpha, const Vec& x) {
  return x - (2.0 * alpha.dot(x) / alpha.squaredNorm()) * alpha;
}

RootSystem RootSystem::build(Family family, int rank, std::optional<double> normalization) {
  if (rank < 1) throw std::invalid_argument("root system rank must be >= 1");
  if (rank > kMaxRank) {
    throw std::invalid_argument("rank " + std::to_string(rank) + " exceeds the supported maximum " +
                                std::to_string(kMaxRank));
  }
  if (family == Family::Rank1 && rank != 1) throw std::invalid_argument("family rank1 requires rank = 1");
  if (family == Family::D && rank < 2) throw std::invalid_argument("family D requires rank >= 2");
  const double scale = normalization.value_or(default_normalization(family));
  if (!(scale > 0.0) || !std::isfinite(scale)) throw std::invalid_argument("normalization must be positive");

  RootSystem rs;
  rs.family_ = family;
  rs.rank_ = rank;
  rs.normalization_ = scale;

  if (family == Family::Rank1) {
    rs.roots_ = {make_vec({scale}), make_vec({-scale})};
    rs.finalize();
    return rs;
  }

  const auto ambient = classical_roots(family, rank);
  const int dim = family == Family::A ? rank + 1 : rank;
  std::vector<double> functional(dim);
  for (int i = 0; i < dim; ++i) functional[i] = static_cast<double>(dim - i);

  std::vector<std::vector<double>> positive;
  for (const auto& r : ambient)
    if (dot(r, functional) > 0.0) positive.push_back(r);

  const auto basis = family == Family::A ? helmert_basis(rank) : std::vector<std::vector<double>>{};
  auto embed = [&](const std::vector<double>& r) {
    Vec v(rank);
    for (int j = 0; j < rank; ++j) v(j) = family == Family::A ? dot(r, basis[j]) : r[j];
    return Vec(scale * v);
  };
  for (const auto& r : positive) rs.roots_.push_back(embed(r));
  for (const auto& r : positive) rs.roots_.push_back(-embed(r));
  rs.finalize();
  return rs;
}

void RootSystem::finalize() {
  const std::size_t m = positive_count();
  const std::size_t total = roots_.size();

  // Closure and integrality.
  for (std::size_t a = 0; a < total; ++a)
    for (std::size_t b = 0; b < total; ++b) {
      const double pairing = 2.0 * roots_[a].dot(roots_[b]) / roots_[a].squaredNorm();
      if (std::abs(pairing - std::round(pairing)) > 1e-9)
        throw std::logic_error("root system is not integral");
      if (index_of(reflect(roots_[a], roots_[b])) < 0)
        throw std::logic_error("root system is not closed under reflections");
    }

  // Simple roots: indivisible positive roots that are not a sum of two positive roots.
  simple_.clear();
  for (std::size_t i = 0; i < m; ++i) {
    if (index_of(Vec(0.5 * roots_[i])) >= 0) continue;
    bool decomposable = false;
    for (std::size_t a = 0; a < m && !decomposable; ++a)
      for (std::size_t b = a; b < m && !decomposable; ++b)
        if ((roots_[a] + roots_[b] - roots_[i]).norm() < kRootTol * roots_[i].norm()) decomposable = true;
    if (!decomposable) simple_.push_back(static_cast<int>(i));
  }
  if (static_cast<int>(simple_.size()) != rank_) throw std::logic_error("simple root count does not match rank");

  // Orbits by union-find over all reflections.
  std::vector<std::size_t> parent(total);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = 0; b < total; ++b) {
      const auto j = static_cast<std::size_t>(index_of(reflect(roots_[a], roots_[b])));
      parent[find(b)] = find(j);
    }
  orbit_.assign(total, -1);
  std::map<std::size_t, int> label;
  for (std::size_t i = 0; i < total; ++i) {
    const auto r = find(i);
    auto it = label.find(r);
    if (it == label.end()) it = label.emplace(r, static_cast<int>(label.size())).first;
    orbit_[i] = it->second;
  }
  orbit_count_ = static_cast<int>(label.size());
}

int RootSystem::index_of(const Vec& v) const {
  for (std::size_t i = 0; i < roots_.size(); ++i)
    if ((roots_[i] - v).norm() <= kRootTol * roots_[i].norm()) return static_cast<int>(i);
  return -1;
}

bool RootSystem::in_open_chamber(const Vec& x) const {
  for (const auto& a : positive_roots())
    if (!(a.dot(x) > 0.0)) return false;
  return true;
}

bool RootSystem::is_regular(const Vec& x) const {
  for (const auto& a : positive_roots())
    if (a.dot(x) == 0.0) return false;
  return true;
}

double RootSystem::wall_distance(const Vec& x) const {
  double d = std::numeric_limits<double>::infinity();
  for (const auto& a : positive_roots()) d = std::min(d, std::abs(a.dot(x)) / a.norm());
  return d;
}

MultiplicityFunction::MultiplicityFunction(const RootSystem& system, std::vector<double> orbit_values)
    : values_(std::move(orbit_values)) {
  if (static_cast<int>(values_.size()) != system.orbit_count()) {
    throw std::invalid_argument("multiplicity needs " + std::to_string(system.orbit_count()) +
                                " orbit values, got " + std::to_string(values_.size()));
  }
  for (double k : values_)
    if (!(k >= 0.5) || !std::isfinite(k))
      throw std::invalid_argument("multiplicity values must satisfy k >= 1/2 (got " + std::to_string(k) + ")");
}

MultiplicityFunction MultiplicityFunction::uniform(const RootSystem& system, double k) {
  return MultiplicityFunction(system, std::vector<double>(system.orbit_count(), k));
}

int WeylGroup::multiply(int a, int b) const {
  const auto& pa = elements_[a].root_permutation;
  const auto& pb = elements_[b].root_permutation;
  std::vector<int> p(pa.size());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = pa[pb[i]];
  return find(p);
}

int WeylGroup::inverse(int a) const {
  const auto& pa = elements_[a].root_permutation;
  std::vector<int> p(pa.size());
  for (std::size_t i = 0; i < p.size(); ++i) p[pa[i]] = static_cast<int>(i);
  return find(p);
}

int WeylGroup::find(const std::vector<int>& root_permutation) const {
  const auto it = by_permutation_.find(root_permutation);
  return it == by_permutation_.end() ? -1 : it->second;
}

WeylGroup generate_weyl_group(const RootSystem& system, std::size_t max_size) {
  const auto& roots = system.roots();
  const int n = system.rank();
  const std::size_t total = roots.size();

  auto reflection_of = [&](const Vec& alpha) {
    WeylElement e;
    e.matrix = Mat::Identity(n, n) - (2.0 / alpha.squaredNorm()) * alpha * alpha.transpose();
    e.root_permutation.resize(total);
    for (std::size_t i = 0; i < total; ++i) e.root_permutation[i] = system.index_of(reflect(alpha, roots[i]));
    return e;
  };

  std::vector<WeylElement> gens;
  for (int s : system.simple_roots()) gens.push_back(reflection_of(roots[s]));

  WeylGroup g;
  WeylElement id;
  id.matrix = Mat::Identity(n, n);
  id.root_permutation.resize(total);
  std::iota(id.root_permutation.begin(), id.root_permutation.end(), 0);
  g.by_permutation_.emplace(id.root_permutation, 0);
  g.elements_.push_back(std::move(id));

  // Appending generators at the end of words while scanning in BFS order
  // yields, for each element, its shortest then lexicographically least word.
  for (std::size_t cur = 0; cur < g.elements_.size(); ++cur) {
    for (std::size_t s = 0; s < gens.size(); ++s) {
      const WeylElement& w = g.elements_[cur];
      std::vector<int> p(total);
      for (std::size_t i = 0; i < total; ++i) p[i] = w.root_permutation[gens[s].root_permutation[i]];
      if (g.by_permutation_.count(p)) continue;
      if (g.elements_.size() >= max_size)
        throw std::length_error("Weyl group exceeds the configured cap of " + std::to_string(max_size));
      WeylElement e;
      e.word = w.word;
      e.word.push_back(static_cast<int>(s));
      e.matrix = w.matrix * gens[s].matrix;
      e.root_permutation = std::move(p);
      g.by_permutation_.emplace(e.root_permutation, static_cast<int>(g.elements_.size()));
      g.elements_.push_back(std::move(e));
    }
  }

  g.reflection_.resize(total);
  for (std::size_t i = 0; i < total; ++i) g.reflection_[i] = g.find(reflection_of(roots[i]).root_permutation);
  return g;
}

ChamberDecomposition radial_decompose(const RootSystem& system, const WeylGroup& group, const Vec& x) {
  const bool regular = system.is_regular(x);
  if (regular) {
    // Fold into the chamber by simple reflections; x = w y throughout.
    Vec y = x;
    int w = WeylGroup::identity();
    const auto& simple = system.simple_roots();
    for (bool moved = true; moved;) {
      moved = false;
      for (int s : simple) {
        const Vec& a = system.roots()[s];
        if (a.dot(y) < 0.0) {
          y = reflect(a, y);
          w = group.multiply(w, group.reflection(s));
          moved = true;
          break;
        }
      }
    }
    return {y, w, system.in_open_chamber(y)};
  }

  const double tol = 1e-12 * (1.0 + x.norm());
  for (std::size_t i = 0; i < group.size(); ++i) {
    const Vec y = group[i].matrix.transpose() * x;
    bool closed = true;
    for (const auto& a : system.positive_roots())
      if (a.dot(y) < -tol * a.norm()) {
        closed = false;
        break;
      }
    if (closed) return {y, static_cast<int>(i), false};
  }
  throw std::logic_error("radial_decompose: no chamber representative found");
}

Vec rho(const RootSystem& system, const MultiplicityFunction& k) {
  Vec r = Vec::Zero(system.rank());
  for (std::size_t i = 0; i < system.positive_count(); ++i) r += 0.5 * k.of_root(system, i) * system.roots()[i];
  return r;
}

nlohmann::json to_json(const RootSystem& system, const MultiplicityFunction& k) {
  nlohmann::json roots = nlohmann::json::array();
  for (const auto& r : system.roots()) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index i = 0; i < r.size(); ++i) row.push_back(r(i));
    roots.push_back(row);
  }
  return {{"family", to_string(system.family())},
          {"rank", system.rank()},
          {"normalization", system.normalization()},
          {"roots", roots},
          {"k", k.orbit_values()}};
}

std::pair<RootSystem, MultiplicityFunction> root_system_from_json(const nlohmann::json& doc) {
  const Family family = family_from_string(doc.at("family").get<std::string>());
  const int rank = doc.at("rank").get<int>();
  std::optional<double> norm;
  if (doc.contains("normalization")) norm = doc.at("normalization").get<double>();
  RootSystem rs = RootSystem::build(family, rank, norm);

  if (doc.contains("roots")) {
    const auto& roots = doc.at("roots");
    if (roots.size() != rs.roots().size()) throw std::invalid_argument("root list does not match the family");
    for (std::size_t i = 0; i < roots.size(); ++i) {
      const auto row = roots[i].get<std::vector<double>>();
      if (static_cast<int>(row.size()) != rank) throw std::invalid_argument("root has wrong dimension");
      for (int j = 0; j < rank; ++j)
        if (std::abs(row[j] - rs.roots()[i](j)) > 1e-12 * (1.0 + std::abs(row[j])))
          throw std::invalid_argument("root " + std::to_string(i) + " does not match the family realization");
    }
  }

  std::vector<double> kv;
  const auto& kj = doc.at("k");
  if (kj.is_number()) {
    kv.assign(rs.orbit_count(), kj.get<double>());
  } else {
    kv = kj.get<std::vector<double>>();
  }
  MultiplicityFunction k(rs, std::move(kv));
  return {std::move(rs), std::move(k)};
}

}  // namespace holab
