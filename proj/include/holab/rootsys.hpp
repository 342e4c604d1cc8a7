#pragma once

#include "holab/types.hpp"

#include <nlohmann/json.hpp>

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace holab {

enum class Family { A, B, C, D, BC, Rank1 };

std::string to_string(Family family);
Family family_from_string(std::string_view name);

/// Default root scale for a family: the root length 2 for rank1, 1 (Bourbaki
/// coordinates) for everything else.
double default_normalization(Family family);

/// r_alpha(x) = x - <alpha^vee, x> alpha.
Vec reflect(const Vec& alpha, const Vec& x);

/// Finite integral root system realized in R^rank.
///
/// Roots are stored positive-first: roots()[i] for i < positive_count() are
/// the positive roots and roots()[i + positive_count()] = -roots()[i].
/// A_n lives in the sum-zero hyperplane of R^{n+1}, written in an orthonormal
/// (Helmert) basis of that hyperplane, so the inner product is the standard one.
class RootSystem {
 public:
  static RootSystem build(Family family, int rank, std::optional<double> normalization = std::nullopt);

  Family family() const { return family_; }
  int rank() const { return rank_; }
  double normalization() const { return normalization_; }

  const std::vector<Vec>& roots() const { return roots_; }
  std::span<const Vec> positive_roots() const { return {roots_.data(), positive_count()}; }
  std::size_t positive_count() const { return roots_.size() / 2; }

  /// Indices (into positive_roots) of the simple roots.
  const std::vector<int>& simple_roots() const { return simple_; }

  /// W-orbit id of a root index. Orbits are numbered by first appearance
  /// among the positive roots.
  int orbit_of(std::size_t root_index) const { return orbit_[root_index]; }
  int orbit_count() const { return orbit_count_; }

  /// Index of the root equal to v (to 1e-9 relative), or -1.
  int index_of(const Vec& v) const;

  /// Open positive chamber: <alpha, x> > 0 for every positive alpha.
  bool in_open_chamber(const Vec& x) const;
  /// Regular: no <alpha, x> vanishes.
  bool is_regular(const Vec& x) const;
  /// min over positive roots of |<alpha, x>| / |alpha|.
  double wall_distance(const Vec& x) const;

 private:
  RootSystem() = default;
  void finalize();

  Family family_ = Family::Rank1;
  int rank_ = 1;
  double normalization_ = 2.0;
  std::vector<Vec> roots_;
  std::vector<int> simple_;
  std::vector<int> orbit_;
  int orbit_count_ = 0;
};

/// W-invariant multiplicity, one value per root orbit, each >= 1/2.
class MultiplicityFunction {
 public:
  MultiplicityFunction(const RootSystem& system, std::vector<double> orbit_values);
  static MultiplicityFunction uniform(const RootSystem& system, double k);

  const std::vector<double>& orbit_values() const { return values_; }
  /// k_alpha for root index i (positive or negative).
  double of_root(const RootSystem& system, std::size_t i) const { return values_[system.orbit_of(i)]; }

 private:
  std::vector<double> values_;
};

struct WeylElement {
  std::vector<int> word;              // simple-reflection indices, applied right to left
  Mat matrix;                         // orthogonal
  std::vector<int> root_permutation;  // w(roots[i]) = roots[root_permutation[i]]
};

/// The Weyl group as an explicit list, in breadth-first order from the
/// identity (shortest word first, then lexicographic on words).
class WeylGroup {
 public:
  const std::vector<WeylElement>& elements() const { return elements_; }
  std::size_t size() const { return elements_.size(); }
  const WeylElement& operator[](std::size_t i) const { return elements_[i]; }

  static constexpr int identity() { return 0; }
  int multiply(int a, int b) const;  // a * b (apply b first)
  int inverse(int a) const;
  /// Element index of the reflection r_alpha for root index i.
  int reflection(std::size_t root_index) const { return reflection_[root_index]; }
  /// Element index with the given root permutation, or -1.
  int find(const std::vector<int>& root_permutation) const;

 private:
  friend WeylGroup generate_weyl_group(const RootSystem&, std::size_t);
  std::vector<WeylElement> elements_;
  std::map<std::vector<int>, int> by_permutation_;
  std::vector<int> reflection_;
};

/// Enumerates W by closure under the simple reflections. Throws
/// std::length_error if the group exceeds max_size.
WeylGroup generate_weyl_group(const RootSystem& system, std::size_t max_size = 100000);

struct ChamberDecomposition {
  Vec radial;   // in the closed positive chamber
  int angular;  // index into the WeylGroup; angular * radial = x
  bool is_regular;
};

/// x = w x^W. For wall points the first w in group order is returned.
ChamberDecomposition radial_decompose(const RootSystem& system, const WeylGroup& group, const Vec& x);

/// rho = 1/2 sum_{alpha > 0} k_alpha alpha.
Vec rho(const RootSystem& system, const MultiplicityFunction& k);

nlohmann::json to_json(const RootSystem& system, const MultiplicityFunction& k);
/// Rebuilds from {family, rank, normalization, k}; if "roots" is present it
/// must match the rebuilt roots.
std::pair<RootSystem, MultiplicityFunction> root_system_from_json(const nlohmann::json& doc);

}  // namespace holab
