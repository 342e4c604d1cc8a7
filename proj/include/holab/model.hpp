#pragma once

#include "holab/rootsys.hpp"

#include <memory>
#include <vector>

namespace holab {

/// A root system with its multiplicity and Weyl group, plus the per-root
/// constants every coefficient evaluation needs. Immutable; share freely.
class Model {
 public:
  Model(RootSystem system, MultiplicityFunction k, std::size_t max_group_size = 100000);

  const RootSystem& system() const { return system_; }
  const MultiplicityFunction& multiplicity() const { return k_; }
  const WeylGroup& group() const { return group_; }

  int rank() const { return system_.rank(); }
  std::size_t positive_count() const { return system_.positive_count(); }
  const Vec& root(std::size_t i) const { return system_.roots()[i]; }
  double k(std::size_t i) const { return k_pos_[i]; }
  double root_norm_sq(std::size_t i) const { return norm_sq_[i]; }
  const Vec& rho() const { return rho_; }

 private:
  RootSystem system_;
  MultiplicityFunction k_;
  WeylGroup group_;
  std::vector<double> k_pos_;
  std::vector<double> norm_sq_;
  Vec rho_;
};

}  // namespace holab
