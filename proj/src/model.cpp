#include "holab/model.hpp"

namespace holab {

Model::Model(RootSystem system, MultiplicityFunction k, std::size_t max_group_size)
    : system_(std::move(system)), k_(std::move(k)), group_(generate_weyl_group(system_, max_group_size)) {
  for (std::size_t i = 0; i < system_.positive_count(); ++i) {
    k_pos_.push_back(k_.of_root(system_, i));
    norm_sq_.push_back(system_.roots()[i].squaredNorm());
  }
  rho_ = holab::rho(system_, k_);
}

}  // namespace holab
