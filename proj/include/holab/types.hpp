#pragma once

#include <Eigen/Dense>

#include <functional>
#include <stdexcept>
#include <string>

namespace holab {

// Largest rank supported. Vectors and matrices live on the stack up to this size.
inline constexpr int kMaxRank = 8;

using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxRank, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, kMaxRank, kMaxRank>;

/// Real-valued function on the ambient space. Must be deterministic.
struct ScalarField {
  std::function<double(const Vec&)> evaluation;
  int smoothness_hint = 2;

  double operator()(const Vec& x) const { return evaluation(x); }
};

/// Raised when an operator is evaluated on a wall <alpha, x> = 0.
class SingularInput : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Raised when the stepper cannot find an in-chamber step.
class WallContact : public std::runtime_error {
 public:
  WallContact(const std::string& what, double time, double wall_distance)
      : std::runtime_error(what), time_(time), wall_distance_(wall_distance) {}

  double time() const { return time_; }
  double wall_distance() const { return wall_distance_; }

 private:
  double time_;
  double wall_distance_;
};

inline Vec make_vec(std::initializer_list<double> values) {
  Vec v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v(i++) = x;
  return v;
}

}  // namespace holab
