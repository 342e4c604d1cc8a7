#include "holab/ho_operators.hpp"

#include <cmath>
#include <string>

namespace holab {

namespace {

void require_regular(const Model& model, const Vec& x) {
  if (x.size() != model.rank()) throw std::invalid_argument("point has wrong dimension");
  for (std::size_t i = 0; i < model.positive_count(); ++i)
    if (model.root(i).dot(x) == 0.0)
      throw SingularInput("point lies on the wall of positive root " + std::to_string(i));
}

double c_alpha(double k, double norm_sq, double pairing) {
  const double s = std::sinh(0.5 * pairing);
  return k * norm_sq / (4.0 * s * s);
}

}  // namespace

Vec drift(const Model& model, const Vec& x) {
  require_regular(model, x);
  Vec b = Vec::Zero(model.rank());
  for (std::size_t i = 0; i < model.positive_count(); ++i) {
    const double t = 0.5 * model.root(i).dot(x);
    b += 0.5 * model.k(i) / std::tanh(t) * model.root(i);
  }
  return b;
}

double jump_coefficient(const Model& model, std::size_t root, const Vec& x) {
  const double pairing = model.root(root).dot(x);
  if (pairing == 0.0) throw SingularInput("jump coefficient evaluated on its wall");
  return c_alpha(model.k(root), model.root_norm_sq(root), pairing);
}

double jump_rate(const Model& model, std::size_t root, const Vec& x) {
  return 0.5 * jump_coefficient(model, root, x);
}

double coefficients_unchecked(const Model& model, const Vec& x, Vec& drift_out, std::span<double> rates_out) {
  drift_out.setZero(model.rank());
  double total = 0.0;
  for (std::size_t i = 0; i < model.positive_count(); ++i) {
    const double p = model.root(i).dot(x);
    const double e = std::exp(-std::abs(p));
    const double one_minus = -std::expm1(-std::abs(p));
    // coth(p/2) = sign(p) (1+e)/(1-e);  1/(4 sinh^2(p/2)) = e/(1-e)^2
    const double coth_half = std::copysign((1.0 + e) / one_minus, p);
    drift_out += (0.5 * model.k(i) * coth_half) * model.root(i);
    const double rate = 0.5 * model.k(i) * model.root_norm_sq(i) * e / (one_minus * one_minus);
    rates_out[i] = rate;
    total += rate;
  }
  return total;
}

double apply_radial_laplacian_fd(const Model& model, const ScalarField& f, const Vec& x, double h) {
  require_regular(model, x);
  const double fx = f(x);
  double lap = 0.0;
  for (int j = 0; j < model.rank(); ++j) {
    Vec e = Vec::Zero(model.rank());
    e(j) = h;
    lap += (f(x + e) - 2.0 * fx + f(x - e)) / (h * h);
  }
  double first = 0.0;
  for (std::size_t i = 0; i < model.positive_count(); ++i) {
    const Vec& a = model.root(i);
    const double da = (f(x + h * a) - f(x - h * a)) / (2.0 * h);
    first += model.k(i) / std::tanh(0.5 * a.dot(x)) * da;
  }
  return lap + first;
}

double apply_laplacian_fd(const Model& model, const ScalarField& f, const Vec& x, double h) {
  double value = apply_radial_laplacian_fd(model, f, x, h);
  const double fx = f(x);
  for (std::size_t i = 0; i < model.positive_count(); ++i) {
    const Vec& a = model.root(i);
    value -= c_alpha(model.k(i), model.root_norm_sq(i), a.dot(x)) * (fx - f(reflect(a, x)));
  }
  return value;
}

double apply_cherednik_fd(const Model& model, const Vec& xi, const ScalarField& f, const Vec& x, double h) {
  require_regular(model, x);
  const double fx = f(x);
  double value = (f(x + h * xi) - f(x - h * xi)) / (2.0 * h);
  for (std::size_t i = 0; i < model.positive_count(); ++i) {
    const Vec& a = model.root(i);
    const double p = a.dot(x);
    value += model.k(i) * a.dot(xi) / (-std::expm1(-p)) * (fx - f(reflect(a, x)));
  }
  return value - model.rho().dot(xi) * fx;
}

double cherednik_square_sum_fd(const Model& model, const ScalarField& f, const Vec& x, double h) {
  require_regular(model, x);
  double total = 0.0;
  for (int j = 0; j < model.rank(); ++j) {
    Vec xi = Vec::Zero(model.rank());
    xi(j) = 1.0;
    ScalarField tf{[&model, &f, xi, h](const Vec& y) { return apply_cherednik_fd(model, xi, f, y, h); },
                   f.smoothness_hint - 1};
    total += apply_cherednik_fd(model, xi, tf, x, h);
  }
  return total - model.rho().squaredNorm() * f(x);
}

}  // namespace holab
