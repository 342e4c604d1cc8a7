#pragma once

#include <span>
#include <vector>

namespace holab {

/// Rank-one data: root length alpha, multiplicity k, rho = k alpha / 2.
struct Rank1Params {
  double alpha = 2.0;
  double k = 1.0;

  static Rank1Params make(double alpha, double k);
  double rho() const { return 0.5 * k * alpha; }
};

struct OracleOptions {
  double series_radius = 0.1;  // power series used on |x| <= series_radius
  int series_terms = 30;       // nonzero coefficients kept
  double rel_tol = 1e-10;      // ODE integration beyond the series radius
  double abs_tol = 1e-13;
};

/// Even and odd parts of G_lambda, and their x-derivatives.
struct GParts {
  double even;
  double odd;
  double even_prime;
  double odd_prime;

  double value() const { return even + odd; }
};

// F_lambda: the even solution of F'' + 2 rho coth(alpha x / 2) F' = (lambda^2 - rho^2) F
// with F(0) = 1. Evaluated by a power series near the regular singular point
// at 0 and adaptive Dormand-Prince integration beyond it.
double rank1_F(const Rank1Params& p, double lambda, double x, const OracleOptions& opt = {});
/// F for a given eigenvalue mu = lambda^2 - rho^2 (covers imaginary lambda).
double rank1_F_eigen(const Rank1Params& p, double mu, double x, const OracleOptions& opt = {});
/// Batch evaluation; one integration pass for all points.
std::vector<double> rank1_F_eigen(const Rank1Params& p, double mu, std::span<const double> xs,
                                  const OracleOptions& opt = {});

// G_lambda = E + O, the non-symmetric eigenfunction T G = lambda G with
// G(0) = 1, from the first-order system
//   E' = (lambda - rho) O,   O' = (lambda + rho) E - 2 rho coth(alpha x / 2) O.
double rank1_G(const Rank1Params& p, double lambda, double x, const OracleOptions& opt = {});
/// Parts at x (signed: the parity is applied, so even(x) = E(|x|), odd(x) = sign(x) O(|x|)).
GParts rank1_G_parts(const Rank1Params& p, double lambda, double x, const OracleOptions& opt = {});
std::vector<GParts> rank1_G_parts(const Rank1Params& p, double lambda, std::span<const double> xs,
                                  const OracleOptions& opt = {});

/// G_lambda tabulated on [0, x_max] with cubic Hermite interpolation of the
/// even and odd parts, for fast repeated evaluation inside Monte Carlo loops.
/// Beyond x_max the end values are held constant, which is accurate for the
/// bounded case lambda = +-rho.
class Rank1Table {
 public:
  Rank1Table(const Rank1Params& p, double lambda, double x_max = 40.0, double spacing = 5e-3,
             const OracleOptions& opt = {});

  double operator()(double x) const;
  double x_max() const { return x_max_; }

 private:
  double x_max_;
  double spacing_;
  std::vector<GParts> nodes_;
};

}  // namespace holab
