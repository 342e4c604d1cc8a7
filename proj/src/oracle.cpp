#include "holab/oracle.hpp"

#include <boost/math/special_functions/bernoulli.hpp>
#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace holab {

namespace odeint = boost::numeric::odeint;

Rank1Params Rank1Params::make(double alpha, double k) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw std::invalid_argument("rank1: alpha must be positive");
  if (!(k >= 0.5) || !std::isfinite(k)) throw std::invalid_argument("rank1: multiplicity must satisfy k >= 1/2");
  return {alpha, k};
}

namespace {

using State = std::array<double, 2>;

// x coth(alpha x / 2) = sum_m q[m] x^{2m}.
std::vector<double> coth_series(double alpha, int terms) {
  std::vector<double> q(terms);
  double pow_alpha = 1.0;
  double factorial = 1.0;
  for (int m = 0; m < terms; ++m) {
    if (m > 0) {
      pow_alpha *= alpha * alpha;
      factorial *= (2.0 * m - 1.0) * (2.0 * m);
    }
    q[m] = (2.0 / alpha) * boost::math::bernoulli_b2n<double>(m) * pow_alpha / factorial;
  }
  return q;
}

double horner(const std::vector<double>& c, double x) {
  double s = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) s = s * x + *it;
  return s;
}

double horner_prime(const std::vector<double>& c, double x) {
  double s = 0.0;
  for (std::size_t n = c.size() - 1; n >= 1; --n) s = s * x + static_cast<double>(n) * c[n];
  return s;
}

void check_tail(const std::vector<double>& c, double x0, double scale, double tol, const char* what) {
  const std::size_t n = c.size() - 1;
  const double tail = std::abs(c[n] * std::pow(x0, static_cast<double>(n))) +
                      std::abs(c[n - 1] * std::pow(x0, static_cast<double>(n - 1)));
  if (!(tail <= 1e-2 * tol * std::max(1.0, scale))) {
    std::ostringstream msg;
    msg << what << " series did not converge at x0=" << x0 << ": tail " << tail << " with "
        << c.size() << " coefficients (tolerance " << tol << ")";
    throw std::runtime_error(msg.str());
  }
}

struct FSeries {
  std::vector<double> f;  // F = sum f[n] x^n, even n only
};

FSeries f_series(const Rank1Params& p, double mu, int terms) {
  const double rho = p.rho();
  const auto q = coth_series(p.alpha, terms + 1);
  const int n_max = 2 * terms;
  std::vector<double> f(n_max + 1, 0.0);
  f[0] = 1.0;
  for (int n = 2; n <= n_max; n += 2) {
    double rhs = mu * f[n - 2];
    for (int m = 1; n - 2 * m >= 0; ++m) rhs -= 2.0 * rho * q[m] * (n - 2 * m) * f[n - 2 * m];
    f[n] = rhs / (n * (n - 1.0 + 2.0 * p.k));
  }
  return {std::move(f)};
}

struct GSeries {
  std::vector<double> e;
  std::vector<double> o;
};

GSeries g_series(const Rank1Params& p, double lambda, int terms) {
  const double rho = p.rho();
  const auto q = coth_series(p.alpha, terms + 1);
  const int n_max = 2 * terms;
  std::vector<double> e(n_max + 1, 0.0), o(n_max + 1, 0.0);
  e[0] = 1.0;
  for (int n = 1; n <= n_max; ++n) {
    if (n % 2 == 1) {
      double rhs = (lambda + rho) * e[n - 1];
      for (int m = 1; n - 2 * m >= 1; ++m) rhs -= 2.0 * rho * q[m] * o[n - 2 * m];
      o[n] = rhs / (n + 2.0 * p.k);
    } else {
      e[n] = (lambda - rho) * o[n - 1] / n;
    }
  }
  return {std::move(e), std::move(o)};
}

double coth_half(const Rank1Params& p, double x) { return 1.0 / std::tanh(0.5 * p.alpha * x); }

// Integrates `system` from x0 through the sorted abscissae `targets` (all > x0)
// and hands each state to `sink`.
template <class System, class Sink>
void integrate_to(System system, State state, double x0, const std::vector<double>& targets,
                  const OracleOptions& opt, Sink sink) {
  if (targets.empty()) return;
  std::vector<double> times;
  times.reserve(targets.size() + 1);
  times.push_back(x0);
  times.insert(times.end(), targets.begin(), targets.end());
  auto stepper = odeint::make_dense_output(opt.abs_tol, opt.rel_tol, odeint::runge_kutta_dopri5<State>());
  std::size_t seen = 0;
  odeint::integrate_times(stepper, system, state, times.begin(), times.end(), 1e-3,
                          [&](const State& s, double t) {
                            if (seen++ == 0) return;  // initial point
                            sink(s, t);
                          });
}

std::vector<double> sorted_unique_abs(std::span<const double> xs) {
  std::vector<double> a;
  a.reserve(xs.size());
  for (double x : xs) a.push_back(std::abs(x));
  std::sort(a.begin(), a.end());
  a.erase(std::unique(a.begin(), a.end()), a.end());
  return a;
}

}  // namespace

std::vector<double> rank1_F_eigen(const Rank1Params& p, double mu, std::span<const double> xs,
                                  const OracleOptions& opt) {
  const double rho = p.rho();
  const double x0 = opt.series_radius;
  const FSeries s = f_series(p, mu, opt.series_terms);
  check_tail(s.f, x0, 1.0, opt.rel_tol, "F");

  const auto abs_sorted = sorted_unique_abs(xs);
  std::vector<double> values(abs_sorted.size());
  std::vector<double> beyond;
  for (std::size_t i = 0; i < abs_sorted.size(); ++i) {
    if (abs_sorted[i] <= x0) {
      values[i] = horner(s.f, abs_sorted[i]);
    } else {
      beyond.push_back(abs_sorted[i]);
    }
  }
  const std::size_t offset = abs_sorted.size() - beyond.size();
  auto system = [&](const State& y, State& dy, double x) {
    dy[0] = y[1];
    dy[1] = mu * y[0] - 2.0 * rho * coth_half(p, x) * y[1];
  };
  std::size_t idx = offset;
  integrate_to(system, State{horner(s.f, x0), horner_prime(s.f, x0)}, x0, beyond, opt,
               [&](const State& y, double) { values[idx++] = y[0]; });

  std::vector<double> out(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const auto it = std::lower_bound(abs_sorted.begin(), abs_sorted.end(), std::abs(xs[i]));
    out[i] = values[static_cast<std::size_t>(it - abs_sorted.begin())];
  }
  return out;
}

double rank1_F_eigen(const Rank1Params& p, double mu, double x, const OracleOptions& opt) {
  const double xs[1] = {x};
  return rank1_F_eigen(p, mu, std::span<const double>(xs), opt)[0];
}

double rank1_F(const Rank1Params& p, double lambda, double x, const OracleOptions& opt) {
  return rank1_F_eigen(p, lambda * lambda - p.rho() * p.rho(), x, opt);
}

std::vector<GParts> rank1_G_parts(const Rank1Params& p, double lambda, std::span<const double> xs,
                                  const OracleOptions& opt) {
  const double rho = p.rho();
  const double x0 = opt.series_radius;
  const GSeries s = g_series(p, lambda, opt.series_terms);
  check_tail(s.e, x0, 1.0, opt.rel_tol, "G (even part)");
  check_tail(s.o, x0, 1.0, opt.rel_tol, "G (odd part)");

  const auto abs_sorted = sorted_unique_abs(xs);
  std::vector<GParts> parts(abs_sorted.size());
  std::vector<double> beyond;
  for (std::size_t i = 0; i < abs_sorted.size(); ++i) {
    const double a = abs_sorted[i];
    if (a <= x0) {
      parts[i] = {horner(s.e, a), horner(s.o, a), horner_prime(s.e, a), horner_prime(s.o, a)};
    } else {
      beyond.push_back(a);
    }
  }
  auto system = [&](const State& y, State& dy, double x) {
    dy[0] = (lambda - rho) * y[1];
    dy[1] = (lambda + rho) * y[0] - 2.0 * rho * coth_half(p, x) * y[1];
  };
  std::size_t idx = abs_sorted.size() - beyond.size();
  integrate_to(system, State{horner(s.e, x0), horner(s.o, x0)}, x0, beyond, opt,
               [&](const State& y, double x) {
                 State dy;
                 system(y, dy, x);
                 parts[idx++] = {y[0], y[1], dy[0], dy[1]};
               });

  std::vector<GParts> out(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const auto it = std::lower_bound(abs_sorted.begin(), abs_sorted.end(), std::abs(xs[i]));
    GParts g = parts[static_cast<std::size_t>(it - abs_sorted.begin())];
    if (xs[i] < 0.0) {
      // E even, O odd: E'(x) odd, O'(x) even.
      g.odd = -g.odd;
      g.even_prime = -g.even_prime;
    }
    out[i] = g;
  }
  return out;
}

GParts rank1_G_parts(const Rank1Params& p, double lambda, double x, const OracleOptions& opt) {
  const double xs[1] = {x};
  return rank1_G_parts(p, lambda, std::span<const double>(xs), opt)[0];
}

double rank1_G(const Rank1Params& p, double lambda, double x, const OracleOptions& opt) {
  return rank1_G_parts(p, lambda, x, opt).value();
}

Rank1Table::Rank1Table(const Rank1Params& p, double lambda, double x_max, double spacing,
                       const OracleOptions& opt)
    : x_max_(x_max), spacing_(spacing) {
  if (!(x_max > 0.0) || !(spacing > 0.0)) throw std::invalid_argument("Rank1Table: bad grid");
  const auto n = static_cast<std::size_t>(std::ceil(x_max / spacing));
  x_max_ = static_cast<double>(n) * spacing;
  std::vector<double> grid(n + 1);
  for (std::size_t i = 0; i <= n; ++i) grid[i] = static_cast<double>(i) * spacing;
  nodes_ = rank1_G_parts(p, lambda, grid, opt);
}

double Rank1Table::operator()(double x) const {
  const double a = std::min(std::abs(x), x_max_);
  const double u = a / spacing_;
  auto i = static_cast<std::size_t>(u);
  if (i >= nodes_.size() - 1) i = nodes_.size() - 2;
  const double t = u - static_cast<double>(i);
  const double h00 = (1 + 2 * t) * (1 - t) * (1 - t);
  const double h10 = t * (1 - t) * (1 - t);
  const double h01 = t * t * (3 - 2 * t);
  const double h11 = t * t * (t - 1);
  const GParts& l = nodes_[i];
  const GParts& r = nodes_[i + 1];
  const double even = h00 * l.even + h10 * spacing_ * l.even_prime + h01 * r.even + h11 * spacing_ * r.even_prime;
  const double odd = h00 * l.odd + h10 * spacing_ * l.odd_prime + h01 * r.odd + h11 * spacing_ * r.odd_prime;
  return x < 0.0 ? even - odd : even + odd;
}

}  // namespace holab
