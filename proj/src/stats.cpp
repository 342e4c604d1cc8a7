#include "holab/stats.hpp"

#include <boost/math/distributions/chi_squared.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace holab {

double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 8) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

SampleMoments moments(std::span<const double> v) {
  SampleMoments m;
  m.n = v.size();
  if (m.n == 0) return m;
  m.mean = pairwise_sum(v) / static_cast<double>(m.n);
  if (m.n > 1) {
    std::vector<double> sq(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) sq[i] = (v[i] - m.mean) * (v[i] - m.mean);
    m.variance = pairwise_sum(sq) / static_cast<double>(m.n - 1);
    m.stderr_mean = std::sqrt(m.variance / static_cast<double>(m.n));
  }
  return m;
}

double kolmogorov_survival(double lambda) {
  if (lambda < 0.2) return 1.0;
  double sum = 0.0;
  double sign = 1.0;
  for (int j = 1; j <= 200; ++j) {
    const double term = std::exp(-2.0 * j * j * lambda * lambda);
    sum += sign * term;
    if (term < 1e-16 * sum) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

double ks_statistic(std::span<const double> a, std::span<const double> b) {
  std::vector<double> x(a.begin(), a.end());
  std::vector<double> y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double na = static_cast<double>(x.size());
  const double nb = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] <= v) ++i;
    while (j < y.size() && y[j] <= v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

TestResult ks_two_sample(std::string name, std::span<const double> a, std::span<const double> b, double threshold) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
  TestResult r;
  r.name = std::move(name);
  r.threshold = threshold;
  r.statistic = ks_statistic(a, b);
  const double ne = static_cast<double>(a.size()) * static_cast<double>(b.size()) /
                    static_cast<double>(a.size() + b.size());
  const double s = std::sqrt(ne);
  r.p_value = kolmogorov_survival((s + 0.12 + 0.11 / s) * r.statistic);
  r.pass = r.p_value >= threshold;
  return r;
}

TestResult chi_square_homogeneity(std::string name, std::span<const double> counts_a,
                                  std::span<const double> counts_b, double threshold) {
  if (counts_a.size() != counts_b.size()) throw std::invalid_argument("chi_square: category mismatch");
  TestResult r;
  r.name = std::move(name);
  r.threshold = threshold;
  const double na = pairwise_sum(counts_a);
  const double nb = pairwise_sum(counts_b);
  const double total = na + nb;
  if (na <= 0.0 || nb <= 0.0) throw std::invalid_argument("chi_square: empty sample");

  // Pool adjacent categories so each pooled expected count is >= 5.
  std::vector<std::pair<double, double>> bins;
  double pa = 0.0, pb = 0.0;
  for (std::size_t i = 0; i < counts_a.size(); ++i) {
    pa += counts_a[i];
    pb += counts_b[i];
    const double col = pa + pb;
    if (std::min(na, nb) * col / total >= 5.0) {
      bins.emplace_back(pa, pb);
      pa = pb = 0.0;
    }
  }
  if (pa + pb > 0.0) {
    if (bins.empty()) {
      bins.emplace_back(pa, pb);
    } else {
      bins.back().first += pa;
      bins.back().second += pb;
    }
  }
  if (bins.size() < 2) {
    r.statistic = 0.0;
    r.p_value = 1.0;
    r.pass = true;
    return r;
  }
  double chi2 = 0.0;
  for (const auto& [a, b] : bins) {
    const double col = a + b;
    const double ea = na * col / total;
    const double eb = nb * col / total;
    chi2 += (a - ea) * (a - ea) / ea + (b - eb) * (b - eb) / eb;
  }
  r.statistic = chi2;
  boost::math::chi_squared dist(static_cast<double>(bins.size() - 1));
  r.p_value = boost::math::cdf(boost::math::complement(dist, chi2));
  r.pass = r.p_value >= threshold;
  return r;
}

double normal_two_sided_p(double z) { return std::erfc(std::abs(z) / std::sqrt(2.0)); }

}  // namespace holab
