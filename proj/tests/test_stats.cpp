#include "holab/stats.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

using namespace holab;

namespace {

// Q(lambda) = 2 sum_{j>=1} (-1)^(j-1) exp(-2 j^2 lambda^2), summed far past convergence.
double kolmogorov_reference(double lambda) {
  long double s = 0;
  for (int j = 1; j <= 200; ++j)
    s += (j % 2 ? 1.0L : -1.0L) * std::exp(-2.0L * j * j * static_cast<long double>(lambda) * lambda);
  return static_cast<double>(2 * s);
}

}  // namespace

TEST(PairwiseSum, MatchesExtendedPrecision) {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  for (std::size_t n : {0u, 1u, 2u, 7u, 1000u, 100003u}) {
    std::vector<double> v(n);
    for (auto& x : v) x = u(gen);
    long double ref = 0;
    for (double x : v) ref += x;
    EXPECT_NEAR(pairwise_sum(v), static_cast<double>(ref), 1e-9 * (1 + std::abs(static_cast<double>(ref))));
  }
}

TEST(PairwiseSum, DependsOnlyOnInput) {
  std::vector<double> v = {1e16, 1.0, -1e16, 3.0, 0.5};
  EXPECT_EQ(pairwise_sum(v), pairwise_sum(std::vector<double>(v)));
}

TEST(Moments, SmallSample) {
  const std::vector<double> v = {1, 2, 3, 4};
  const auto m = moments(v);
  EXPECT_DOUBLE_EQ(m.mean, 2.5);
  EXPECT_NEAR(m.variance, 5.0 / 3.0, 1e-15);
  EXPECT_NEAR(m.stderr_mean, std::sqrt(5.0 / 12.0), 1e-15);
  EXPECT_EQ(m.n, 4u);
}

TEST(Kolmogorov, MatchesSeries) {
  for (double l : {0.3, 0.5, 0.8, 1.0, 1.358, 1.628, 2.5})
    EXPECT_NEAR(kolmogorov_survival(l), kolmogorov_reference(l), 1e-12) << l;
  EXPECT_NEAR(kolmogorov_survival(1.358), 0.05, 1e-3);
  EXPECT_NEAR(kolmogorov_survival(1.628), 0.01, 1e-3);
  EXPECT_DOUBLE_EQ(kolmogorov_survival(0.0), 1.0);
  EXPECT_LT(kolmogorov_survival(10.0), 1e-80);
}

TEST(KsStatistic, Examples) {
  const std::vector<double> a = {1, 2, 3}, b = {4, 5, 6};
  EXPECT_DOUBLE_EQ(ks_statistic(a, b), 1.0);
  EXPECT_DOUBLE_EQ(ks_statistic(a, a), 0.0);
  const std::vector<double> c = {1, 2, 3, 4}, d = {2.5};
  EXPECT_DOUBLE_EQ(ks_statistic(c, d), 0.5);
  // Ties across samples step together.
  const std::vector<double> e = {1, 1, 2}, f = {1, 2, 2};
  EXPECT_NEAR(ks_statistic(e, f), 1.0 / 3.0, 1e-15);
}

TEST(KsTwoSample, StephensCorrection) {
  const std::vector<double> a = {0.1, 0.4, 0.7, 0.9, 1.3, 2.2}, b = {0.5, 1.1, 1.5, 1.9, 2.4};
  const auto r = ks_two_sample("t", a, b, 0.01);
  const double ne = 6.0 * 5.0 / 11.0;
  const double lambda = (std::sqrt(ne) + 0.12 + 0.11 / std::sqrt(ne)) * r.statistic;
  EXPECT_NEAR(r.p_value, kolmogorov_reference(lambda), 1e-12);
  EXPECT_TRUE(r.pass);
  EXPECT_EQ(r.name, "t");
  EXPECT_THROW(ks_two_sample("t", {}, b, 0.01), std::invalid_argument);
}

TEST(KsTwoSample, NullIsRoughlyUniform) {
  std::mt19937_64 gen(9);
  std::normal_distribution<double> nd;
  int rejected = 0;
  for (int rep = 0; rep < 400; ++rep) {
    std::vector<double> a(200), b(300);
    for (auto& x : a) x = nd(gen);
    for (auto& x : b) x = nd(gen);
    rejected += ks_two_sample("n", a, b, 0.05).pass ? 0 : 1;
  }
  // Binomial(400, 0.05): mean 20, sd 4.4.
  EXPECT_LT(rejected, 36);
}

TEST(ChiSquare, KnownTwoByTwo) {
  const std::vector<double> a = {20, 30}, b = {30, 20};
  const auto r = chi_square_homogeneity("c", a, b, 0.01);
  EXPECT_NEAR(r.statistic, 4.0, 1e-12);
  EXPECT_NEAR(r.p_value, std::erfc(std::sqrt(2.0)), 1e-12);  // P(chi2_1 > 4) = P(|Z| > 2)
  EXPECT_TRUE(r.pass);
}

TEST(ChiSquare, IdenticalCountsGiveOne) {
  const std::vector<double> a = {10, 20, 30};
  const auto r = chi_square_homogeneity("c", a, a, 0.01);
  EXPECT_DOUBLE_EQ(r.statistic, 0.0);
  EXPECT_DOUBLE_EQ(r.p_value, 1.0);
}

TEST(ChiSquare, PoolsSparseCategories) {
  // Categories 2 and 3 are too sparse alone; pooled with each other they are
  // still sparse and join category 1, which leaves a single bin.
  const std::vector<double> a = {50, 1, 1}, b = {50, 2, 0};
  const auto r = chi_square_homogeneity("c", a, b, 0.01);
  EXPECT_DOUBLE_EQ(r.p_value, 1.0);
  // Sparse trailing categories join the last full bin.
  const std::vector<double> c = {20, 30, 1, 2}, d = {30, 20, 2, 1};
  const std::vector<double> cp = {20, 33}, dp = {30, 23};
  EXPECT_NEAR(chi_square_homogeneity("c", c, d, 0.01).statistic, chi_square_homogeneity("c", cp, dp, 0.01).statistic,
              1e-12);
}

TEST(ChiSquare, Errors) {
  const std::vector<double> a = {1, 2}, b = {1, 2, 3}, z = {0, 0};
  EXPECT_THROW(chi_square_homogeneity("c", a, b, 0.01), std::invalid_argument);
  EXPECT_THROW(chi_square_homogeneity("c", a, z, 0.01), std::invalid_argument);
}

TEST(NormalP, Values) {
  EXPECT_NEAR(normal_two_sided_p(1.959963984540054), 0.05, 1e-12);
  EXPECT_DOUBLE_EQ(normal_two_sided_p(0.0), 1.0);
  EXPECT_EQ(normal_two_sided_p(-2.0), normal_two_sided_p(2.0));
}
