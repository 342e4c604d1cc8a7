#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace holab {

struct TestResult {
  std::string name;
  double statistic = 0.0;
  double p_value = 1.0;
  double threshold = 0.01;  // reject when p_value < threshold
  bool pass = true;
};

/// Sum by recursive halving over a fixed index split; the result depends only
/// on the input order, never on how the data were produced.
double pairwise_sum(std::span<const double> v);

struct SampleMoments {
  double mean = 0.0;
  double variance = 0.0;  // unbiased
  double stderr_mean = 0.0;
  std::size_t n = 0;
};
SampleMoments moments(std::span<const double> v);

/// P(K > lambda) for the Kolmogorov distribution.
double kolmogorov_survival(double lambda);

/// sup |F_a - F_b| of the empirical CDFs.
double ks_statistic(std::span<const double> a, std::span<const double> b);

/// Two-sample Kolmogorov-Smirnov test with Stephens' small-sample correction.
TestResult ks_two_sample(std::string name, std::span<const double> a, std::span<const double> b, double threshold);

/// Chi-square test of homogeneity for two count vectors over the same
/// categories. Adjacent categories are pooled until every expected count is
/// at least 5.
TestResult chi_square_homogeneity(std::string name, std::span<const double> counts_a,
                                  std::span<const double> counts_b, double threshold);

/// Two-sided normal tail probability for a z-score.
double normal_two_sided_p(double z);

}  // namespace holab
