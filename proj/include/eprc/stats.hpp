#pragma once

#include <cstdint>
#include <vector>

#include "eprc/distinguisher.hpp"

namespace eprc {

// Histogram of zero-counts from repeated cascade runs.
struct EmpiricalDistribution {
  int rounds;
  std::vector<std::uint64_t> counts;  // indexed by count 0..rounds
  std::uint64_t total;
};

// Descriptive statistics over a group's zero-counts: where the samples
// concentrate, and in particular how much sits on the counts {1, 4}.
struct SecondLevelSummary {
  std::vector<int> mode_set;  // ascending, all counts attaining the max
  double mass_at_1_and_4;
  double mass_elsewhere;
  double sample_variance;  // n-1 denominator; 0 for a single sample
};

struct HypothesisTestResult {
  double statistic;
  int degrees_of_freedom;
  double p_value;
};

EmpiricalDistribution empirical_distribution(
    const std::vector<int>& zero_counts, int rounds);

// Normalized view of the histogram.
CountDistribution to_distribution(const EmpiricalDistribution& emp);

// (1/2) sum_c |d1[c] - d2[c]|
double total_variation(const CountDistribution& d1, const CountDistribution& d2);

// Pearson chi-square goodness of fit against `ref`. Bins with expected count
// below `pooling_threshold` are folded into their nearest retained neighbor
// (ties toward the lower index); df = retained bins - 1. The p-value is the
// upper chi-square tail via the regularized incomplete gamma function.
HypothesisTestResult chi_square_gof(const EmpiricalDistribution& emp,
                                    const CountDistribution& ref,
                                    double pooling_threshold = 5.0);

// sum_c log(d_comp[c]) - log(d_diag[c]) over the observed counts. Both
// references must have strictly positive mass on every observed count.
double log_likelihood_ratio(const std::vector<int>& zero_counts,
                            const CountDistribution& d_comp,
                            const CountDistribution& d_diag);

SecondLevelSummary second_level_summary(const EmpiricalDistribution& emp);

// Regularized upper incomplete gamma Q(a, x) for a > 0, x >= 0; series for
// x < a+1, Lentz continued fraction otherwise. Absolute error <= 1e-10.
double regularized_gamma_q(double a, double x);

}  // namespace eprc
