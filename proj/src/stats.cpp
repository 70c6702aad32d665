#include "eprc/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace eprc {

namespace {

void check_same_rounds(const char* who, int r1, int r2) {
  if (r1 != r2)
    throw std::invalid_argument(std::string(who) + ": rounds mismatch (" +
                                std::to_string(r1) + " vs " +
                                std::to_string(r2) + ")");
}

double gamma_q_series(double a, double x) {
  // P(a,x) by series, then Q = 1 - P. Converges fast for x < a+1.
  double term = 1.0 / a;
  double sum = term;
  for (int n = 1; n < 1000; ++n) {
    term *= x / (a + n);
    sum += term;
    if (std::abs(term) < std::abs(sum) * 1e-16)
      return 1.0 - sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
  }
  throw std::runtime_error("regularized_gamma_q: series did not converge");
}

double gamma_q_continued_fraction(double a, double x) {
  // Modified Lentz evaluation of the standard continued fraction for Q(a,x).
  const double tiny = std::numeric_limits<double>::min() / 1e-30;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 1000; ++i) {
    const double an = -static_cast<double>(i) * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16)
      return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
  }
  throw std::runtime_error(
      "regularized_gamma_q: continued fraction did not converge");
}

}  // namespace

EmpiricalDistribution empirical_distribution(
    const std::vector<int>& zero_counts, int rounds) {
  if (rounds < 1)
    throw std::invalid_argument("empirical_distribution: rounds must be >= 1");
  if (zero_counts.empty())
    throw std::invalid_argument("empirical_distribution: no samples");
  std::vector<std::uint64_t> counts(static_cast<std::size_t>(rounds) + 1, 0);
  for (int c : zero_counts) {
    if (c < 0 || c > rounds)
      throw std::invalid_argument("empirical_distribution: count " +
                                  std::to_string(c) + " outside [0, " +
                                  std::to_string(rounds) + "]");
    ++counts[c];
  }
  return EmpiricalDistribution{rounds, std::move(counts), zero_counts.size()};
}

CountDistribution to_distribution(const EmpiricalDistribution& emp) {
  std::vector<double> mass(emp.counts.size());
  for (std::size_t c = 0; c < emp.counts.size(); ++c)
    mass[c] = static_cast<double>(emp.counts[c]) /
              static_cast<double>(emp.total);
  return CountDistribution(emp.rounds, std::move(mass));
}

double total_variation(const CountDistribution& d1,
                       const CountDistribution& d2) {
  check_same_rounds("total_variation", d1.rounds(), d2.rounds());
  double sum = 0.0;
  for (int c = 0; c <= d1.rounds(); ++c) sum += std::abs(d1.at(c) - d2.at(c));
  return 0.5 * sum;
}

HypothesisTestResult chi_square_gof(const EmpiricalDistribution& emp,
                                    const CountDistribution& ref,
                                    double pooling_threshold) {
  check_same_rounds("chi_square_gof", emp.rounds, ref.rounds());
  const int bins = emp.rounds + 1;
  const double total = static_cast<double>(emp.total);
  std::vector<double> expected(bins), observed(bins);
  for (int c = 0; c < bins; ++c) {
    if (emp.counts[c] > 0 && !(ref.at(c) > 0.0))
      throw std::invalid_argument(
          "chi_square_gof: observed count in a zero-mass reference bin");
    expected[c] = total * ref.at(c);
    observed[c] = static_cast<double>(emp.counts[c]);
  }
  std::vector<int> retained;
  for (int c = 0; c < bins; ++c)
    if (expected[c] >= pooling_threshold) retained.push_back(c);
  if (retained.empty())
    throw std::invalid_argument("chi_square_gof: all bins pooled away");
  for (int c = 0; c < bins; ++c) {
    if (expected[c] >= pooling_threshold) continue;
    int best = retained.front();
    for (int r : retained)
      if (std::abs(r - c) < std::abs(best - c)) best = r;
    expected[best] += expected[c];
    observed[best] += observed[c];
  }
  double stat = 0.0;
  for (int r : retained) {
    const double diff = observed[r] - expected[r];
    stat += diff * diff / expected[r];
  }
  const int df = static_cast<int>(retained.size()) - 1;
  const double p = (df == 0) ? 1.0 : regularized_gamma_q(df / 2.0, stat / 2.0);
  return HypothesisTestResult{stat, df, p};
}

double log_likelihood_ratio(const std::vector<int>& zero_counts,
                            const CountDistribution& d_comp,
                            const CountDistribution& d_diag) {
  check_same_rounds("log_likelihood_ratio", d_comp.rounds(), d_diag.rounds());
  double llr = 0.0;
  for (int c : zero_counts) {
    if (c < 0 || c > d_comp.rounds())
      throw std::invalid_argument("log_likelihood_ratio: count out of range");
    if (!(d_comp.at(c) > 0.0) || !(d_diag.at(c) > 0.0))
      throw std::invalid_argument(
          "log_likelihood_ratio: zero reference mass on an observed count");
    llr += std::log(d_comp.at(c)) - std::log(d_diag.at(c));
  }
  return llr;
}

SecondLevelSummary second_level_summary(const EmpiricalDistribution& emp) {
  const std::uint64_t max_count =
      *std::max_element(emp.counts.begin(), emp.counts.end());
  std::vector<int> modes;
  for (std::size_t c = 0; c < emp.counts.size(); ++c)
    if (emp.counts[c] == max_count) modes.push_back(static_cast<int>(c));
  std::uint64_t at14 = 0;
  if (emp.rounds >= 1) at14 += emp.counts[1];
  if (emp.rounds >= 4) at14 += emp.counts[4];
  const double total = static_cast<double>(emp.total);
  double mean = 0.0, sq = 0.0;
  for (std::size_t c = 0; c < emp.counts.size(); ++c) {
    mean += static_cast<double>(c) * static_cast<double>(emp.counts[c]);
    sq += static_cast<double>(c) * static_cast<double>(c) *
          static_cast<double>(emp.counts[c]);
  }
  mean /= total;
  const double variance =
      emp.total > 1 ? (sq - total * mean * mean) / (total - 1.0) : 0.0;
  return SecondLevelSummary{
      std::move(modes), static_cast<double>(at14) / total,
      static_cast<double>(emp.total - at14) / total, variance};
}

double regularized_gamma_q(double a, double x) {
  if (!(a > 0.0) || !(x >= 0.0))
    throw std::invalid_argument("regularized_gamma_q: need a > 0 and x >= 0");
  if (x == 0.0) return 1.0;
  return (x < a + 1.0) ? gamma_q_series(a, x) : gamma_q_continued_fraction(a, x);
}

}  // namespace eprc
