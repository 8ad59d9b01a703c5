#ifndef GENRCT_STATS_HPP
#define GENRCT_STATS_HPP

#include <cstddef>
#include <span>
#include <vector>

namespace genrct {

double mean(std::span<const double> values);
// Sample variance (n-1 denominator).
double variance(std::span<const double> values);
double stddev(std::span<const double> values);
double correlation(std::span<const double> a, std::span<const double> b);

// Linear-interpolation quantile on the order statistics (R type 7).
// q in [0,1]; values need not be sorted.
double quantile(std::span<const double> values, double q);

double normal_cdf(double z);

// Complementary CDF of the asymptotic Kolmogorov distribution,
// Q(lambda) = 2 * sum_{k>=1} (-1)^{k-1} exp(-2 k^2 lambda^2).
double kolmogorov_pvalue(double lambda);

struct KsResult {
  double d;  // sup |F1 - F2| over the pooled sample points
  double p;  // asymptotic p-value with effective-n scaling, no correction
};

// Two-sample Kolmogorov-Smirnov test. Handles ties across samples.
KsResult ks_test(std::span<const double> a, std::span<const double> b);

struct ZResult {
  double z;
  double p;
};

// Two-proportion Z test with pooled variance under H0.
// x1/x2 are success counts out of n1/n2 trials.
ZResult two_proportion_z(std::size_t x1, std::size_t n1, std::size_t x2,
                         std::size_t n2);

}  // namespace genrct

#endif  // GENRCT_STATS_HPP
