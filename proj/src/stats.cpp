#include "genrct/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "genrct/errors.hpp"

namespace genrct {

double mean(std::span<const double> values) {
  require(!values.empty(), errc::degenerate_sample, "mean of empty sample");
  double sum = 0.0, c = 0.0;
  for (double v : values) {  // Kahan, so large samples stay order-stable
    double y = v - c;
    double t = sum + y;
    c = (t - sum) - y;
    sum = t;
  }
  return sum / static_cast<double>(values.size());
}

double variance(std::span<const double> values) {
  require(values.size() >= 2, errc::degenerate_sample,
          "variance needs at least 2 observations");
  double m = mean(values);
  double ss = 0.0;
  for (double v : values) ss += (v - m) * (v - m);
  return ss / static_cast<double>(values.size() - 1);
}

double stddev(std::span<const double> values) {
  return std::sqrt(variance(values));
}

double correlation(std::span<const double> a, std::span<const double> b) {
  require(a.size() == b.size(), errc::invalid_argument,
          "correlation inputs differ in length");
  require(a.size() >= 2, errc::degenerate_sample,
          "correlation needs at least 2 observations");
  double ma = mean(a), mb = mean(b);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double da = a[i] - ma, db = b[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa == 0.0 || sbb == 0.0) return 0.0;
  double r = sab / std::sqrt(saa * sbb);
  return std::clamp(r, -1.0, 1.0);
}

double quantile(std::span<const double> values, double q) {
  require(!values.empty(), errc::degenerate_sample, "quantile of empty sample");
  require(q >= 0.0 && q <= 1.0, errc::invalid_argument,
          "quantile level outside [0,1]");
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  double h = (static_cast<double>(v.size()) - 1.0) * q;
  auto lo = static_cast<std::size_t>(h);
  if (lo + 1 >= v.size()) return v.back();
  double frac = h - static_cast<double>(lo);
  return v[lo] + frac * (v[lo + 1] - v[lo]);
}

double normal_cdf(double z) {
  return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

double kolmogorov_pvalue(double lambda) {
  if (lambda <= 0.0) return 1.0;
  if (lambda < 1.0) {
    // Jacobi theta transform of the same series; converges fast for small
    // lambda where the direct alternating series does not.
    double cdf = 0.0;
    double pref = std::sqrt(2.0 * std::numbers::pi) / lambda;
    for (int k = 1; k <= 64; ++k) {
      double odd = 2.0 * k - 1.0;
      double term = std::exp(-odd * odd * std::numbers::pi *
                             std::numbers::pi / (8.0 * lambda * lambda));
      cdf += term;
      if (term < 1e-18 * (cdf + 1e-300)) break;
    }
    return std::clamp(1.0 - pref * cdf, 0.0, 1.0);
  }
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 256; ++k) {
    double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += sign * term;
    if (term < 1e-18) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_test(std::span<const double> a, std::span<const double> b) {
  require(a.size() >= 2 && b.size() >= 2, errc::degenerate_sample,
          "K-S test needs at least 2 observations per sample");
  std::vector<double> sa(a.begin(), a.end());
  std::vector<double> sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());

  const double na = static_cast<double>(sa.size());
  const double nb = static_cast<double>(sb.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < sa.size() && j < sb.size()) {
    double t = std::min(sa[i], sb[j]);
    while (i < sa.size() && sa[i] <= t) ++i;
    while (j < sb.size() && sb[j] <= t) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na -
                             static_cast<double>(j) / nb));
  }

  double n_eff = na * nb / (na + nb);
  double lambda = std::sqrt(n_eff) * d;
  return {d, kolmogorov_pvalue(lambda)};
}

ZResult two_proportion_z(std::size_t x1, std::size_t n1, std::size_t x2,
                         std::size_t n2) {
  require(n1 >= 2 && n2 >= 2, errc::degenerate_sample,
          "Z test needs at least 2 observations per group");
  require(x1 <= n1 && x2 <= n2, errc::invalid_argument,
          "success count exceeds group size");
  double p1 = static_cast<double>(x1) / static_cast<double>(n1);
  double p2 = static_cast<double>(x2) / static_cast<double>(n2);
  double pooled =
      static_cast<double>(x1 + x2) / static_cast<double>(n1 + n2);
  double var = pooled * (1.0 - pooled) *
               (1.0 / static_cast<double>(n1) + 1.0 / static_cast<double>(n2));
  if (var == 0.0) return {0.0, 1.0};  // all successes or all failures
  double z = (p1 - p2) / std::sqrt(var);
  double p = 2.0 * (1.0 - normal_cdf(std::abs(z)));
  return {z, std::clamp(p, 0.0, 1.0)};
}

}  // namespace genrct
