#include "genrct/sensitivity.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "genrct/errors.hpp"
#include "genrct/parallel.hpp"
#include "genrct/stats.hpp"

namespace genrct {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double sign_of(double v) { return v < 0.0 ? -1.0 : 1.0; }

std::string csv_number(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace

std::vector<double> pseudo_effects(const Eigen::VectorXd& y,
                                   const Eigen::VectorXi& arm,
                                   const Eigen::VectorXd& e_trial) {
  require(y.size() == arm.size() && y.size() == e_trial.size(),
          errc::invalid_argument, "pseudo-effect inputs differ in length");
  std::vector<double> tau(static_cast<std::size_t>(y.size()));
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    double e = e_trial(i);
    require(e > 0.0 && e < 1.0, errc::invalid_argument,
            "propensity must lie strictly inside (0,1)");
    tau[static_cast<std::size_t>(i)] =
        arm(i) == 1 ? y(i) / e : -y(i) / (1.0 - e);
  }
  return tau;
}

double sigma_xi_bound(std::span<const double> pseudo) {
  require(pseudo.size() >= 2, errc::degenerate_sample,
          "sigma_xi bound needs at least 2 units");
  return stddev(pseudo);
}

SensitivityContext make_sensitivity_context(const Eigen::VectorXd& y,
                                            const Eigen::VectorXi& arm,
                                            const Eigen::VectorXd& e_trial,
                                            const WeightSet& weights,
                                            double mu_hat) {
  SensitivityContext ctx;
  ctx.pseudo_effects = pseudo_effects(y, arm, e_trial);
  ctx.sigma_xi = sigma_xi_bound(ctx.pseudo_effects);
  ctx.var_w = weights.variance();
  ctx.mu_hat = mu_hat;
  ctx.xi_hat.resize(ctx.pseudo_effects.size());
  for (std::size_t i = 0; i < ctx.xi_hat.size(); ++i)
    ctx.xi_hat[i] = ctx.pseudo_effects[i] - mu_hat;
  return ctx;
}

double bias_at(double r2, double rho, double var_w, double sigma_xi) {
  require(r2 >= 0.0 && r2 < 1.0, errc::r2_out_of_range,
          "R^2 must lie in [0, 1)");
  require(rho >= -1.0 && rho <= 1.0, errc::invalid_argument,
          "rho must lie in [-1, 1]");
  require(var_w >= 0.0, errc::invalid_argument, "var_w must be nonnegative");
  return rho *
         std::sqrt(var_w * (r2 / (1.0 - r2)) * sigma_xi * sigma_xi);
}

double bias_at(const SensitivityParams& params, const SensitivityContext& ctx) {
  return bias_at(params.r2, params.rho, ctx.var_w, ctx.sigma_xi);
}

double robustness_value(double q, double mu_hat, double var_w,
                        double sigma_xi) {
  require(q > 0.0, errc::invalid_argument, "q must be positive");
  require(sigma_xi > 0.0 && var_w > 0.0, errc::zero_denominator,
          "robustness value needs sigma_xi > 0 and var_w > 0");
  if (mu_hat == 0.0) return 0.0;
  double b = q * q * mu_hat * mu_hat / (sigma_xi * sigma_xi * var_w);
  // conjugate form of (sqrt(b^2+4b) - b)/2: no cancellation for large b
  return 2.0 * b / (std::sqrt(b * b + 4.0 * b) + b);
}

double robustness_value(double q, double mu_hat,
                        const SensitivityContext& ctx) {
  return robustness_value(q, mu_hat, ctx.var_w, ctx.sigma_xi);
}

std::vector<CovariateStrength> covariate_strengths(
    const BenchmarkInputs& inputs, const SensitivityContext& ctx) {
  const Eigen::Index p = inputs.xs_combined.cols();
  require(p >= 2, errc::degenerate_sample,
          "benchmarking needs at least 2 covariates");
  require(static_cast<Eigen::Index>(inputs.names.size()) == p,
          errc::invalid_argument, "one name per sampling feature required");
  require(inputs.n_trial >= 2 &&
              inputs.n_trial < inputs.xs_combined.rows(),
          errc::invalid_argument, "bad trial row count");
  require(inputs.full_weights.weights.size() ==
              static_cast<std::size_t>(inputs.n_trial),
          errc::invalid_argument, "full weight vector has wrong length");

  const Eigen::Index total = inputs.xs_combined.rows();
  Eigen::VectorXd s(total);
  s.head(inputs.n_trial).setOnes();
  s.tail(total - inputs.n_trial).setZero();

  double var_w = ctx.var_w;
  std::vector<CovariateStrength> rows(static_cast<std::size_t>(p));

  parallel_for(static_cast<int>(p), inputs.threads, [&](int j) {
    CovariateStrength& row = rows[static_cast<std::size_t>(j)];
    row.covariate = inputs.names[static_cast<std::size_t>(j)];
    try {
      Eigen::MatrixXd reduced(total, p - 1);
      Eigen::Index c = 0;
      for (Eigen::Index k = 0; k < p; ++k) {
        if (k == j) continue;
        reduced.col(c++) = inputs.xs_combined.col(k);
      }
      LogisticFit fit = fit_logistic(reduced, s);
      require(fit.converged, errc::refit_failure,
              "leave-one-out sampling fit did not converge");
      WeightSet loo = participation_weights(
          fit.predict(reduced.topRows(inputs.n_trial)),
          inputs.truncate_quantile);

      std::vector<double> eps(loo.weights.size());
      for (std::size_t i = 0; i < eps.size(); ++i)
        eps[i] = loo.weights[i] - inputs.full_weights.weights[i];
      double var_eps = variance(eps);
      double r2 = var_w > 0.0 ? var_eps / var_w : 0.0;
      if (r2 >= 1.0) {
        row.failed = true;
        row.note = "weight error variance exceeds the full-model variance";
        return;
      }
      row.r2 = r2;
      row.rho = correlation(eps, ctx.xi_hat);
    } catch (const Error& e) {
      row.failed = true;
      row.note = e.what();
    }
  });
  return rows;
}

namespace {

// Smallest k > 0 such that |bias_at(k * r2, rho)| reaches `level`; bias is
// monotone in k on [0, 1/r2), so bisection applies.
double solve_k_sigma(double r2, double rho, double var_w, double sigma_xi,
                     double level) {
  if (rho == 0.0 || r2 <= 0.0) return kInf;
  double k_hi = (1.0 - 1e-12) / r2;
  auto value = [&](double k) {
    return std::abs(bias_at(std::min(k * r2, 1.0 - 1e-15), rho, var_w,
                            sigma_xi));
  };
  if (value(k_hi) < level) return kInf;  // cannot reach even at R^2 -> 1
  double lo = 0.0, hi = k_hi;
  while (hi - lo > 1e-9 * std::max(1.0, hi)) {
    double mid = 0.5 * (lo + hi);
    (value(mid) < level ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

std::vector<BenchmarkRow> benchmark_rows(
    const std::vector<CovariateStrength>& strengths,
    const SensitivityContext& ctx, double target_value) {
  std::vector<BenchmarkRow> rows;
  rows.reserve(strengths.size());
  for (const auto& s : strengths) {
    BenchmarkRow row;
    row.covariate = s.covariate;
    row.failed = s.failed;
    row.note = s.note;
    if (s.failed) {
      rows.push_back(std::move(row));
      continue;
    }
    row.r2 = s.r2;
    row.rho = s.rho;
    row.bias = bias_at(s.r2, s.rho, ctx.var_w, ctx.sigma_xi);

    if (row.bias == 0.0) {
      row.mrcs = kInf;
      row.k_sigma_min = kInf;
      row.k_rho_min = kInf;
      rows.push_back(std::move(row));
      continue;
    }

    row.mrcs = target_value / row.bias;

    // direction of the benchmark vs the killer direction of the bound
    double direction = sign_of(target_value * row.bias);
    double k = solve_k_sigma(s.r2, s.rho, ctx.var_w, ctx.sigma_xi,
                             std::abs(target_value));
    row.k_sigma_min = std::isfinite(k) ? direction * k : direction * kInf;

    // bias is linear in rho at fixed r2; the needed correlation may exceed 1
    double slope = bias_at(s.r2, 1.0, ctx.var_w, ctx.sigma_xi);
    double needed_rho = slope > 0.0 ? target_value / slope : kInf;
    if (std::abs(needed_rho) <= 1.0 && s.rho != 0.0) {
      row.k_rho_min = needed_rho / s.rho;
    } else {
      row.k_rho_min = direction * kInf;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<BenchmarkRow> benchmark_covariates(const BenchmarkInputs& inputs,
                                               const SensitivityContext& ctx,
                                               double target_value) {
  return benchmark_rows(covariate_strengths(inputs, ctx), ctx, target_value);
}

bool ContourGrid::is_killer(std::size_t i, std::size_t j) const {
  if (degenerate_target) return false;
  return std::abs(bias(static_cast<Eigen::Index>(i),
                       static_cast<Eigen::Index>(j))) >= killer_level &&
         killer_level > 0.0;
}

std::string ContourGrid::to_csv() const {
  std::ostringstream out;
  out << "r2,rho2,bias,is_killer\n";
  for (std::size_t i = 0; i < r2_axis.size(); ++i)
    for (std::size_t j = 0; j < rho2_axis.size(); ++j)
      out << csv_number(r2_axis[i]) << ',' << csv_number(rho2_axis[j]) << ','
          << csv_number(bias(static_cast<Eigen::Index>(i),
                             static_cast<Eigen::Index>(j)))
          << ',' << (is_killer(i, j) ? 1 : 0) << '\n';
  return out.str();
}

ContourGrid contour_grid(const SensitivityContext& ctx, double target_bound,
                         int nr, int nc, double r2_max,
                         const std::vector<CovariateStrength>& strengths) {
  require(nr >= 2 && nc >= 2, errc::invalid_argument,
          "grid needs at least 2 points per axis");
  require(r2_max > 0.0 && r2_max < 1.0, errc::invalid_argument,
          "r2_max must lie in (0, 1)");

  ContourGrid grid;
  grid.killer_level = std::abs(target_bound);
  grid.degenerate_target = target_bound == 0.0;
  grid.rho_sign = sign_of(target_bound);
  grid.r2_axis.resize(static_cast<std::size_t>(nr));
  grid.rho2_axis.resize(static_cast<std::size_t>(nc));
  for (int i = 0; i < nr; ++i)
    grid.r2_axis[static_cast<std::size_t>(i)] =
        r2_max * static_cast<double>(i) / static_cast<double>(nr - 1);
  for (int j = 0; j < nc; ++j)
    grid.rho2_axis[static_cast<std::size_t>(j)] =
        static_cast<double>(j) / static_cast<double>(nc - 1);

  grid.bias.resize(nr, nc);
  for (int i = 0; i < nr; ++i) {
    double r2 = grid.r2_axis[static_cast<std::size_t>(i)];
    double radial = std::sqrt(ctx.var_w * (r2 / (1.0 - r2)) * ctx.sigma_xi *
                              ctx.sigma_xi);
    for (int j = 0; j < nc; ++j) {
      double rho = grid.rho_sign *
                   std::sqrt(grid.rho2_axis[static_cast<std::size_t>(j)]);
      grid.bias(i, j) = rho * radial;
    }
  }

  for (const auto& s : strengths)
    if (!s.failed)
      grid.benchmark_points.emplace_back(s.r2, s.rho * s.rho);
  return grid;
}

RobustnessVerdict assess_bound(double bound_value,
                               std::span<const BenchmarkRow> rows) {
  std::size_t usable = 0;
  for (const auto& r : rows)
    if (!r.failed) ++usable;
  require(usable > 0, errc::invalid_argument,
          "assess_bound needs at least one usable benchmark row");
  (void)bound_value;

  RobustnessVerdict verdict;
  verdict.rule = "no-mrcs-in-(0,1]";
  for (const auto& r : rows) {
    if (r.failed) continue;
    if (r.mrcs > 0.0 && r.mrcs <= 1.0) {
      verdict.robust = false;
      if (!verdict.offending || r.mrcs < verdict.offending->mrcs)
        verdict.offending = r;
    }
  }
  return verdict;
}

std::string benchmark_text(std::span<const BenchmarkRow> rows, double rv) {
  std::ostringstream out;
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%-12s %10s %10s %12s %12s %12s %12s\n",
                "covariate", "R2", "rho", "bias", "k_sigma_min", "k_rho_min",
                "MRCS");
  out << buf;
  for (const auto& r : rows) {
    if (r.failed) {
      std::snprintf(buf, sizeof(buf), "%-12s failed: %s\n", r.covariate.c_str(),
                    r.note.c_str());
      out << buf;
      continue;
    }
    std::snprintf(buf, sizeof(buf),
                  "%-12s %10.4g %10.4g %12.4g %12.4g %12.4g %12.4g\n",
                  r.covariate.c_str(), r.r2, r.rho, r.bias, r.k_sigma_min,
                  r.k_rho_min, r.mrcs);
    out << buf;
  }
  std::snprintf(buf, sizeof(buf), "RV (analyzed bound): %.4g\n", rv);
  out << buf;
  return out.str();
}

}  // namespace genrct
