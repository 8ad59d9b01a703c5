#ifndef GENRCT_SENSITIVITY_HPP
#define GENRCT_SENSITIVITY_HPP

#include <Eigen/Core>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "genrct/estimators.hpp"
#include "genrct/models.hpp"

namespace genrct {

// Confounder strength coordinates: r2 is the share of true-weight variance
// lost to weight error, rho the correlation between weight error and the
// individual-effect deviation.
struct SensitivityParams {
  double r2 = 0.0;   // in [0, 1)
  double rho = 0.0;  // in [-1, 1]
};

struct SensitivityContext {
  double var_w = 0.0;     // variance of the estimated weights, trial units
  double sigma_xi = 0.0;  // upper bound on the outcome-error SD
  double mu_hat = 0.0;    // analyzed point estimate
  std::vector<double> pseudo_effects;  // tau-hat per trial unit
  std::vector<double> xi_hat;          // tau-hat minus mu-hat
};

// Per-unit pseudo effect A*Y/e - (1-A)*Y/(1-e).
std::vector<double> pseudo_effects(const Eigen::VectorXd& y,
                                   const Eigen::VectorXi& arm,
                                   const Eigen::VectorXd& e_trial);

// Conservative bound sd(tau-hat) on the outcome-error SD.
double sigma_xi_bound(std::span<const double> pseudo_effects);

SensitivityContext make_sensitivity_context(const Eigen::VectorXd& y,
                                            const Eigen::VectorXi& arm,
                                            const Eigen::VectorXd& e_trial,
                                            const WeightSet& weights,
                                            double mu_hat);

// Bias induced by a confounder at the given strength:
//   rho * sqrt(var_w * r2/(1-r2) * sigma_xi^2).
double bias_at(const SensitivityParams& params, const SensitivityContext& ctx);
double bias_at(double r2, double rho, double var_w, double sigma_xi);

// Common strength rho^2 = R^2 at which the bias equals 100*q% of mu_hat.
double robustness_value(double q, double mu_hat, const SensitivityContext& ctx);
double robustness_value(double q, double mu_hat, double var_w, double sigma_xi);

struct BenchmarkRow {
  std::string covariate;
  double r2 = 0.0;
  double rho = 0.0;
  double bias = 0.0;         // bias a confounder as strong as this covariate
                             // would induce
  double mrcs = 0.0;         // target / bias, signed
  double k_sigma_min = 0.0;  // scale on r2 (rho held) to reach the target
  double k_rho_min = 0.0;    // scale on rho (r2 held) to reach the target
  bool failed = false;       // leave-one-out refit failed or degenerate
  std::string note;
};

// Leave-one-out strength of each observed covariate: refit the sampling
// model without covariate j, rebuild weights and compare with the full-model
// weights. Strengths do not depend on the analyzed bound.
struct CovariateStrength {
  std::string covariate;
  double r2 = 0.0;
  double rho = 0.0;
  bool failed = false;
  std::string note;
};

struct BenchmarkInputs {
  const Eigen::MatrixXd& xs_combined;  // sampling features, trial rows first
  Eigen::Index n_trial = 0;
  std::vector<std::string> names;      // one per sampling feature column
  const WeightSet& full_weights;       // participation weights, full model
  std::optional<double> truncate_quantile;
  int threads = 1;
};

std::vector<CovariateStrength> covariate_strengths(
    const BenchmarkInputs& inputs, const SensitivityContext& ctx);

// Completes benchmark rows for a specific analyzed bound.
std::vector<BenchmarkRow> benchmark_rows(
    const std::vector<CovariateStrength>& strengths,
    const SensitivityContext& ctx, double target_value);

std::vector<BenchmarkRow> benchmark_covariates(const BenchmarkInputs& inputs,
                                               const SensitivityContext& ctx,
                                               double target_value);

struct ContourGrid {
  std::vector<double> r2_axis;    // over [0, r2_max]
  std::vector<double> rho2_axis;  // over [0, 1]
  Eigen::MatrixXd bias;           // rows follow r2_axis, cols rho2_axis
  double killer_level = 0.0;      // |target bound|
  double rho_sign = 1.0;          // killer direction of the bound
  bool degenerate_target = false;
  std::vector<std::pair<double, double>> benchmark_points;  // (r2, rho^2)

  bool is_killer(std::size_t i, std::size_t j) const;
  std::string to_csv() const;  // long format: r2,rho2,bias,is_killer
};

ContourGrid contour_grid(const SensitivityContext& ctx, double target_bound,
                         int nr, int nc, double r2_max,
                         const std::vector<CovariateStrength>& strengths = {});

struct RobustnessVerdict {
  bool robust = true;
  std::string rule;
  std::optional<BenchmarkRow> offending;  // minimal MRCS in (0,1]
};

// Robust iff no benchmark row has MRCS in (0, 1]: a confounder no stronger
// than any observed covariate cannot push the bound across zero.
RobustnessVerdict assess_bound(double bound_value,
                               std::span<const BenchmarkRow> rows);

std::string benchmark_text(std::span<const BenchmarkRow> rows, double rv);

}  // namespace genrct

#endif  // GENRCT_SENSITIVITY_HPP
