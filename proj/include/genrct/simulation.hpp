#ifndef GENRCT_SIMULATION_HPP
#define GENRCT_SIMULATION_HPP

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "genrct/dataset.hpp"
#include "genrct/estimators.hpp"

namespace genrct {

// Synthetic two-cohort design. Covariates are multivariate normal with
// common pairwise correlation; binary columns are dichotomized at their
// latent mean. Selection and outcomes follow logistic/linear models that may
// include a quadratic term in the first covariate; the misspecification
// switches make the analyst omit that term from the corresponding fit.
struct SimConfig {
  int p = 4;
  Eigen::VectorXd mu;     // latent covariate means, length p
  Eigen::VectorXd sigma;  // latent covariate SDs, length p
  double rho = 0.0;       // common pairwise correlation
  std::vector<int> binary_mask;  // 1 = dichotomize (value in {0,1})

  Eigen::VectorXd alpha;   // selection: intercept + p slopes
  double alpha_quad = 0.0; // selection coefficient on x1^2
  double c = 0.5;          // randomization probability in the trial

  Eigen::VectorXd beta0;   // control outcome: intercept + p slopes
  Eigen::VectorXd beta1;   // treatment outcome
  double beta_quad0 = 0.0; // x1^2 coefficient, control
  double beta_quad1 = 0.0; // x1^2 coefficient, treatment
  double noise_sd = 1.0;

  int n_trial = 500;
  int m_target = 2000;

  bool sampling_wrong = false;  // analyst omits x1^2 in the sampling model
  bool outcome_wrong = false;   // analyst omits x1^2 in the outcome models

  // Unmeasured confounder: a latent normal correlated with covariate
  // `hidden_twin` that enters selection and the treatment-arm outcome with
  // this coefficient, and is never shown to the analyst.
  double hidden_strength = 0.0;
  double hidden_rho = 0.5;
  int hidden_twin = 1;  // 1-based covariate index

  std::uint64_t seed = 1;

  void validate() const;
  bool dgp_has_quadratic() const {
    return alpha_quad != 0.0 || beta_quad0 != 0.0 || beta_quad1 != 0.0;
  }

  static SimConfig from_file(const std::string& path);
};

struct Truth {
  double combined = 0.0;     // n:m weighted mixture of the S=1 / S=0 means
  double target_only = 0.0;  // E[Y(1)-Y(0) | S=0]
  double mc_error = 0.0;     // oracle Monte Carlo SE (combined)
};

// Population effect by a fresh-draw oracle under the same generator; invariant
// to the analyst-facing misspecification switches.
Truth oracle_truth(const SimConfig& cfg, std::size_t draws = 1'000'000);

struct GeneratedStudy {
  StudyDataset trial;
  StudyDataset target;
};

// Draws units from the superpopulation and splits them by the selection
// model until both cohort quotas are filled. Bit-reproducible per seed.
GeneratedStudy generate(const SimConfig& cfg, std::uint64_t seed);
inline GeneratedStudy generate(const SimConfig& cfg) {
  return generate(cfg, cfg.seed);
}

// Analysis arrays for a replicate, honoring the misspecification switches.
OutcomeData analyst_view(const GeneratedStudy& study, const SimConfig& cfg);
std::vector<std::string> analyst_sampling_feature_names(const SimConfig& cfg);

struct MCRow {
  std::string estimator;
  double mean_bias = 0.0;
  double mcse = 0.0;    // Monte Carlo SE of the mean bias
  double emp_sd = 0.0;  // empirical SD of the estimates
  double coverage = -1.0;  // fraction of CIs covering the truth; -1 if no CIs
  int used = 0;
  int failed = 0;
};

struct MCResult {
  double truth = 0.0;
  TargetPop estimand = TargetPop::combined;
  int replicates = 0;
  std::vector<MCRow> rows;

  std::string to_text() const;
};

struct MCOptions {
  int replicates = 500;
  int bootstrap_B = 0;  // > 0 adds bootstrap CIs and coverage
  int threads = 0;
  double max_failed_frac = 0.05;
};

MCResult run_mc(const SimConfig& cfg, const std::vector<EstimatorSpec>& specs,
                const MCOptions& options);

}  // namespace genrct

#endif  // GENRCT_SIMULATION_HPP
