#ifndef GENRCT_ESTIMATORS_HPP
#define GENRCT_ESTIMATORS_HPP

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "genrct/dataset.hpp"
#include "genrct/models.hpp"

namespace genrct {

enum class Method { rct_diff, om, ipsw, aipsw };
enum class TargetPop { combined, target_only };

const char* method_name(Method m);
Method method_from_name(const std::string& name);

struct Estimate {
  Method method = Method::aipsw;
  std::string outcome;
  bool normalized = true;
  TargetPop target = TargetPop::combined;
  double point = 0.0;
  double se = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  int replicates = 0;
  std::uint64_t seed = 0;
  int dropped_replicates = 0;
};

// One outcome's analysis arrays. Sampling-model features (xs_*) and
// outcome-model features (xo_*) usually coincide but may differ, e.g. in
// misspecification studies.
struct OutcomeData {
  Eigen::MatrixXd xs_trial;
  Eigen::MatrixXd xs_target;
  Eigen::MatrixXd xo_trial;
  Eigen::MatrixXd xo_target;
  Eigen::VectorXd y;
  Eigen::VectorXi arm;

  Eigen::Index n() const { return xs_trial.rows(); }
  Eigen::Index m() const { return xs_target.rows(); }
  Eigen::MatrixXd xs_combined() const;
};

// Extracts the arrays for one outcome; trial units lacking the outcome are
// excluded from that outcome's analysis.
OutcomeData make_outcome_data(const StudyDataset& trial,
                              const StudyDataset& target,
                              const std::string& outcome);

struct EstimatorSpec {
  Method method = Method::aipsw;
  bool normalized = true;
  TargetPop targetpop = TargetPop::combined;
  PropensityMode propensity;
  std::optional<double> truncate_quantile;
  double positivity_floor = 0.01;
};

struct FittedNuisance {
  LogisticFit sampling;
  Propensity propensity;
  OutcomeFit outcome;
  Eigen::VectorXd p_trial;  // sampling scores on trial units
  Eigen::VectorXd e_trial;  // propensity on trial units
  std::size_t low_score_flags = 0;  // p-hat below the positivity floor
};

FittedNuisance fit_nuisance(const OutcomeData& data, const EstimatorSpec& spec,
                            const LogisticOptions& logit_options = {});

// --- estimator cores (pure arithmetic over prepared inputs) ---

double rct_diff_core(const Eigen::VectorXd& y, const Eigen::VectorXi& arm);

double om_core(const Eigen::VectorXd& effect_trial,
               const Eigen::VectorXd& effect_target, TargetPop targetpop);

// Arm-specific weights are S*1{A=a} / (p(X) * e_a(X)); normalized divides by
// the in-arm weight sum (Hajek), otherwise by n+m.
double ipsw_core(const Eigen::VectorXd& y, const Eigen::VectorXi& arm,
                 const Eigen::VectorXd& p_trial, const Eigen::VectorXd& e_trial,
                 Eigen::Index n_plus_m, bool normalized);

double aipsw_core(const Eigen::VectorXd& y, const Eigen::VectorXi& arm,
                  const Eigen::VectorXd& p_trial,
                  const Eigen::VectorXd& e_trial,
                  const Eigen::VectorXd& g1_trial,
                  const Eigen::VectorXd& g0_trial,
                  double effect_mean_combined, Eigen::Index n_plus_m,
                  bool normalized);

// Point estimate for `spec` on `data`, fitting whatever the method needs.
double point_estimate(const OutcomeData& data, const EstimatorSpec& spec,
                      const FittedNuisance* prefit = nullptr);

// RCT-internal difference in means with normal-approximation CI.
Estimate estimate_rct_diff(const StudyDataset& trial,
                           const std::string& outcome);

struct BootstrapOptions {
  int replicates = 1000;
  std::uint64_t seed = 0;
  int threads = 0;               // 0 = hardware concurrency
  double max_dropped_frac = 0.05;
};

// Stratified nonparametric bootstrap: trial and target resampled
// independently, all nuisance models refit per replicate. Percentile CI.
// Replicate r draws from an RNG seeded by derive_seed(seed, r), so results
// do not depend on the number of worker threads.
Estimate bootstrap_estimate(const OutcomeData& data, const EstimatorSpec& spec,
                            const std::string& outcome,
                            const BootstrapOptions& options);

}  // namespace genrct

#endif  // GENRCT_ESTIMATORS_HPP
