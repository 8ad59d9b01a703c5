#ifndef GENRCT_MODELS_HPP
#define GENRCT_MODELS_HPP

#include <Eigen/Core>
#include <optional>
#include <string>
#include <vector>

#include "genrct/dataset.hpp"

namespace genrct {

struct LogisticFit {
  Eigen::VectorXd coefficients;  // intercept first, length p+1
  bool converged = false;
  int iterations = 0;
  double max_abs_score = 0.0;

  // features: n x p, without the intercept column.
  Eigen::VectorXd predict(const Eigen::MatrixXd& features) const;
  double predict_one(const Eigen::VectorXd& x) const;
};

struct LogisticOptions {
  int max_iterations = 100;
  double tolerance = 1e-8;       // on the max-abs score
  bool standardize = true;       // internal conditioning only
  const Eigen::VectorXd* warm_start = nullptr;  // original-scale coefficients
};

// Newton/IRLS maximum likelihood. Throws Separation when the data are
// (quasi-)separated and RankDeficient on collinear designs.
LogisticFit fit_logistic(const Eigen::MatrixXd& features,
                         const Eigen::VectorXd& labels,
                         const LogisticOptions& options = {});

struct OlsFit {
  Eigen::VectorXd coefficients;  // intercept first
  double residual_variance = 0.0;

  Eigen::VectorXd predict(const Eigen::MatrixXd& features) const;
};

OlsFit fit_ols(const Eigen::MatrixXd& features, const Eigen::VectorXd& y);

// Per-arm outcome regressions on trial units carrying the named outcome.
struct OutcomeFit {
  OlsFit control;  // arm 0
  OlsFit treat;    // arm 1

  Eigen::VectorXd effect(const Eigen::MatrixXd& features) const;
};

OutcomeFit fit_outcome_models(const StudyDataset& trial,
                              const std::string& outcome);
OutcomeFit fit_outcome_models(const Eigen::MatrixXd& features,
                              const Eigen::VectorXd& y,
                              const Eigen::VectorXi& arm);

enum class PropensityKind { known_constant, fitted };

struct PropensityMode {
  PropensityKind kind = PropensityKind::known_constant;
  std::optional<double> constant;  // default: observed treated fraction
};

// Trial propensity e(X) = Pr[A=1 | X, S=1].
class Propensity {
 public:
  static Propensity known_constant(double c);
  static Propensity fitted(LogisticFit fit);

  Eigen::VectorXd evaluate(const Eigen::MatrixXd& features) const;
  bool is_constant() const { return !fit_.has_value(); }
  double constant() const { return constant_; }
  const std::optional<LogisticFit>& fit() const { return fit_; }

 private:
  double constant_ = 0.5;
  std::optional<LogisticFit> fit_;
};

Propensity fit_trial_propensity(const Eigen::MatrixXd& features,
                                const Eigen::VectorXi& arm,
                                const PropensityMode& mode);

struct WeightSet {
  std::vector<double> weights;  // per trial unit, rescaled to mean one
  bool truncated = false;
  double lower_cap = 0.0;  // raw-scale caps applied before rescaling
  double upper_cap = 0.0;

  double variance() const;  // sample variance, n-1
};

// Raw weight 1/p(X_i) per trial unit, optional symmetric quantile
// truncation, then rescaled to mean one.
WeightSet participation_weights(const Eigen::VectorXd& sampling_scores,
                                std::optional<double> truncate_quantile = {});
WeightSet participation_weights(const StudyDataset& trial,
                                const LogisticFit& sampling,
                                std::optional<double> truncate_quantile = {});

}  // namespace genrct

#endif  // GENRCT_MODELS_HPP
