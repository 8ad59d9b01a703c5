#include "genrct/models.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>
#include <algorithm>
#include <cmath>

#include "genrct/errors.hpp"
#include "genrct/stats.hpp"

namespace genrct {

namespace {

double expit(double eta) {
  if (eta >= 0.0) return 1.0 / (1.0 + std::exp(-eta));
  double e = std::exp(eta);
  return e / (1.0 + e);
}

Eigen::MatrixXd with_intercept(const Eigen::MatrixXd& features) {
  Eigen::MatrixXd design(features.rows(), features.cols() + 1);
  design.col(0).setOnes();
  design.rightCols(features.cols()) = features;
  return design;
}

void check_full_rank(const Eigen::MatrixXd& design) {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  qr.setThreshold(1e-10);
  if (qr.rank() < design.cols())
    fail(errc::rank_deficient, "design matrix is rank deficient (" +
                                   std::to_string(qr.rank()) + " of " +
                                   std::to_string(design.cols()) +
                                   " columns independent)");
}

}  // namespace

Eigen::VectorXd LogisticFit::predict(const Eigen::MatrixXd& features) const {
  Eigen::VectorXd eta =
      (features * coefficients.tail(coefficients.size() - 1)).array() +
      coefficients(0);
  for (Eigen::Index i = 0; i < eta.size(); ++i) eta(i) = expit(eta(i));
  return eta;
}

double LogisticFit::predict_one(const Eigen::VectorXd& x) const {
  return expit(coefficients(0) + coefficients.tail(x.size()).dot(x));
}

LogisticFit fit_logistic(const Eigen::MatrixXd& features,
                         const Eigen::VectorXd& labels,
                         const LogisticOptions& options) {
  const Eigen::Index n = features.rows();
  const Eigen::Index p = features.cols();
  require(labels.size() == n, errc::invalid_argument,
          "label length does not match feature rows");
  require(n >= p + 2, errc::degenerate_sample,
          "logistic fit needs at least p+2 observations");

  double label_sum = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    require(labels(i) == 0.0 || labels(i) == 1.0, errc::invalid_argument,
            "labels must be 0 or 1");
    label_sum += labels(i);
  }
  require(label_sum > 0.0 && label_sum < static_cast<double>(n),
          errc::degenerate_sample, "labels contain a single class");

  // Standardize columns for conditioning; coefficients are mapped back to the
  // original scale on exit.
  Eigen::VectorXd shift = Eigen::VectorXd::Zero(p);
  Eigen::VectorXd scale = Eigen::VectorXd::Ones(p);
  Eigen::MatrixXd work = features;
  if (options.standardize) {
    for (Eigen::Index j = 0; j < p; ++j) {
      shift(j) = work.col(j).mean();
      double ss = (work.col(j).array() - shift(j)).matrix().squaredNorm();
      double sd = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;
      scale(j) = sd > 0.0 ? sd : 1.0;
      work.col(j) = (work.col(j).array() - shift(j)) / scale(j);
    }
  }

  Eigen::MatrixXd design = with_intercept(work);
  check_full_rank(design);

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p + 1);
  if (options.warm_start && options.warm_start->size() == p + 1) {
    // map original-scale start onto the standardized basis
    beta.tail(p) =
        options.warm_start->tail(p).array() * scale.array();
    beta(0) = (*options.warm_start)(0) +
              options.warm_start->tail(p).dot(shift);
  }

  auto log_likelihood = [&](const Eigen::VectorXd& b) {
    Eigen::VectorXd eta = design * b;
    double ll = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      double e = eta(i);
      // log(1 + exp(e)) computed stably
      double lse = e > 0 ? e + std::log1p(std::exp(-e)) : std::log1p(std::exp(e));
      ll += labels(i) * e - lse;
    }
    return ll;
  };

  LogisticFit fit;
  double ll = log_likelihood(beta);
  Eigen::VectorXd mu(n), w(n);

  for (int iter = 1; iter <= options.max_iterations; ++iter) {
    Eigen::VectorXd eta = design * beta;
    for (Eigen::Index i = 0; i < n; ++i) {
      mu(i) = expit(eta(i));
      w(i) = mu(i) * (1.0 - mu(i));
    }
    Eigen::VectorXd score = design.transpose() * (labels - mu);
    fit.iterations = iter;
    fit.max_abs_score = score.cwiseAbs().maxCoeff();
    if (fit.max_abs_score < options.tolerance) {
      fit.converged = true;
      break;
    }

    Eigen::MatrixXd hessian =
        design.transpose() * w.asDiagonal() * design;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(hessian);
    Eigen::VectorXd step = ldlt.solve(score);
    if (ldlt.info() != Eigen::Success || !step.allFinite())
      fail(errc::separation,
           "logistic fit: information matrix collapsed (separated data?)");

    // step-halving keeps Newton monotone in the likelihood; the slack scales
    // with |ll| so rounding noise near the optimum cannot stall the step
    double step_scale = 1.0;
    Eigen::VectorXd candidate;
    double new_ll;
    for (int h = 0; h < 30; ++h) {
      candidate = beta + step_scale * step;
      new_ll = log_likelihood(candidate);
      if (new_ll >= ll - 1e-12 * (1.0 + std::abs(ll))) break;
      step_scale *= 0.5;
    }
    beta = candidate;
    ll = new_ll;

    if (beta.cwiseAbs().maxCoeff() > 1e2)
      fail(errc::separation,
           "logistic fit: coefficients diverging (separated data)");
  }

  // Perfect separation drives every probability to its label, so the score
  // can meet the tolerance at absurd coefficients; a fully saturated fit is
  // separation whether or not the score converged.
  Eigen::VectorXd eta_final = design * beta;
  if (eta_final.cwiseAbs().minCoeff() > 15.0)
    fail(errc::separation,
         "logistic fit: all fitted probabilities saturated (separated data)");

  fit.coefficients.resize(p + 1);
  fit.coefficients.tail(p) = beta.tail(p).array() / scale.array();
  fit.coefficients(0) = beta(0) - fit.coefficients.tail(p).dot(shift);
  return fit;
}

Eigen::VectorXd OlsFit::predict(const Eigen::MatrixXd& features) const {
  return (features * coefficients.tail(coefficients.size() - 1)).array() +
         coefficients(0);
}

OlsFit fit_ols(const Eigen::MatrixXd& features, const Eigen::VectorXd& y) {
  const Eigen::Index n = features.rows();
  const Eigen::Index p = features.cols();
  require(y.size() == n, errc::invalid_argument,
          "outcome length does not match feature rows");
  require(n >= p + 2, errc::degenerate_sample,
          "least squares needs at least p+2 observations");

  Eigen::MatrixXd design = with_intercept(features);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  qr.setThreshold(1e-10);
  if (qr.rank() < design.cols())
    fail(errc::rank_deficient, "outcome design matrix is rank deficient");

  OlsFit fit;
  fit.coefficients = qr.solve(y);
  Eigen::VectorXd resid = y - design * fit.coefficients;
  fit.residual_variance =
      resid.squaredNorm() / static_cast<double>(n - design.cols());
  return fit;
}

Eigen::VectorXd OutcomeFit::effect(const Eigen::MatrixXd& features) const {
  return treat.predict(features) - control.predict(features);
}

OutcomeFit fit_outcome_models(const Eigen::MatrixXd& features,
                              const Eigen::VectorXd& y,
                              const Eigen::VectorXi& arm) {
  const Eigen::Index n = features.rows();
  require(y.size() == n && arm.size() == n, errc::invalid_argument,
          "outcome model inputs differ in length");

  for (int a : {0, 1}) {
    Eigen::Index count = 0;
    for (Eigen::Index i = 0; i < n; ++i)
      if (arm(i) == a) ++count;
    require(count >= features.cols() + 2, errc::degenerate_sample,
            "arm " + std::to_string(a) + " has too few units (" +
                std::to_string(count) + ") for the outcome model");
  }

  OutcomeFit fit;
  for (int a : {0, 1}) {
    std::vector<Eigen::Index> idx;
    for (Eigen::Index i = 0; i < n; ++i)
      if (arm(i) == a) idx.push_back(i);
    Eigen::MatrixXd xa(static_cast<Eigen::Index>(idx.size()), features.cols());
    Eigen::VectorXd ya(static_cast<Eigen::Index>(idx.size()));
    for (std::size_t k = 0; k < idx.size(); ++k) {
      xa.row(static_cast<Eigen::Index>(k)) = features.row(idx[k]);
      ya(static_cast<Eigen::Index>(k)) = y(idx[k]);
    }
    (a == 0 ? fit.control : fit.treat) = fit_ols(xa, ya);
  }
  return fit;
}

OutcomeFit fit_outcome_models(const StudyDataset& trial,
                              const std::string& outcome) {
  require(trial.source == Source::trial, errc::invalid_argument,
          "outcome models need a trial dataset");
  auto idx = trial.with_outcome(outcome);
  require(!idx.empty(), errc::missing_column,
          "no trial unit carries outcome '" + outcome + "'");

  Eigen::MatrixXd x(static_cast<Eigen::Index>(idx.size()),
                    static_cast<Eigen::Index>(trial.schema.size()));
  Eigen::VectorXd y(static_cast<Eigen::Index>(idx.size()));
  Eigen::VectorXi a(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k) {
    const auto& r = trial.records[idx[k]];
    for (std::size_t j = 0; j < trial.schema.size(); ++j)
      x(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) =
          r.covariates[j];
    y(static_cast<Eigen::Index>(k)) = r.outcomes.at(outcome);
    a(static_cast<Eigen::Index>(k)) = *r.arm;
  }
  return fit_outcome_models(x, y, a);
}

Propensity Propensity::known_constant(double c) {
  require(c > 0.0 && c < 1.0, errc::invalid_argument,
          "propensity constant must lie in (0,1)");
  Propensity p;
  p.constant_ = c;
  return p;
}

Propensity Propensity::fitted(LogisticFit fit) {
  Propensity p;
  p.fit_ = std::move(fit);
  return p;
}

Eigen::VectorXd Propensity::evaluate(const Eigen::MatrixXd& features) const {
  if (fit_) return fit_->predict(features);
  return Eigen::VectorXd::Constant(features.rows(), constant_);
}

Propensity fit_trial_propensity(const Eigen::MatrixXd& features,
                                const Eigen::VectorXi& arm,
                                const PropensityMode& mode) {
  if (mode.kind == PropensityKind::known_constant) {
    double c;
    if (mode.constant) {
      c = *mode.constant;
    } else {
      require(arm.size() > 0, errc::degenerate_sample, "empty trial");
      c = arm.cast<double>().mean();
    }
    return Propensity::known_constant(c);
  }
  return Propensity::fitted(fit_logistic(features, arm.cast<double>()));
}

double WeightSet::variance() const {
  return genrct::variance(weights);
}

WeightSet participation_weights(const Eigen::VectorXd& sampling_scores,
                                std::optional<double> truncate_quantile) {
  const Eigen::Index n = sampling_scores.size();
  require(n >= 2, errc::degenerate_sample, "weights need at least 2 units");

  WeightSet set;
  set.weights.resize(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    double p = sampling_scores(i);
    if (!(p > 0.0) || !std::isfinite(1.0 / p))
      fail(errc::non_finite_weight,
           "sampling score " + std::to_string(p) + " at unit " +
               std::to_string(i + 1) + " yields a non-finite weight");
    set.weights[static_cast<std::size_t>(i)] = 1.0 / p;
  }

  if (truncate_quantile) {
    double q = *truncate_quantile;
    require(q >= 0.0 && q < 0.5, errc::invalid_argument,
            "truncation quantile must lie in [0, 0.5)");
    if (q > 0.0) {
      set.lower_cap = quantile(set.weights, q);
      set.upper_cap = quantile(set.weights, 1.0 - q);
      set.truncated = true;
      for (double& w : set.weights)
        w = std::clamp(w, set.lower_cap, set.upper_cap);
    }
  }

  double m = mean(set.weights);
  for (double& w : set.weights) w /= m;
  return set;
}

WeightSet participation_weights(const StudyDataset& trial,
                                const LogisticFit& sampling,
                                std::optional<double> truncate_quantile) {
  require(sampling.converged, errc::invalid_argument,
          "sampling model did not converge");
  return participation_weights(sampling.predict(trial.covariate_matrix()),
                               truncate_quantile);
}

}  // namespace genrct
