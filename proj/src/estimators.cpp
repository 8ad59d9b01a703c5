#include "genrct/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "genrct/errors.hpp"
#include "genrct/parallel.hpp"
#include "genrct/stats.hpp"

namespace genrct {

namespace {

constexpr double kZ975 = 1.959963984540054;

void check_finite(double value, const char* what) {
  if (!std::isfinite(value))
    fail(errc::non_finite_weight, std::string(what) + " is not finite");
}

Eigen::MatrixXd gather_rows(const Eigen::MatrixXd& x,
                            const std::vector<Eigen::Index>& idx) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(idx.size()), x.cols());
  for (std::size_t k = 0; k < idx.size(); ++k)
    out.row(static_cast<Eigen::Index>(k)) = x.row(idx[k]);
  return out;
}

}  // namespace

const char* method_name(Method m) {
  switch (m) {
    case Method::rct_diff: return "rct-diff";
    case Method::om: return "om";
    case Method::ipsw: return "ipsw";
    case Method::aipsw: return "aipsw";
  }
  return "?";
}

Method method_from_name(const std::string& name) {
  if (name == "rct-diff") return Method::rct_diff;
  if (name == "om") return Method::om;
  if (name == "ipsw") return Method::ipsw;
  if (name == "aipsw") return Method::aipsw;
  fail(errc::invalid_argument, "unknown estimator '" + name + "'");
}

Eigen::MatrixXd OutcomeData::xs_combined() const {
  Eigen::MatrixXd x(n() + m(), xs_trial.cols());
  x.topRows(n()) = xs_trial;
  x.bottomRows(m()) = xs_target;
  return x;
}

OutcomeData make_outcome_data(const StudyDataset& trial,
                              const StudyDataset& target,
                              const std::string& outcome) {
  require(trial.source == Source::trial, errc::invalid_argument,
          "first dataset must be the trial cohort");
  require(target.source == Source::target, errc::invalid_argument,
          "second dataset must be the target cohort");
  require(trial.schema == target.schema, errc::invalid_argument,
          "trial and target schemas differ");

  auto idx = trial.with_outcome(outcome);
  require(idx.size() >= 2, errc::degenerate_sample,
          "outcome '" + outcome + "' present on fewer than 2 trial units");

  OutcomeData data;
  const auto p = static_cast<Eigen::Index>(trial.schema.size());
  data.xs_trial.resize(static_cast<Eigen::Index>(idx.size()), p);
  data.y.resize(static_cast<Eigen::Index>(idx.size()));
  data.arm.resize(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k) {
    const auto& r = trial.records[idx[k]];
    for (Eigen::Index j = 0; j < p; ++j)
      data.xs_trial(static_cast<Eigen::Index>(k), j) =
          r.covariates[static_cast<std::size_t>(j)];
    data.y(static_cast<Eigen::Index>(k)) = r.outcomes.at(outcome);
    data.arm(static_cast<Eigen::Index>(k)) = *r.arm;
  }
  data.xs_target = target.covariate_matrix();
  data.xo_trial = data.xs_trial;
  data.xo_target = data.xs_target;
  return data;
}

FittedNuisance fit_nuisance(const OutcomeData& data, const EstimatorSpec& spec,
                            const LogisticOptions& logit_options) {
  FittedNuisance fits;
  bool need_sampling =
      spec.method == Method::ipsw || spec.method == Method::aipsw;
  bool need_outcome = spec.method == Method::om || spec.method == Method::aipsw;

  if (need_sampling) {
    Eigen::MatrixXd xs = data.xs_combined();
    Eigen::VectorXd s(xs.rows());
    s.head(data.n()).setOnes();
    s.tail(data.m()).setZero();
    fits.sampling = fit_logistic(xs, s, logit_options);
    fits.p_trial = fits.sampling.predict(data.xs_trial);
    for (Eigen::Index i = 0; i < fits.p_trial.size(); ++i)
      if (fits.p_trial(i) < spec.positivity_floor) ++fits.low_score_flags;

    fits.propensity =
        fit_trial_propensity(data.xo_trial, data.arm, spec.propensity);
    fits.e_trial = fits.propensity.evaluate(data.xo_trial);
  }
  if (need_outcome)
    fits.outcome = fit_outcome_models(data.xo_trial, data.y, data.arm);
  return fits;
}

double rct_diff_core(const Eigen::VectorXd& y, const Eigen::VectorXi& arm) {
  double sum1 = 0.0, sum0 = 0.0;
  Eigen::Index n1 = 0, n0 = 0;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (arm(i) == 1) {
      sum1 += y(i);
      ++n1;
    } else {
      sum0 += y(i);
      ++n0;
    }
  }
  require(n1 > 0 && n0 > 0, errc::degenerate_sample,
          "both arms must be non-empty");
  return sum1 / static_cast<double>(n1) - sum0 / static_cast<double>(n0);
}

double om_core(const Eigen::VectorXd& effect_trial,
               const Eigen::VectorXd& effect_target, TargetPop targetpop) {
  if (targetpop == TargetPop::target_only) {
    require(effect_target.size() > 0, errc::degenerate_sample,
            "target-only estimate with empty target");
    return effect_target.mean();
  }
  double total = effect_trial.sum() + effect_target.sum();
  return total / static_cast<double>(effect_trial.size() +
                                     effect_target.size());
}

double ipsw_core(const Eigen::VectorXd& y, const Eigen::VectorXi& arm,
                 const Eigen::VectorXd& p_trial, const Eigen::VectorXd& e_trial,
                 Eigen::Index n_plus_m, bool normalized) {
  double num1 = 0.0, den1 = 0.0, num0 = 0.0, den0 = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (arm(i) == 1) {
      double w = 1.0 / (p_trial(i) * e_trial(i));
      check_finite(w, "IPSW weight");
      num1 += w * y(i);
      den1 += w;
    } else {
      double w = 1.0 / (p_trial(i) * (1.0 - e_trial(i)));
      check_finite(w, "IPSW weight");
      num0 += w * y(i);
      den0 += w;
    }
  }
  require(den1 > 0.0 && den0 > 0.0, errc::degenerate_sample,
          "both arms must be non-empty");
  double total = static_cast<double>(n_plus_m);
  double est = normalized ? num1 / den1 - num0 / den0
                          : num1 / total - num0 / total;
  check_finite(est, "IPSW estimate");
  return est;
}

double aipsw_core(const Eigen::VectorXd& y, const Eigen::VectorXi& arm,
                  const Eigen::VectorXd& p_trial,
                  const Eigen::VectorXd& e_trial,
                  const Eigen::VectorXd& g1_trial,
                  const Eigen::VectorXd& g0_trial,
                  double effect_mean_combined, Eigen::Index n_plus_m,
                  bool normalized) {
  double num1 = 0.0, den1 = 0.0, num0 = 0.0, den0 = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (arm(i) == 1) {
      double w = 1.0 / (p_trial(i) * e_trial(i));
      check_finite(w, "AIPSW weight");
      num1 += w * (y(i) - g1_trial(i));
      den1 += w;
    } else {
      double w = 1.0 / (p_trial(i) * (1.0 - e_trial(i)));
      check_finite(w, "AIPSW weight");
      num0 += w * (y(i) - g0_trial(i));
      den0 += w;
    }
  }
  require(den1 > 0.0 && den0 > 0.0, errc::degenerate_sample,
          "both arms must be non-empty");
  double total = static_cast<double>(n_plus_m);
  double residual = normalized ? num1 / den1 - num0 / den0
                               : num1 / total - num0 / total;
  double est = residual + effect_mean_combined;
  check_finite(est, "AIPSW estimate");
  return est;
}

double point_estimate(const OutcomeData& data, const EstimatorSpec& spec,
                      const FittedNuisance* prefit) {
  if (spec.method == Method::rct_diff) return rct_diff_core(data.y, data.arm);

  FittedNuisance local;
  if (!prefit) {
    local = fit_nuisance(data, spec);
    prefit = &local;
  }

  switch (spec.method) {
    case Method::om: {
      Eigen::VectorXd eff_trial = prefit->outcome.effect(data.xo_trial);
      Eigen::VectorXd eff_target = prefit->outcome.effect(data.xo_target);
      return om_core(eff_trial, eff_target, spec.targetpop);
    }
    case Method::ipsw:
      return ipsw_core(data.y, data.arm, prefit->p_trial, prefit->e_trial,
                       data.n() + data.m(), spec.normalized);
    case Method::aipsw: {
      Eigen::VectorXd g1 = prefit->outcome.treat.predict(data.xo_trial);
      Eigen::VectorXd g0 = prefit->outcome.control.predict(data.xo_trial);
      Eigen::VectorXd eff_trial = g1 - g0;
      Eigen::VectorXd eff_target = prefit->outcome.effect(data.xo_target);
      double eff_mean = (eff_trial.sum() + eff_target.sum()) /
                        static_cast<double>(data.n() + data.m());
      return aipsw_core(data.y, data.arm, prefit->p_trial, prefit->e_trial,
                        g1, g0, eff_mean, data.n() + data.m(),
                        spec.normalized);
    }
    default:
      fail(errc::invalid_argument, "unsupported method");
  }
}

Estimate estimate_rct_diff(const StudyDataset& trial,
                           const std::string& outcome) {
  auto idx = trial.with_outcome(outcome);
  require(!idx.empty(), errc::missing_column,
          "no trial unit carries outcome '" + outcome + "'");
  std::vector<double> y1, y0;
  for (auto i : idx) {
    double v = trial.records[i].outcomes.at(outcome);
    (*trial.records[i].arm == 1 ? y1 : y0).push_back(v);
  }
  require(y1.size() >= 2 && y0.size() >= 2, errc::degenerate_sample,
          "both arms need at least 2 units with outcome '" + outcome + "'");

  Estimate est;
  est.method = Method::rct_diff;
  est.outcome = outcome;
  est.target = TargetPop::combined;
  est.point = mean(y1) - mean(y0);
  est.se = std::sqrt(variance(y1) / static_cast<double>(y1.size()) +
                     variance(y0) / static_cast<double>(y0.size()));
  est.ci_low = est.point - kZ975 * est.se;
  est.ci_high = est.point + kZ975 * est.se;
  return est;
}

Estimate bootstrap_estimate(const OutcomeData& data, const EstimatorSpec& spec,
                            const std::string& outcome,
                            const BootstrapOptions& options) {
  require(options.replicates >= 100, errc::invalid_argument,
          "bootstrap needs at least 100 replicates");

  Estimate est;
  est.method = spec.method;
  est.outcome = outcome;
  est.normalized = spec.normalized;
  est.target = spec.method == Method::om ? spec.targetpop : TargetPop::combined;
  est.replicates = options.replicates;
  est.seed = options.seed;

  FittedNuisance full;
  if (spec.method != Method::rct_diff) full = fit_nuisance(data, spec);
  est.point = point_estimate(data, spec,
                             spec.method == Method::rct_diff ? nullptr : &full);

  const Eigen::Index n = data.n();
  const Eigen::Index m = data.m();
  std::vector<double> reps(static_cast<std::size_t>(options.replicates),
                           std::numeric_limits<double>::quiet_NaN());

  LogisticOptions warm;
  if (spec.method != Method::rct_diff)
    warm.warm_start = &full.sampling.coefficients;

  parallel_for(options.replicates, options.threads, [&](int r) {
    std::mt19937_64 rng(derive_seed(options.seed, static_cast<unsigned>(r)));
    std::uniform_int_distribution<Eigen::Index> pick_trial(0, n - 1);
    std::uniform_int_distribution<Eigen::Index> pick_target(
        0, m > 0 ? m - 1 : 0);

    std::vector<Eigen::Index> ti(static_cast<std::size_t>(n));
    for (auto& i : ti) i = pick_trial(rng);
    std::vector<Eigen::Index> gi(static_cast<std::size_t>(m));
    for (auto& i : gi) i = pick_target(rng);

    OutcomeData boot;
    boot.xs_trial = gather_rows(data.xs_trial, ti);
    boot.xo_trial = gather_rows(data.xo_trial, ti);
    boot.xs_target = gather_rows(data.xs_target, gi);
    boot.xo_target = gather_rows(data.xo_target, gi);
    boot.y.resize(n);
    boot.arm.resize(n);
    for (Eigen::Index k = 0; k < n; ++k) {
      boot.y(k) = data.y(ti[static_cast<std::size_t>(k)]);
      boot.arm(k) = data.arm(ti[static_cast<std::size_t>(k)]);
    }

    try {
      if (spec.method == Method::rct_diff) {
        reps[static_cast<std::size_t>(r)] = rct_diff_core(boot.y, boot.arm);
      } else {
        FittedNuisance fits = fit_nuisance(boot, spec, warm);
        reps[static_cast<std::size_t>(r)] = point_estimate(boot, spec, &fits);
      }
    } catch (const Error&) {
      // dropped replicate, counted below
    }
  });

  std::vector<double> kept;
  kept.reserve(reps.size());
  for (double v : reps)
    if (std::isfinite(v)) kept.push_back(v);
  est.dropped_replicates = static_cast<int>(reps.size() - kept.size());

  double dropped_frac = static_cast<double>(est.dropped_replicates) /
                        static_cast<double>(reps.size());
  if (dropped_frac > options.max_dropped_frac)
    fail(errc::replicate_failure,
         std::to_string(est.dropped_replicates) + " of " +
             std::to_string(reps.size()) + " bootstrap replicates failed");

  double sd = kept.size() >= 2 ? stddev(kept) : 0.0;
  est.se = sd;
  est.ci_low = quantile(kept, 0.025);
  est.ci_high = quantile(kept, 0.975);
  return est;
}

}  // namespace genrct
