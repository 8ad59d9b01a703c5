#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>

#include "doctest.h"
#include "genrct/errors.hpp"
#include "genrct/estimators.hpp"
#include "genrct/simulation.hpp"
#include "genrct/stats.hpp"
#include "testutil.hpp"

using namespace genrct;

namespace {

SimConfig base_config() {
  SimConfig cfg;
  cfg.p = 2;
  cfg.mu = Eigen::VectorXd::Zero(2);
  cfg.sigma = Eigen::VectorXd::Ones(2);
  cfg.alpha = Eigen::VectorXd::Zero(3);
  cfg.alpha << -1.0, 0.6, 0.3;
  cfg.beta0 = Eigen::VectorXd::Zero(3);
  cfg.beta0 << 0.0, 1.0, 0.5;
  cfg.beta1 = Eigen::VectorXd::Zero(3);
  cfg.beta1 << 1.0, 2.0, 0.5;
  cfg.noise_sd = 1.0;
  cfg.n_trial = 200;
  cfg.m_target = 600;
  cfg.seed = 101;
  return cfg;
}

StudyDataset two_arm_trial(const std::vector<double>& y0,
                           const std::vector<double>& y1) {
  StudyDataset trial;
  trial.schema = {{{"x", CovariateKind::continuous}}};
  trial.source = Source::trial;
  trial.outcome_names = {"y"};
  int i = 0;
  for (double v : y0) {
    UnitRecord r;
    r.covariates = {static_cast<double>(i++)};
    r.arm = 0;
    r.outcomes["y"] = v;
    trial.records.push_back(r);
  }
  for (double v : y1) {
    UnitRecord r;
    r.covariates = {static_cast<double>(i++)};
    r.arm = 1;
    r.outcomes["y"] = v;
    trial.records.push_back(r);
  }
  return trial;
}

}  // namespace

TEST_CASE("rct-diff: arm means 7 and 10 give -3") {
  auto trial = two_arm_trial({9.0, 10.0, 11.0}, {6.0, 7.0, 8.0});
  auto est = estimate_rct_diff(trial, "y");
  CHECK(est.point == doctest::Approx(-3.0).epsilon(1e-14));
  CHECK(est.method == Method::rct_diff);
}

TEST_CASE("rct-diff: identical arms give 0 with a CI straddling 0") {
  auto trial = two_arm_trial({1.0, 2.0, 3.0, 4.0}, {1.0, 2.0, 3.0, 4.0});
  auto est = estimate_rct_diff(trial, "y");
  CHECK(est.point == 0.0);
  CHECK(est.ci_low < 0.0);
  CHECK(est.ci_high > 0.0);
}

TEST_CASE("rct-diff recovers a known difference within 3 SE") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> y0(1000), y1(1000);
  for (auto& v : y0) v = 5.0 + g(rng);
  for (auto& v : y1) v = 7.0 + g(rng);
  auto est = estimate_rct_diff(two_arm_trial(y0, y1), "y");
  CHECK(std::abs(est.point - 2.0) < 3.0 * est.se);
}

TEST_CASE("om: constant fitted effect is returned for any population") {
  // y = 2 + x + 5a exactly; the per-arm fits interpolate, effect = 5
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g(0.0, 1.0);
  OutcomeData data;
  const int n = 40, m = 25;
  data.xs_trial.resize(n, 1);
  data.y.resize(n);
  data.arm.resize(n);
  for (int i = 0; i < n; ++i) {
    data.xs_trial(i, 0) = g(rng);
    data.arm(i) = i % 2;
    data.y(i) = 2.0 + data.xs_trial(i, 0) + 5.0 * data.arm(i);
  }
  data.xs_target.resize(m, 1);
  for (int i = 0; i < m; ++i) data.xs_target(i, 0) = g(rng) + 2.0;
  data.xo_trial = data.xs_trial;
  data.xo_target = data.xs_target;

  EstimatorSpec om{Method::om};
  CHECK(point_estimate(data, om) == doctest::Approx(5.0).epsilon(1e-10));
  om.targetpop = TargetPop::target_only;
  CHECK(point_estimate(data, om) == doctest::Approx(5.0).epsilon(1e-10));
}

TEST_CASE("om matches the closed-form shifted-population expectation") {
  // effect(x) = 1 + x; target x ~ N(0.5, 1) so the estimand is 1.5
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g(0.0, 1.0);
  const int n = 4000, m = 4000;
  OutcomeData data;
  data.xs_trial.resize(n, 1);
  data.y.resize(n);
  data.arm.resize(n);
  for (int i = 0; i < n; ++i) {
    data.xs_trial(i, 0) = g(rng);
    data.arm(i) = i % 2;
    double x = data.xs_trial(i, 0);
    data.y(i) = x + data.arm(i) * (1.0 + x) + 0.2 * g(rng);
  }
  data.xs_target.resize(m, 1);
  for (int i = 0; i < m; ++i) data.xs_target(i, 0) = 0.5 + g(rng);
  data.xo_trial = data.xs_trial;
  data.xo_target = data.xs_target;

  EstimatorSpec om{Method::om};
  om.targetpop = TargetPop::target_only;
  // 3 MC SEs: target mean noise ~ 1/sqrt(m), fit noise ~ 1/sqrt(n)
  double tol = 3.0 * std::sqrt(1.0 / m + 1.0 / n);
  CHECK(std::abs(point_estimate(data, om) - 1.5) < tol);
}

TEST_CASE("om with an empty target and combined population reduces to the "
          "trial average") {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> g(0.0, 1.0);
  const int n = 30;
  OutcomeData data;
  data.xs_trial.resize(n, 1);
  data.y.resize(n);
  data.arm.resize(n);
  for (int i = 0; i < n; ++i) {
    data.xs_trial(i, 0) = g(rng);
    data.arm(i) = i % 2;
    data.y(i) = 1.0 + 0.5 * data.xs_trial(i, 0) + 2.0 * data.arm(i) + g(rng);
  }
  data.xs_target.resize(0, 1);
  data.xo_trial = data.xs_trial;
  data.xo_target = data.xs_target;

  EstimatorSpec om{Method::om};
  auto fits = fit_nuisance(data, om);
  double direct = fits.outcome.effect(data.xo_trial).mean();
  CHECK(point_estimate(data, om, &fits) ==
        doctest::Approx(direct).epsilon(1e-14));

  om.targetpop = TargetPop::target_only;
  CHECK_THROWS_AS(point_estimate(data, om, &fits), Error);
}

TEST_CASE("ipsw: constant scores reduce to the difference of arm means") {
  auto y = Eigen::VectorXd(6);
  y << 3.0, 5.0, 7.0, 2.0, 4.0, 6.0;
  Eigen::VectorXi arm(6);
  arm << 1, 1, 1, 0, 0, 0;
  Eigen::VectorXd p = Eigen::VectorXd::Constant(6, 6.0 / 24.0);
  Eigen::VectorXd e = Eigen::VectorXd::Constant(6, 0.5);
  double est = ipsw_core(y, arm, p, e, 24, true);
  CHECK(est == doctest::Approx(1.0).epsilon(1e-14));  // 5 - 4
}

TEST_CASE("ipsw matches hand-computed weighted means on a 4-unit toy") {
  Eigen::VectorXd y(4);
  y << 10.0, 20.0, 5.0, 8.0;
  Eigen::VectorXi arm(4);
  arm << 1, 1, 0, 0;
  Eigen::VectorXd p(4), e(4);
  p << 0.5, 0.25, 0.5, 0.2;
  e << 0.5, 0.5, 0.5, 0.75;
  // arm-1 weights: 4, 8      -> Hajek mean (4*10+8*20)/12 = 50/3
  // arm-0 weights: 4, 20     -> Hajek mean (4*5+20*8)/24  = 7.5
  CHECK(ipsw_core(y, arm, p, e, 4, true) ==
        doctest::Approx(50.0 / 3.0 - 7.5).epsilon(1e-14));
  // unnormalized: 200/4 - 180/4 = 5
  CHECK(ipsw_core(y, arm, p, e, 4, false) ==
        doctest::Approx(5.0).epsilon(1e-14));
}

TEST_CASE("aipsw equals om when the outcome models interpolate exactly") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g(0.0, 1.0);
  SimConfig cfg = base_config();
  cfg.noise_sd = 0.0;  // zero residuals
  auto study = generate(cfg, 77);
  auto data = analyst_view(study, cfg);

  EstimatorSpec aipsw{Method::aipsw};
  EstimatorSpec om{Method::om};
  auto fits = fit_nuisance(data, aipsw);
  CHECK(point_estimate(data, aipsw, &fits) ==
        doctest::Approx(point_estimate(data, om, &fits)).epsilon(1e-10));
}

TEST_CASE("aipsw with flat nuisances reduces to the difference of means") {
  std::mt19937_64 rng(13);
  std::normal_distribution<double> g(0.0, 1.0);
  const int n = 50, m = 70;
  Eigen::VectorXd y(n);
  Eigen::VectorXi arm(n);
  int n1 = 0;
  for (int i = 0; i < n; ++i) {
    arm(i) = i % 3 == 0 ? 1 : 0;  // unbalanced arms on purpose
    n1 += arm(i);
    y(i) = g(rng) + 2.0 * arm(i);
  }
  Eigen::VectorXd p = Eigen::VectorXd::Constant(
      n, static_cast<double>(n) / static_cast<double>(n + m));
  Eigen::VectorXd e =
      Eigen::VectorXd::Constant(n, static_cast<double>(n1) / n);
  Eigen::VectorXd g1 = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd g0 = Eigen::VectorXd::Zero(n);

  double est = aipsw_core(y, arm, p, e, g1, g0, 0.0, n + m, true);
  CHECK(est == doctest::Approx(rct_diff_core(y, arm)).epsilon(1e-12));
}

TEST_CASE("location and scale equivariance of every estimator") {
  SimConfig cfg = base_config();
  auto study = generate(cfg, 31);
  auto data = analyst_view(study, cfg);

  for (Method method : {Method::rct_diff, Method::om, Method::ipsw,
                        Method::aipsw}) {
    EstimatorSpec spec;
    spec.method = method;
    double base = point_estimate(data, spec);

    OutcomeData shifted = data;
    shifted.y.array() += 13.5;
    CHECK(point_estimate(shifted, spec) ==
          doctest::Approx(base).epsilon(1e-10));

    OutcomeData scaled = data;
    scaled.y *= 2.5;
    CHECK(point_estimate(scaled, spec) ==
          doctest::Approx(2.5 * base).epsilon(1e-10));
  }
}

TEST_CASE("scale equivariance extends to the bootstrap SE and CI") {
  SimConfig cfg = base_config();
  cfg.n_trial = 120;
  cfg.m_target = 240;
  auto study = generate(cfg, 41);
  auto data = analyst_view(study, cfg);

  EstimatorSpec spec;  // aipsw
  BootstrapOptions boot;
  boot.replicates = 150;
  boot.seed = 99;
  boot.threads = 2;
  auto est = bootstrap_estimate(data, spec, "y", boot);

  OutcomeData scaled = data;
  scaled.y *= 3.0;
  auto est3 = bootstrap_estimate(scaled, spec, "y", boot);
  CHECK(est3.point == doctest::Approx(3.0 * est.point).epsilon(1e-9));
  CHECK(est3.se == doctest::Approx(3.0 * est.se).epsilon(1e-9));
  CHECK(est3.ci_low == doctest::Approx(3.0 * est.ci_low).epsilon(1e-9));
  CHECK(est3.ci_high == doctest::Approx(3.0 * est.ci_high).epsilon(1e-9));
}

TEST_CASE("normalized weighting is invariant to rescaling the raw weights") {
  SimConfig cfg = base_config();
  auto study = generate(cfg, 51);
  auto data = analyst_view(study, cfg);
  EstimatorSpec spec;
  auto fits = fit_nuisance(data, spec);

  Eigen::VectorXd g1 = fits.outcome.treat.predict(data.xo_trial);
  Eigen::VectorXd g0 = fits.outcome.control.predict(data.xo_trial);
  double eff_mean = (fits.outcome.effect(data.xo_trial).sum() +
                     fits.outcome.effect(data.xo_target).sum()) /
                    static_cast<double>(data.n() + data.m());

  double base_ipsw = ipsw_core(data.y, data.arm, fits.p_trial, fits.e_trial,
                               data.n() + data.m(), true);
  double base_aipsw =
      aipsw_core(data.y, data.arm, fits.p_trial, fits.e_trial, g1, g0,
                 eff_mean, data.n() + data.m(), true);

  // scaling all p-hat by 1/c scales the raw weights by c
  Eigen::VectorXd p_scaled = fits.p_trial / 4.0;
  CHECK(ipsw_core(data.y, data.arm, p_scaled, fits.e_trial,
                  data.n() + data.m(), true) ==
        doctest::Approx(base_ipsw).epsilon(1e-12));
  CHECK(aipsw_core(data.y, data.arm, p_scaled, fits.e_trial, g1, g0, eff_mean,
                   data.n() + data.m(), true) ==
        doctest::Approx(base_aipsw).epsilon(1e-12));
}

TEST_CASE("with no selection all estimators agree with the trial contrast") {
  SimConfig cfg = base_config();
  cfg.alpha.setZero();  // exchangeable cohorts
  cfg.n_trial = 400;
  cfg.m_target = 800;
  cfg.seed = 61;

  std::vector<EstimatorSpec> specs(4);
  specs[0].method = Method::rct_diff;
  specs[1].method = Method::om;
  specs[2].method = Method::ipsw;
  specs[3].method = Method::aipsw;

  MCOptions mc;
  mc.replicates = 150;
  mc.threads = 2;
  auto result = run_mc(cfg, specs, mc);
  for (const auto& row : result.rows)
    CHECK(std::abs(row.mean_bias) < 3.0 * row.mcse);
}

TEST_CASE("bootstrap is deterministic across thread counts") {
  SimConfig cfg = base_config();
  cfg.n_trial = 100;
  cfg.m_target = 200;
  auto study = generate(cfg, 71);
  auto data = analyst_view(study, cfg);

  EstimatorSpec spec;
  BootstrapOptions a;
  a.replicates = 200;
  a.seed = 5;
  a.threads = 1;
  BootstrapOptions b = a;
  b.threads = 4;
  auto ea = bootstrap_estimate(data, spec, "y", a);
  auto eb = bootstrap_estimate(data, spec, "y", b);
  CHECK(ea.point == eb.point);
  CHECK(ea.se == eb.se);
  CHECK(ea.ci_low == eb.ci_low);
  CHECK(ea.ci_high == eb.ci_high);
}

TEST_CASE("degenerate constant outcome: SE 0 and point CI") {
  auto trial = two_arm_trial({4.0, 4.0, 4.0, 4.0, 4.0, 4.0},
                             {4.0, 4.0, 4.0, 4.0, 4.0, 4.0});
  StudyDataset target;
  target.schema = trial.schema;
  target.source = Source::target;
  for (int i = 0; i < 20; ++i) {
    UnitRecord r;
    r.covariates = {static_cast<double>(i) / 4.0};
    target.records.push_back(r);
  }
  auto data = make_outcome_data(trial, target, "y");
  BootstrapOptions boot;
  boot.replicates = 120;
  boot.seed = 3;

  EstimatorSpec spec;
  spec.method = Method::rct_diff;  // constant arm means are exact
  auto est = bootstrap_estimate(data, spec, "y", boot);
  CHECK(est.point == 0.0);
  CHECK(est.se == 0.0);
  CHECK(est.ci_low == est.point);
  CHECK(est.ci_high == est.point);

  spec.method = Method::om;  // least-squares jitter only
  est = bootstrap_estimate(data, spec, "y", boot);
  CHECK(std::abs(est.point) < 1e-12);
  CHECK(est.se < 1e-12);
  CHECK(est.ci_high - est.ci_low < 1e-12);
}

TEST_CASE("bootstrap rejects fewer than 100 replicates") {
  SimConfig cfg = base_config();
  auto study = generate(cfg, 81);
  auto data = analyst_view(study, cfg);
  BootstrapOptions boot;
  boot.replicates = 50;
  CHECK_THROWS_AS(bootstrap_estimate(data, EstimatorSpec{}, "y", boot), Error);
}

TEST_CASE("excessive replicate failures raise ReplicateFailure") {
  // a 7-unit trial with p+2 = 3 per-arm minimum: resampling collapses arms
  // often enough to cross the 5% dropped-replicate budget
  auto trial = two_arm_trial({1.0, 2.0, 3.0, 4.0}, {2.0, 3.0, 5.0});
  StudyDataset target;
  target.schema = trial.schema;
  target.source = Source::target;
  for (int i = 0; i < 10; ++i) {
    UnitRecord r;
    r.covariates = {static_cast<double>(i)};
    target.records.push_back(r);
  }
  auto data = make_outcome_data(trial, target, "y");
  BootstrapOptions boot;
  boot.replicates = 300;
  boot.seed = 17;
  try {
    bootstrap_estimate(data, EstimatorSpec{}, "y", boot);
    FAIL("expected ReplicateFailure");
  } catch (const Error& e) {
    CHECK(e.code() == errc::replicate_failure);
    CHECK(e.kind() == ErrorKind::numeric);
  }
}
