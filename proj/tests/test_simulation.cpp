#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "genrct/errors.hpp"
#include "genrct/simulation.hpp"
#include "genrct/stats.hpp"
#include "testutil.hpp"

using namespace genrct;

namespace {

SimConfig tiny() {
  SimConfig cfg;
  cfg.p = 2;
  cfg.mu = Eigen::VectorXd::Zero(2);
  cfg.sigma = Eigen::VectorXd::Ones(2);
  cfg.alpha = Eigen::VectorXd::Zero(3);
  cfg.beta0 = Eigen::VectorXd::Zero(3);
  cfg.beta1 = Eigen::VectorXd::Zero(3);
  cfg.n_trial = 150;
  cfg.m_target = 300;
  cfg.seed = 5;
  return cfg;
}

}  // namespace

TEST_CASE("no selection makes the cohorts exchangeable") {
  SimConfig cfg = tiny();
  cfg.beta1 << 2.0, 1.0, 0.0;  // effect 2 + x1, unconditional mean 2
  auto truth = oracle_truth(cfg, 400000);
  CHECK(std::abs(truth.combined - 2.0) < 4.0 * truth.mc_error + 1e-3);
  CHECK(std::abs(truth.combined - truth.target_only) <
        4.0 * truth.mc_error + 1e-3);
}

TEST_CASE("a constant effect is the truth under any selection") {
  SimConfig cfg = tiny();
  cfg.alpha << -0.5, 1.0, -0.8;  // strong selection
  cfg.beta0 << 1.0, 2.0, 0.5;
  cfg.beta1 << 4.0, 2.0, 0.5;  // beta1 - beta0 = (3, 0, 0)
  auto truth = oracle_truth(cfg, 200000);
  CHECK(truth.combined == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(truth.target_only == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("heterogeneous effect matches the closed-form shifted mean") {
  // effect 1 + x1 with selection on x1: the oracle must reproduce
  // 1 + E[x1 | S] under the mixture, checked against its own MC error
  SimConfig cfg = tiny();
  cfg.alpha << 0.0, 1.2, 0.0;
  cfg.beta1 << 1.0, 1.0, 0.0;
  cfg.n_trial = 1000;
  cfg.m_target = 1000;
  auto truth = oracle_truth(cfg, 1000000);

  // E[x1 | S=1] for x1 ~ N(0,1), S ~ Bern(expit(1.2 x1)): by symmetry
  // E[x1|S=0] = -E[x1|S=1] and the 50:50 mixture mean is 0 -> combined = 1
  CHECK(std::abs(truth.combined - 1.0) < 4.0 * truth.mc_error);
  CHECK(truth.target_only < 1.0);  // target skews to lower x1
}

TEST_CASE("generation is bit-reproducible and validates") {
  SimConfig cfg = tiny();
  cfg.alpha << -1.0, 0.5, 0.5;
  cfg.beta1 << 1.0, 1.0, 0.0;
  auto a = generate(cfg, 123);
  auto b = generate(cfg, 123);
  REQUIRE(a.trial.n() == b.trial.n());
  for (std::size_t i = 0; i < a.trial.n(); ++i) {
    CHECK(a.trial.records[i].covariates == b.trial.records[i].covariates);
    CHECK(a.trial.records[i].outcomes.at("y") ==
          b.trial.records[i].outcomes.at("y"));
  }
  CHECK(a.trial.n() == 150);
  CHECK(a.target.n() == 300);
  auto c = generate(cfg, 124);
  bool all_same = true;
  for (std::size_t i = 0; i < a.trial.n(); ++i)
    if (a.trial.records[i].covariates != c.trial.records[i].covariates)
      all_same = false;
  CHECK_FALSE(all_same);
}

TEST_CASE("binary columns are dichotomized and marked in the schema") {
  SimConfig cfg = tiny();
  cfg.binary_mask = {0, 1};
  cfg.mu << 0.0, 0.7;  // P(x2 = 1) = Phi(0.7) about 0.76
  cfg.beta1 << 1.0, 0.0, 0.0;
  auto study = generate(cfg, 9);
  CHECK(study.trial.schema.entries[1].kind == CovariateKind::binary);
  double ones = 0.0;
  for (const auto& r : study.target.records) {
    CHECK((r.covariates[1] == 0.0 || r.covariates[1] == 1.0));
    ones += r.covariates[1];
  }
  CHECK(ones / static_cast<double>(study.target.n()) ==
        doctest::Approx(0.758).epsilon(0.1));
}

TEST_CASE("oracle truth ignores the misspecification switches") {
  SimConfig cfg = tiny();
  cfg.alpha << -0.5, 0.4, 0.2;
  cfg.alpha_quad = 0.3;
  cfg.beta1 << 1.0, 0.5, 0.0;
  cfg.beta_quad1 = 0.4;
  auto t1 = oracle_truth(cfg, 200000);
  cfg.sampling_wrong = true;
  cfg.outcome_wrong = true;
  auto t2 = oracle_truth(cfg, 200000);
  CHECK(t1.combined == t2.combined);
  CHECK(t1.target_only == t2.target_only);
}

TEST_CASE("analyst view honors the misspecification switches") {
  SimConfig cfg = tiny();
  cfg.alpha << -0.5, 0.4, 0.2;
  cfg.alpha_quad = 0.3;
  cfg.beta1 << 1.0, 0.5, 0.0;
  cfg.beta_quad1 = 0.4;
  auto study = generate(cfg, 31);

  auto both = analyst_view(study, cfg);
  CHECK(both.xs_trial.cols() == 3);  // x1, x2, x1^2
  CHECK(both.xo_trial.cols() == 3);
  CHECK(both.xs_trial(0, 2) ==
        doctest::Approx(both.xs_trial(0, 0) * both.xs_trial(0, 0)));

  cfg.sampling_wrong = true;
  auto sw = analyst_view(study, cfg);
  CHECK(sw.xs_trial.cols() == 2);
  CHECK(sw.xo_trial.cols() == 3);

  cfg.sampling_wrong = false;
  cfg.outcome_wrong = true;
  auto ow = analyst_view(study, cfg);
  CHECK(ow.xs_trial.cols() == 3);
  CHECK(ow.xo_trial.cols() == 2);

  CHECK(analyst_sampling_feature_names(cfg) ==
        std::vector<std::string>{"x1", "x2", "x1_sq"});
}

TEST_CASE("run_mc is deterministic across thread counts") {
  SimConfig cfg = tiny();
  cfg.alpha << -0.8, 0.5, 0.3;
  cfg.beta0 << 0.0, 1.0, 0.5;
  cfg.beta1 << 1.0, 1.5, 0.5;
  cfg.noise_sd = 1.0;

  std::vector<EstimatorSpec> specs(2);
  specs[0].method = Method::om;
  specs[1].method = Method::aipsw;
  MCOptions one;
  one.replicates = 120;
  one.threads = 1;
  MCOptions four = one;
  four.threads = 4;
  auto a = run_mc(cfg, specs, one);
  auto b = run_mc(cfg, specs, four);
  REQUIRE(a.rows.size() == b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(a.rows[i].mean_bias == b.rows[i].mean_bias);
    CHECK(a.rows[i].emp_sd == b.rows[i].emp_sd);
  }
  CHECK(a.truth == b.truth);
}

TEST_CASE("doubling replicates shrinks the MCSE by about 1/sqrt(2)") {
  SimConfig cfg = tiny();
  cfg.alpha << -0.8, 0.5, 0.3;
  cfg.beta0 << 0.0, 1.0, 0.5;
  cfg.beta1 << 1.0, 1.5, 0.5;
  cfg.noise_sd = 1.0;
  std::vector<EstimatorSpec> specs(1);
  specs[0].method = Method::aipsw;

  MCOptions half;
  half.replicates = 300;
  half.threads = 2;
  MCOptions full = half;
  full.replicates = 600;
  auto a = run_mc(cfg, specs, half);
  auto b = run_mc(cfg, specs, full);
  double ratio = b.rows[0].mcse / a.rows[0].mcse;
  CHECK(ratio > 0.7071 * 0.8);
  CHECK(ratio < 0.7071 * 1.2);
}

TEST_CASE("config validation rejects bad inputs") {
  SimConfig cfg = tiny();
  cfg.c = 1.0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = tiny();
  cfg.rho = -0.2;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = tiny();
  cfg.alpha = Eigen::VectorXd::Zero(2);  // wrong length
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = tiny();
  cfg.binary_mask = {1, 0};
  cfg.alpha_quad = 0.5;  // quadratic needs a continuous first covariate
  CHECK_THROWS_AS(cfg.validate(), Error);
}

TEST_CASE("config files parse into validated configs") {
  testutil::TempDir dir("simcfg");
  testutil::write_file(dir.file("sim.toml"),
                       "# demo\n"
                       "p = 2\n"
                       "mu = [0, 0.5]\n"
                       "sigma = [1, 2]\n"
                       "rho = 0.1\n"
                       "alpha = [-1, 0.5, 0.3]\n"
                       "c = 0.4\n"
                       "beta0 = [0, 1, 1]\n"
                       "beta1 = [1, 2, 1]\n"
                       "noise_sd = 1.5\n"
                       "n_trial = 111\n"
                       "m_target = 222\n"
                       "sampling_wrong = true\n"
                       "seed = 77\n");
  auto cfg = SimConfig::from_file(dir.file("sim.toml"));
  CHECK(cfg.p == 2);
  CHECK(cfg.mu(1) == 0.5);
  CHECK(cfg.sigma(1) == 2.0);
  CHECK(cfg.alpha(2) == 0.3);
  CHECK(cfg.c == 0.4);
  CHECK(cfg.n_trial == 111);
  CHECK(cfg.sampling_wrong);
  CHECK(cfg.seed == 77);

  testutil::write_file(dir.file("bad.toml"), "p = 2\nwhatever = 3\n");
  CHECK_THROWS_AS(SimConfig::from_file(dir.file("bad.toml")), Error);
}

TEST_CASE("the hidden confounder dial shifts the analyst's estimate") {
  SimConfig cfg = tiny();
  cfg.p = 3;
  cfg.mu = Eigen::VectorXd::Zero(3);
  cfg.sigma = Eigen::VectorXd::Ones(3);
  cfg.alpha = Eigen::VectorXd::Zero(4);
  cfg.alpha << -1.0, 0.5, 0.4, 0.3;
  cfg.beta0 = Eigen::VectorXd::Zero(4);
  cfg.beta0 << 0.0, 1.0, 1.0, 0.5;
  cfg.beta1 = Eigen::VectorXd::Zero(4);
  cfg.beta1 << 1.0, 1.0, 1.0, 0.5;
  cfg.n_trial = 800;
  cfg.m_target = 1600;
  cfg.hidden_twin = 2;
  cfg.hidden_rho = 0.6;

  std::vector<EstimatorSpec> specs(1);
  specs[0].method = Method::aipsw;
  MCOptions mc;
  mc.replicates = 150;
  mc.threads = 2;

  cfg.hidden_strength = 0.0;
  auto off = run_mc(cfg, specs, mc);
  CHECK(std::abs(off.rows[0].mean_bias) < 3.0 * off.rows[0].mcse);

  cfg.hidden_strength = 1.2;  // violates mean generalizability
  auto on = run_mc(cfg, specs, mc);
  CHECK(std::abs(on.rows[0].mean_bias) > 5.0 * on.rows[0].mcse);
}
