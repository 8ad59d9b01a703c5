#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdlib>
#include <fstream>

#include "doctest.h"
#include "genrct/dataset.hpp"
#include "genrct/jsonio.hpp"
#include "genrct/pipeline.hpp"
#include "genrct/simulation.hpp"
#include "testutil.hpp"

using namespace genrct;

namespace {

struct ExecResult {
  int code;
  std::string err;
};

ExecResult run_cli(const std::string& args, const std::string& errfile) {
  std::string cmd = std::string(GENRCT_CLI_PATH) + " " + args +
                    " >/dev/null 2>" + errfile;
  int status = std::system(cmd.c_str());
  return {WEXITSTATUS(status), testutil::read_file(errfile)};
}

// writes a small synthetic study (one outcome) and returns the directory
void emit_study(const testutil::TempDir& dir, int n = 150, int m = 300,
                std::uint64_t seed = 21) {
  SimConfig cfg;
  cfg.p = 3;
  cfg.mu = Eigen::VectorXd::Zero(3);
  cfg.sigma = Eigen::VectorXd::Ones(3);
  cfg.binary_mask = {0, 0, 1};
  cfg.alpha = Eigen::VectorXd::Zero(4);
  cfg.alpha << -1.0, 0.5, 0.3, 0.2;
  cfg.beta0 = Eigen::VectorXd::Zero(4);
  cfg.beta0 << 0.0, 1.0, 0.7, 0.4;
  cfg.beta1 = Eigen::VectorXd::Zero(4);
  cfg.beta1 << 1.0, 1.6, 0.7, 0.4;
  cfg.noise_sd = 1.0;
  cfg.n_trial = n;
  cfg.m_target = m;
  cfg.seed = seed;
  auto study = generate(cfg);
  write_csv(study.trial, dir.file("trial.csv"));
  write_csv(study.target, dir.file("rwd.csv"));
  testutil::write_file(dir.file("schema.txt"), study.trial.schema.to_text());
}

}  // namespace

TEST_CASE("run-all emits the full artifact set with exit code 0") {
  testutil::TempDir dir("cli");
  emit_study(dir);
  auto r = run_cli("run-all --rct " + dir.file("trial.csv") + " --rwd " +
                       dir.file("rwd.csv") + " --schema " +
                       dir.file("schema.txt") +
                       " --outcomes y --B 200 --seed 42 -o " +
                       dir.file("out"),
                   dir.file("err.txt"));
  CHECK(r.code == 0);

  for (const char* name :
       {"report.json", "forest.svg", "forest.csv", "contour_lower.svg",
        "contour_upper.svg", "contour_lower.csv", "contour_upper.csv",
        "balance.json", "balance.txt", "trim.json", "trimmed_rwd.csv",
        "estimates.json", "sensitivity.json", "conclusions.json",
        "boxplot.svg", "boxplot.csv"}) {
    INFO(name);
    CHECK(std::filesystem::exists(dir.file("out/" + std::string(name))));
  }

  auto report = json::parse(testutil::read_file(dir.file("out/report.json")));
  CHECK(report["schema_version"] == "1");
  CHECK(report["meta"]["seed"] == 42);
  CHECK(report["estimates"].size() == 2);  // rct-diff + aipsw
  CHECK(report["sensitivity"].size() == 1);
  CHECK(report["conclusions"].size() == 1);
  CHECK(report["meta"]["config"]["estimator"] == "aipsw");

  // every emitted figure has a sidecar with the plotted numbers
  auto forest = testutil::read_file(dir.file("out/forest.csv"));
  CHECK(forest.find("outcome,method,point,ci_low,ci_high") !=
        std::string::npos);
  CHECK(forest.find("rct-diff") != std::string::npos);
  auto contour = testutil::read_file(dir.file("out/contour_lower.csv"));
  CHECK(contour.find("r2,rho2,bias,is_killer") != std::string::npos);
}

TEST_CASE("identical argv and inputs give byte-identical artifacts") {
  testutil::TempDir dir("det");
  emit_study(dir);
  std::string base = "run-all --rct " + dir.file("trial.csv") + " --rwd " +
                     dir.file("rwd.csv") + " --schema " +
                     dir.file("schema.txt") +
                     " --outcomes y --B 150 --seed 7 --grid 60x60 -o ";
  CHECK(run_cli(base + dir.file("a"), dir.file("e1")).code == 0);
  CHECK(run_cli(base + dir.file("b"), dir.file("e2")).code == 0);
  for (const auto& entry :
       std::filesystem::directory_iterator(dir.file("a"))) {
    auto name = entry.path().filename().string();
    INFO(name);
    CHECK(testutil::read_file(dir.file("a/" + name)) ==
          testutil::read_file(dir.file("b/" + name)));
  }
}

TEST_CASE("missing --seed on estimate exits 1 with a usage message") {
  testutil::TempDir dir("seed");
  emit_study(dir);
  auto r = run_cli("estimate --rct " + dir.file("trial.csv") + " --rwd " +
                       dir.file("rwd.csv") + " --schema " +
                       dir.file("schema.txt") + " --outcomes y -o " +
                       dir.file("out"),
                   dir.file("err.txt"));
  CHECK(r.code == 1);
  CHECK(r.err.find("--seed") != std::string::npos);
}

TEST_CASE("validation failures exit 1, numerical failures exit 2") {
  testutil::TempDir dir("codes");
  emit_study(dir);

  SUBCASE("missing input file") {
    auto r = run_cli("describe --rct /nonexistent.csv --rwd " +
                         dir.file("rwd.csv") + " --schema " +
                         dir.file("schema.txt") + " -o " + dir.file("out"),
                     dir.file("err.txt"));
    CHECK(r.code == 1);
  }
  SUBCASE("separated cohorts are a numerical failure") {
    // target far outside the trial's covariate support: the pooled
    // sampling model is perfectly separated
    auto trial = ingest(dir.file("trial.csv"),
                        CovariateSchema::load(dir.file("schema.txt")),
                        Source::trial)
                     .dataset;
    StudyDataset target;
    target.schema = trial.schema;
    target.source = Source::target;
    for (int i = 0; i < 50; ++i) {
      UnitRecord r;
      r.covariates = {100.0 + i, 50.0, 1.0};
      target.records.push_back(r);
    }
    write_csv(target, dir.file("far.csv"));
    auto r = run_cli("run-all --rct " + dir.file("trial.csv") + " --rwd " +
                         dir.file("far.csv") + " --schema " +
                         dir.file("schema.txt") +
                         " --outcomes y --B 150 --seed 3 -o " +
                         dir.file("out2"),
                     dir.file("err.txt"));
    CHECK(r.code == 2);
    CHECK(r.err.find("Separation") != std::string::npos);
  }
}

TEST_CASE("simulate emits mc_result with one row per estimator") {
  testutil::TempDir dir("sim");
  testutil::write_file(dir.file("sim.toml"),
                       "p = 2\n"
                       "alpha = [-1, 0.5, 0.3]\n"
                       "beta0 = [0, 1, 1]\n"
                       "beta1 = [1, 2, 1]\n"
                       "noise_sd = 1\n"
                       "n_trial = 120\n"
                       "m_target = 240\n"
                       "seed = 1\n");
  auto r = run_cli("simulate --config " + dir.file("sim.toml") +
                       " --reps 100 --seed 7 --emit-csv -o " + dir.file("out"),
                   dir.file("err.txt"));
  CHECK(r.code == 0);
  auto doc =
      json::parse(testutil::read_file(dir.file("out/mc_result.json")));
  REQUIRE(doc["rows"].size() == 3);
  CHECK(doc["rows"][0]["estimator"] == "om");
  CHECK(doc["rows"][1]["estimator"] == "ipsw");
  CHECK(doc["rows"][2]["estimator"] == "aipsw");
  CHECK(doc["meta"]["seed"] == 7);  // CLI seed overrides the config
  for (const char* name : {"mc_result.txt", "trial.csv", "rwd.csv",
                           "schema.txt"})
    CHECK(std::filesystem::exists(dir.file("out/" + std::string(name))));
}

TEST_CASE("conclude maps a sensitivity file to conclusions") {
  testutil::TempDir dir("conc");
  emit_study(dir);
  std::string common = " --rct " + dir.file("trial.csv") + " --rwd " +
                       dir.file("rwd.csv") + " --schema " +
                       dir.file("schema.txt") +
                       " --outcomes y --B 150 --seed 11 -o " + dir.file("out");
  CHECK(run_cli("sensitivity" + common + " --grid 50x50", dir.file("e1"))
            .code == 0);
  auto r = run_cli("conclude --from " + dir.file("out/sensitivity.json") +
                       " -o " + dir.file("out2") +
                       " --treatment-name sxc --comparator-name losartan",
                   dir.file("e2"));
  CHECK(r.code == 0);
  auto doc =
      json::parse(testutil::read_file(dir.file("out2/conclusions.json")));
  REQUIRE(doc["conclusions"].size() == 1);
  auto sentence = doc["conclusions"][0]["sentence"].get<std::string>();
  CHECK(sentence.find("sxc") != std::string::npos);
  CHECK(sentence.find("losartan") != std::string::npos);
}

TEST_CASE("an eight-outcome run yields eight conclusions") {
  testutil::TempDir dir("eight");
  SimConfig cfg;
  cfg.p = 2;
  cfg.mu = Eigen::VectorXd::Zero(2);
  cfg.sigma = Eigen::VectorXd::Ones(2);
  cfg.alpha = Eigen::VectorXd::Zero(3);
  cfg.alpha << -1.0, 0.5, 0.3;
  cfg.beta0 = Eigen::VectorXd::Zero(3);
  cfg.beta0 << 0.0, 1.0, 0.6;
  cfg.beta1 = Eigen::VectorXd::Zero(3);
  cfg.beta1 << 1.0, 1.4, 0.6;
  cfg.noise_sd = 1.0;
  cfg.n_trial = 150;
  cfg.m_target = 300;
  cfg.seed = 77;
  auto study = generate(cfg);

  // replicate the single outcome into 2 measures x 4 visit weeks
  StudyDataset trial = study.trial;
  trial.outcome_names.clear();
  std::vector<std::string> outcomes;
  for (const char* meas : {"dsbp", "ddbp"})
    for (int week : {2, 4, 6, 8})
      outcomes.push_back(std::string(meas) + "_" + std::to_string(week) + "w");
  for (auto& name : outcomes) trial.outcome_names.push_back(name);
  for (std::size_t i = 0; i < trial.records.size(); ++i) {
    double y = trial.records[i].outcomes.at("y");
    trial.records[i].outcomes.clear();
    int k = 0;
    for (auto& name : outcomes)
      trial.records[i].outcomes[name] = y + 0.05 * k++;
  }
  write_csv(trial, dir.file("trial.csv"));
  write_csv(study.target, dir.file("rwd.csv"));
  testutil::write_file(dir.file("schema.txt"), trial.schema.to_text());

  std::string names;
  for (std::size_t i = 0; i < outcomes.size(); ++i)
    names += (i ? "," : "") + outcomes[i];
  auto r = run_cli("run-all --rct " + dir.file("trial.csv") + " --rwd " +
                       dir.file("rwd.csv") + " --schema " +
                       dir.file("schema.txt") + " --outcomes " + names +
                       " --B 120 --grid 40x40 --seed 5 -o " + dir.file("out"),
                   dir.file("err.txt"));
  CHECK(r.code == 0);
  auto report = json::parse(testutil::read_file(dir.file("out/report.json")));
  CHECK(report["conclusions"].size() == 8);
  CHECK(report["estimates"].size() == 16);
  // multi-outcome contours carry the outcome in the name
  CHECK(std::filesystem::exists(dir.file("out/contour_lower_dsbp_8w.svg")));
}

TEST_CASE("GENRCT_OUTDIR provides the default output directory") {
  testutil::TempDir dir("env");
  emit_study(dir);
  std::string cmd = std::string("GENRCT_OUTDIR=") + dir.file("envout") + " " +
                    GENRCT_CLI_PATH + " describe --rct " +
                    dir.file("trial.csv") + " --rwd " + dir.file("rwd.csv") +
                    " --schema " + dir.file("schema.txt") +
                    " >/dev/null 2>/dev/null";
  CHECK(WEXITSTATUS(std::system(cmd.c_str())) == 0);
  CHECK(std::filesystem::exists(dir.file("envout/balance.json")));
}

TEST_CASE("build_report marks absent sections as null") {
  json meta = {{"tool", "genrct"}};
  json estimates = json::array();
  estimates.push_back({{"method", "aipsw"}, {"outcome", "y"}});
  auto report = build_report(meta, json(), json(), estimates, json::array(),
                             json(), json(), {"estimates.json"});
  CHECK(report["sensitivity"].is_null());
  CHECK(report["conclusions"].is_null());
  CHECK(report["estimates"].size() == 1);
  CHECK(report["schema_version"] == "1");
}

TEST_CASE("library-level minimal run: estimate without sensitivity") {
  testutil::TempDir dir("lib");
  emit_study(dir);
  RunOptions opt;
  opt.rct_path = dir.file("trial.csv");
  opt.rwd_path = dir.file("rwd.csv");
  opt.schema_path = dir.file("schema.txt");
  opt.outdir = dir.file("out");
  opt.outcomes = {"y"};
  opt.bootstrap_B = 150;
  opt.seed = 13;
  auto doc = run_estimate(opt);
  CHECK(doc["estimates"].size() == 2);
  CHECK(doc["estimates"][1]["method"] == "aipsw");
  double lo = doc["estimates"][1]["ci_low"].get<double>();
  double hi = doc["estimates"][1]["ci_high"].get<double>();
  double pt = doc["estimates"][1]["point"].get<double>();
  CHECK(lo <= pt);
  CHECK(pt <= hi);
}
