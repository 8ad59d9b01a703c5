#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "genrct/errors.hpp"
#include "genrct/pipeline.hpp"

namespace {

using genrct::RunOptions;

std::string default_outdir() {
  const char* env = std::getenv("GENRCT_OUTDIR");
  return env && *env ? env : ".";
}

void add_input_flags(CLI::App* cmd, RunOptions& opt) {
  cmd->add_option("--rct", opt.rct_path, "trial cohort CSV")->required();
  cmd->add_option("--rwd", opt.rwd_path, "target cohort CSV")->required();
  cmd->add_option("--schema", opt.schema_path, "covariate schema file")
      ->required();
  cmd->add_option("--outdir,-o", opt.outdir, "output directory");
  cmd->add_flag("--drop-missing", opt.drop_missing,
                "drop rows with missing cells instead of failing");
  cmd->add_option("--threads", opt.threads,
                  "worker cap (0 = hardware); results do not depend on it");
}

void add_estimate_flags(CLI::App* cmd, RunOptions& opt,
                        std::string& estimator_name, std::string& targetpop,
                        std::string& propensity, std::string& trim_method,
                        std::optional<std::uint64_t>& seed) {
  cmd->add_option("--outcomes", opt.outcomes, "outcome column names")
      ->required()
      ->delimiter(',');
  cmd->add_option("--estimator", estimator_name, "om | ipsw | aipsw")
      ->default_val("aipsw");
  cmd->add_flag("!--no-normalized", opt.normalized,
                "use the unnormalized estimator form");
  cmd->add_option("--targetpop", targetpop, "combined | target-only")
      ->default_val("combined");
  cmd->add_option("--propensity", propensity,
                  "constant | constant:<c> | fitted")
      ->default_val("constant");
  cmd->add_option("--trim-method", trim_method,
                  "sampling-score | covariate-range")
      ->default_val("sampling-score");
  cmd->add_flag("--no-trim", opt.no_trim, "skip support trimming");
  cmd->add_flag("--no-refit", opt.no_refit,
                "reuse the pre-trim sampling fit for the weights");
  cmd->add_option("--truncate", opt.truncate_quantile,
                  "symmetric weight truncation quantile in [0,0.5)");
  cmd->add_option("--B", opt.bootstrap_B, "bootstrap replicates")
      ->default_val(1000);
  cmd->add_option("--seed", seed, "RNG seed (required, no wall-clock default)")
      ->required();
  cmd->add_option("--treatment-name", opt.treatment_name,
                  "label for the treated arm");
  cmd->add_option("--comparator-name", opt.comparator_name,
                  "label for the control arm");
}

void apply_estimate_flags(RunOptions& opt, const std::string& estimator_name,
                          const std::string& targetpop,
                          const std::string& propensity,
                          const std::string& trim_method,
                          const std::optional<std::uint64_t>& seed) {
  opt.estimator = genrct::method_from_name(estimator_name);
  if (targetpop == "combined") {
    opt.targetpop = genrct::TargetPop::combined;
  } else if (targetpop == "target-only") {
    opt.targetpop = genrct::TargetPop::target_only;
  } else {
    genrct::fail(genrct::errc::invalid_argument,
                 "unknown targetpop '" + targetpop + "'");
  }
  if (propensity == "constant") {
    opt.propensity = {genrct::PropensityKind::known_constant, std::nullopt};
  } else if (propensity.rfind("constant:", 0) == 0) {
    opt.propensity = {genrct::PropensityKind::known_constant,
                      std::stod(propensity.substr(9))};
  } else if (propensity == "fitted") {
    opt.propensity = {genrct::PropensityKind::fitted, std::nullopt};
  } else {
    genrct::fail(genrct::errc::invalid_argument,
                 "unknown propensity mode '" + propensity + "'");
  }
  opt.trim_method = genrct::trim_method_from_name(trim_method);
  opt.seed = seed;
}

void add_sensitivity_flags(CLI::App* cmd, RunOptions& opt, std::string& grid) {
  cmd->add_option("--q", opt.q, "bias fraction for the robustness value")
      ->default_val(1.0);
  cmd->add_option("--grid", grid, "contour grid resolution, e.g. 200x200")
      ->default_val("200x200");
  cmd->add_option("--r2-max", opt.r2_max, "R2 axis upper limit, in (0,1)")
      ->default_val(0.95);
}

void apply_grid(RunOptions& opt, const std::string& grid) {
  auto x = grid.find('x');
  genrct::require(x != std::string::npos, genrct::errc::invalid_argument,
                  "grid must look like 200x200");
  opt.grid_nr = std::stoi(grid.substr(0, x));
  opt.grid_nc = std::stoi(grid.substr(x + 1));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"generalize a two-arm trial's comparative effect to a "
               "trial-eligible target population"};
  app.require_subcommand(1);

  RunOptions opt;
  opt.outdir = default_outdir();
  std::string estimator_name = "aipsw";
  std::string targetpop = "combined";
  std::string propensity = "constant";
  std::string trim_method = "sampling-score";
  std::string grid = "200x200";
  std::optional<std::uint64_t> seed;

  auto* cmd_describe = app.add_subcommand(
      "describe", "baseline balance table and covariate box plots");
  add_input_flags(cmd_describe, opt);

  auto* cmd_trim = app.add_subcommand(
      "trim", "restrict the target cohort to the trial's support");
  add_input_flags(cmd_trim, opt);
  std::string trim_only_method = "sampling-score";
  cmd_trim->add_option("--method", trim_only_method,
                       "sampling-score | covariate-range");

  auto* cmd_estimate = app.add_subcommand(
      "estimate", "trial effect and generalized effect with bootstrap CIs");
  add_input_flags(cmd_estimate, opt);
  add_estimate_flags(cmd_estimate, opt, estimator_name, targetpop, propensity,
                     trim_method, seed);

  auto* cmd_sens = app.add_subcommand(
      "sensitivity", "bias contours, robustness values and benchmarking "
                     "for both CI bounds");
  add_input_flags(cmd_sens, opt);
  add_estimate_flags(cmd_sens, opt, estimator_name, targetpop, propensity,
                     trim_method, seed);
  add_sensitivity_flags(cmd_sens, opt, grid);

  auto* cmd_conclude =
      app.add_subcommand("conclude", "map sensitivity verdicts to the "
                                     "comparative conclusion");
  std::string from_path;
  cmd_conclude->add_option("--from", from_path, "sensitivity.json path")
      ->required();
  std::string conclude_outdir = default_outdir();
  cmd_conclude->add_option("--outdir,-o", conclude_outdir, "output directory");
  cmd_conclude->add_option("--treatment-name", opt.treatment_name);
  cmd_conclude->add_option("--comparator-name", opt.comparator_name);

  auto* cmd_all = app.add_subcommand(
      "run-all", "describe, trim, estimate, sensitivity and conclude");
  add_input_flags(cmd_all, opt);
  add_estimate_flags(cmd_all, opt, estimator_name, targetpop, propensity,
                     trim_method, seed);
  add_sensitivity_flags(cmd_all, opt, grid);

  auto* cmd_sim = app.add_subcommand(
      "simulate", "Monte Carlo study of the estimators on synthetic cohorts");
  genrct::SimulateOptions sim;
  sim.outdir = default_outdir();
  cmd_sim->add_option("--config", sim.config_path, "simulation config file")
      ->required();
  cmd_sim->add_option("--reps", sim.replicates, "Monte Carlo replicates")
      ->required();
  std::optional<std::uint64_t> sim_seed;
  cmd_sim->add_option("--seed", sim_seed, "RNG seed (overrides the config)")
      ->required();
  cmd_sim->add_option("--B", sim.bootstrap_B,
                      "bootstrap replicates per MC replicate (0 = off)");
  cmd_sim->add_option("--estimators", sim.estimators, "estimators to run")
      ->delimiter(',');
  cmd_sim->add_flag("--emit-csv", sim.emit_csv,
                    "also write one replicate's cohorts as CSV + schema");
  cmd_sim->add_option("--outdir,-o", sim.outdir, "output directory");
  cmd_sim->add_option("--threads", sim.threads, "worker cap");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 1;
  }

  try {
    if (*cmd_describe) {
      genrct::run_describe(opt);
    } else if (*cmd_trim) {
      opt.trim_method = genrct::trim_method_from_name(trim_only_method);
      genrct::run_trim(opt);
    } else if (*cmd_estimate) {
      apply_estimate_flags(opt, estimator_name, targetpop, propensity,
                           trim_method, seed);
      genrct::run_estimate(opt);
    } else if (*cmd_sens) {
      apply_estimate_flags(opt, estimator_name, targetpop, propensity,
                           trim_method, seed);
      apply_grid(opt, grid);
      genrct::run_sensitivity(opt);
    } else if (*cmd_conclude) {
      opt.outdir = conclude_outdir;
      genrct::run_conclude(from_path, opt);
    } else if (*cmd_all) {
      apply_estimate_flags(opt, estimator_name, targetpop, propensity,
                           trim_method, seed);
      apply_grid(opt, grid);
      genrct::run_all(opt);
    } else if (*cmd_sim) {
      sim.seed = sim_seed;
      genrct::run_simulate(sim);
    }
  } catch (const genrct::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.kind() == genrct::ErrorKind::numeric ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
