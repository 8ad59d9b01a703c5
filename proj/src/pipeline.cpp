#include "genrct/pipeline.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <sstream>

#include "genrct/decision.hpp"
#include "genrct/errors.hpp"
#include "genrct/parallel.hpp"
#include "genrct/sensitivity.hpp"
#include "genrct/stats.hpp"
#include "genrct/svg.hpp"

namespace genrct {

namespace fs = std::filesystem;

namespace {

std::string sanitize(const std::string& name) {
  std::string out;
  for (char c : name)
    out += (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-')
               ? c
               : '_';
  return out;
}

json estimate_json(const Estimate& e) {
  json j;
  j["method"] = method_name(e.method);
  j["outcome"] = e.outcome;
  j["point"] = json_number(e.point);
  j["se"] = json_number(e.se);
  j["ci_low"] = json_number(e.ci_low);
  j["ci_high"] = json_number(e.ci_high);
  j["B"] = e.replicates;
  j["seed"] = e.seed;
  j["normalized"] = e.normalized;
  j["target"] = e.target == TargetPop::combined ? "combined" : "target-only";
  j["dropped_replicates"] = e.dropped_replicates;
  return j;
}

json balance_json(const BalanceTable& table) {
  json j;
  j["n_treatment"] = table.n_treat;
  j["n_control"] = table.n_control;
  j["n_trial"] = table.n_trial;
  j["n_target"] = table.n_target;
  j["rows"] = json::array();
  for (const auto& r : table.rows) {
    json row;
    row["covariate"] = r.covariate;
    row["kind"] = r.kind == CovariateKind::continuous ? "continuous" : "binary";
    row["treatment"] = {{"mean", json_number(r.mean_treat)},
                        {"sd", json_number(r.sd_treat)}};
    row["control"] = {{"mean", json_number(r.mean_control)},
                      {"sd", json_number(r.sd_control)}};
    row["trial"] = {{"mean", json_number(r.mean_trial)},
                    {"sd", json_number(r.sd_trial)}};
    row["target"] = {{"mean", json_number(r.mean_target)},
                     {"sd", json_number(r.sd_target)}};
    row["test"] = r.test;
    row["statistic"] = json_number(r.statistic);
    row["p_value"] = json_number(r.p_value);
    j["rows"].push_back(row);
  }
  return j;
}

json trim_json(const TrimReport& report) {
  json j;
  j["method"] = trim_method_name(report.method);
  j["target_before"] = report.target_before;
  j["target_after"] = report.target_after;
  if (report.method == TrimMethod::sampling_score) {
    j["score_min"] = json_number(report.score_min);
    j["score_max"] = json_number(report.score_max);
    j["dropped_below"] = report.dropped_below;
    j["dropped_above"] = report.dropped_above;
    if (report.sampling_fit) {
      json coef = json::array();
      for (Eigen::Index i = 0; i < report.sampling_fit->coefficients.size();
           ++i)
        coef.push_back(json_number(report.sampling_fit->coefficients(i)));
      j["sampling_fit"] = {{"coefficients", coef},
                           {"converged", report.sampling_fit->converged},
                           {"iterations", report.sampling_fit->iterations}};
    }
  } else {
    j["dropped_by_covariate"] = json::object();
    for (const auto& [name, count] : report.dropped_by_covariate)
      j["dropped_by_covariate"][name] = count;
  }
  return j;
}

json benchmark_json(const BenchmarkRow& r) {
  json j;
  j["covariate"] = r.covariate;
  if (r.failed) {
    j["failed"] = true;
    j["note"] = r.note;
    return j;
  }
  j["r2"] = json_number(r.r2);
  j["rho"] = json_number(r.rho);
  j["bias"] = json_number(r.bias);
  j["mrcs"] = json_number(r.mrcs);
  j["k_sigma_min"] = json_number(r.k_sigma_min);
  j["k_rho_min"] = json_number(r.k_rho_min);
  return j;
}

json logistic_json(const LogisticFit& fit) {
  json coef = json::array();
  for (Eigen::Index i = 0; i < fit.coefficients.size(); ++i)
    coef.push_back(json_number(fit.coefficients(i)));
  return {{"coefficients", coef},
          {"converged", fit.converged},
          {"iterations", fit.iterations},
          {"max_abs_score", json_number(fit.max_abs_score)}};
}

json ols_json(const OlsFit& fit) {
  json coef = json::array();
  for (Eigen::Index i = 0; i < fit.coefficients.size(); ++i)
    coef.push_back(json_number(fit.coefficients(i)));
  return {{"coefficients", coef},
          {"residual_variance", json_number(fit.residual_variance)}};
}

// Holds loaded inputs and staged results shared by the subcommands.
class Workflow {
 public:
  explicit Workflow(const RunOptions& options) : opt_(options) {
    fs::create_directories(opt_.outdir);
    schema_ = CovariateSchema::load(opt_.schema_path);
    IngestOptions ingest_opts{opt_.drop_missing};
    auto trial_in = ingest(opt_.rct_path, schema_, Source::trial, ingest_opts);
    auto target_in =
        ingest(opt_.rwd_path, schema_, Source::target, ingest_opts);
    trial_ = std::move(trial_in.dataset);
    target_raw_ = std::move(target_in.dataset);
    dropped_rows_ = trial_in.rows_dropped + target_in.rows_dropped;
    analysis_target_ = target_raw_;
  }

  json meta(const char* command) const {
    json m;
    m["tool"] = kToolName;
    m["version"] = kToolVersion;
    m["report_schema_version"] = kReportSchemaVersion;
    m["command"] = command;
    if (opt_.seed)
      m["seed"] = *opt_.seed;
    else
      m["seed"] = nullptr;
    m["inputs"] = {{"rct", opt_.rct_path},
                   {"rwd", opt_.rwd_path},
                   {"schema", opt_.schema_path}};
    m["dropped_rows"] = dropped_rows_;
    m["config"] = opt_.describe();
    return m;
  }

  std::string path(const std::string& name) {
    files_.push_back(name);
    return (fs::path(opt_.outdir) / name).string();
  }

  void write_json(const std::string& name, const json& doc) {
    write_text_file(path(name), doc.dump(2) + "\n");
  }
  void write_txt(const std::string& name, const char* command,
                 const std::string& body) {
    std::string header = std::string("# ") + kToolName + " " + kToolVersion +
                         " " + command + seed_suffix() + "\n";
    write_text_file(path(name), header + body);
  }
  void write_svg(const std::string& name, const char* command,
                 const std::string& body) {
    std::string header = std::string("<!-- ") + kToolName + " " +
                         kToolVersion + " " + command + seed_suffix() +
                         " -->\n";
    write_text_file(path(name), header + body);
  }
  void write_csv(const std::string& name, const std::string& body) {
    std::string header = std::string("# ") + kToolName + " " + kToolVersion +
                         seed_suffix() + "\n";
    write_text_file(path(name), header + body);
  }

  std::string seed_suffix() const {
    return opt_.seed ? " seed=" + std::to_string(*opt_.seed) : "";
  }

  // --- describe ---
  json describe(const char* command) {
    BalanceTable table = balance_table(trial_, target_raw_);
    json doc;
    doc["meta"] = meta(command);
    doc["balance"] = balance_json(table);
    write_json("balance.json", doc);
    write_txt("balance.txt", command, table.to_text());

    std::vector<BoxStats> boxes;
    for (std::size_t j = 0; j < schema_.size(); ++j) {
      if (schema_.entries[j].kind != CovariateKind::continuous) continue;
      auto five = [](std::vector<double> v) {
        return std::array<double, 5>{
            *std::min_element(v.begin(), v.end()), quantile(v, 0.25),
            quantile(v, 0.5), quantile(v, 0.75),
            *std::max_element(v.begin(), v.end())};
      };
      for (const auto* ds : {&trial_, &target_raw_}) {
        auto f = five(ds->covariate_column(j));
        boxes.push_back({schema_.entries[j].name,
                         ds->source == Source::trial ? "trial" : "target",
                         f[0], f[1], f[2], f[3], f[4]});
      }
    }
    if (!boxes.empty()) {
      write_svg("boxplot.svg", command,
                boxplot_svg(boxes, "baseline continuous covariates"));
      write_csv("boxplot.csv", boxplot_csv(boxes));
    }
    balance_ = doc["balance"];
    return doc;
  }

  // --- trim ---
  json trim(const char* command) {
    TrimResult result = trim_to_support(trial_, target_raw_, opt_.trim_method);
    analysis_target_ = result.target;
    trim_report_ = result.report;

    json doc;
    doc["meta"] = meta(command);
    doc["trim"] = trim_json(result.report);
    write_json("trim.json", doc);
    write_txt("trim.txt", command, result.report.to_text());
    write_csv("trimmed_rwd.csv", to_csv(analysis_target_));
    trimmed_ = true;
    return doc;
  }

  void ensure_trimmed() {
    if (opt_.no_trim || trimmed_) return;
    trim("trim");
  }

  // --- estimate ---
  struct OutcomeAnalysis {
    std::string outcome;
    OutcomeData data;
    FittedNuisance fits;
    Estimate rct;
    Estimate gen;
  };

  EstimatorSpec spec() const {
    EstimatorSpec s;
    s.method = opt_.estimator;
    s.normalized = opt_.normalized;
    s.targetpop = opt_.targetpop;
    s.propensity = opt_.propensity;
    s.truncate_quantile = opt_.truncate_quantile;
    return s;
  }

  // sensitivity needs sampling scores and the propensity whatever the
  // chosen estimator, so the cached fit always covers all three models
  EstimatorSpec nuisance_spec() const {
    EstimatorSpec s = spec();
    s.method = Method::aipsw;
    return s;
  }

  const std::vector<OutcomeAnalysis>& analyses() {
    if (!analyses_.empty()) return analyses_;
    require(!opt_.outcomes.empty(), errc::invalid_argument,
            "no outcomes requested");
    require(opt_.seed.has_value(), errc::invalid_argument,
            "a seed is required for the bootstrap");
    require(opt_.estimator != Method::rct_diff, errc::invalid_argument,
            "choose a generalizing estimator (om, ipsw or aipsw)");
    ensure_trimmed();

    for (std::size_t k = 0; k < opt_.outcomes.size(); ++k) {
      OutcomeAnalysis a;
      a.outcome = opt_.outcomes[k];
      a.data = make_outcome_data(trial_, analysis_target_, a.outcome);
      a.rct = estimate_rct_diff(trial_, a.outcome);

      BootstrapOptions boot;
      boot.replicates = opt_.bootstrap_B;
      boot.seed = derive_seed(*opt_.seed, k);
      boot.threads = opt_.threads;
      a.gen = bootstrap_estimate(a.data, spec(), a.outcome, boot);

      if (opt_.no_refit && trim_report_ && trim_report_->sampling_fit) {
        // weights and the reported point reuse the pre-trim sampling fit
        a.fits = fit_nuisance(a.data, nuisance_spec());
        a.fits.sampling = *trim_report_->sampling_fit;
        a.fits.p_trial = a.fits.sampling.predict(a.data.xs_trial);
        a.gen.point = point_estimate(a.data, spec(), &a.fits);
      } else {
        a.fits = fit_nuisance(a.data, nuisance_spec());
      }
      analyses_.push_back(std::move(a));
    }
    return analyses_;
  }

  json estimate(const char* command) {
    json rows = json::array();
    std::vector<ForestEntry> forest;
    for (const auto& a : analyses()) {
      rows.push_back(estimate_json(a.rct));
      rows.push_back(estimate_json(a.gen));
      forest.push_back(
          {a.outcome, "rct-diff", a.rct.point, a.rct.ci_low, a.rct.ci_high});
      forest.push_back({a.outcome, method_name(a.gen.method), a.gen.point,
                        a.gen.ci_low, a.gen.ci_high});
      json fits;
      fits["outcome"] = a.outcome;
      fits["sampling"] = logistic_json(a.fits.sampling);
      fits["propensity"] =
          a.fits.propensity.is_constant()
              ? json{{"mode", "known-constant"},
                     {"c", json_number(a.fits.propensity.constant())}}
              : json{{"mode", "fitted"},
                     {"fit", logistic_json(*a.fits.propensity.fit())}};
      fits["outcome_model"] = {{"control", ols_json(a.fits.outcome.control)},
                               {"treatment", ols_json(a.fits.outcome.treat)}};
      fits["low_sampling_scores"] = a.fits.low_score_flags;
      model_docs_.push_back(fits);
    }

    json doc;
    doc["meta"] = meta(command);
    doc["estimates"] = rows;
    doc["models"] = model_docs_;
    write_json("estimates.json", doc);
    write_svg("forest.svg", command,
              forest_svg(forest, "trial effect vs generalized effect"));
    write_csv("forest.csv", forest_csv(forest));
    estimates_ = rows;
    return doc;
  }

  // --- sensitivity ---
  json sensitivity(const char* command) {
    json out = json::array();
    bool single = opt_.outcomes.size() == 1;
    for (const auto& a : analyses()) {
      WeightSet weights =
          participation_weights(a.fits.p_trial, opt_.truncate_quantile);
      SensitivityContext ctx = make_sensitivity_context(
          a.data.y, a.data.arm, a.fits.e_trial, weights, a.gen.point);

      std::vector<std::string> names;
      for (const auto& e : schema_.entries) names.push_back(e.name);
      Eigen::MatrixXd xs_combined = a.data.xs_combined();
      BenchmarkInputs inputs{xs_combined, a.data.n(), names, weights,
                             opt_.truncate_quantile, opt_.threads};
      auto strengths = covariate_strengths(inputs, ctx);

      json entry;
      entry["outcome"] = a.outcome;
      entry["estimator"] = method_name(a.gen.method);
      entry["point"] = json_number(a.gen.point);
      entry["ci_low"] = json_number(a.gen.ci_low);
      entry["ci_high"] = json_number(a.gen.ci_high);
      entry["var_w"] = json_number(ctx.var_w);
      entry["sigma_xi"] = json_number(ctx.sigma_xi);
      entry["q"] = opt_.q;
      entry["rv_point"] = json_number(
          a.gen.point == 0.0
              ? 0.0
              : robustness_value(opt_.q, a.gen.point, ctx));
      entry["xi_definition"] = "pseudo-effect minus point estimate";
      entry["weight_error_reference"] = "full-model weights";
      entry["bounds"] = json::array();

      for (const char* which : {"lower", "upper"}) {
        double value =
            std::string(which) == "lower" ? a.gen.ci_low : a.gen.ci_high;
        json b;
        b["bound"] = which;
        b["value"] = json_number(value);
        if (value == 0.0) {
          b["degenerate"] = true;
          entry["bounds"].push_back(b);
          continue;
        }
        auto rows = benchmark_rows(strengths, ctx, value);
        auto verdict = assess_bound(value, rows);
        b["rv"] = json_number(robustness_value(opt_.q, value, ctx));
        b["robust"] = verdict.robust;
        b["rule"] = verdict.rule;
        if (verdict.offending)
          b["offending"] = benchmark_json(*verdict.offending);
        b["benchmarks"] = json::array();
        for (const auto& row : rows)
          b["benchmarks"].push_back(benchmark_json(row));

        ContourGrid grid = contour_grid(ctx, value, opt_.grid_nr, opt_.grid_nc,
                                        opt_.r2_max, strengths);
        std::string stem = std::string("contour_") + which +
                           (single ? "" : "_" + sanitize(a.outcome));
        write_csv(stem + ".csv", grid.to_csv());
        write_svg(stem + ".svg", command,
                  contour_svg(grid, strengths,
                              a.outcome + " " + which + " bound bias"));
        b["grid_csv"] = stem + ".csv";
        b["grid_svg"] = stem + ".svg";
        entry["bounds"].push_back(b);

        write_txt(std::string("benchmark_") + which +
                      (single ? "" : "_" + sanitize(a.outcome)) + ".txt",
                  command,
                  benchmark_text(rows, robustness_value(opt_.q, value, ctx)));
      }
      out.push_back(entry);
    }

    json doc;
    doc["meta"] = meta(command);
    doc["sensitivity"] = out;
    write_json("sensitivity.json", doc);
    sensitivity_ = out;
    return doc;
  }

  // --- conclude ---
  json conclude_stage(const json& sensitivity_entries, const char* command) {
    json out = json::array();
    for (const auto& entry : sensitivity_entries) {
      json c;
      c["outcome"] = entry["outcome"];
      bool degenerate = false;
      BoundStatus lower{}, upper{};
      for (const auto& b : entry["bounds"]) {
        if (b.contains("degenerate") && b["degenerate"].get<bool>()) {
          degenerate = true;
          continue;
        }
        BoundStatus status;
        status.sign = b["value"].get<double>() > 0.0 ? Sign::positive
                                                     : Sign::negative;
        status.robust = b["robust"].get<bool>();
        (b["bound"] == "lower" ? lower : upper) = status;
      }
      Conclusion concl;
      if (degenerate) {
        concl = Conclusion::Indeterminate;
        c["diagnostic"] = "a confidence bound is exactly zero";
      } else {
        concl = conclude(lower, upper);
        c["lower"] = {{"sign", lower.sign == Sign::positive ? "+" : "-"},
                      {"robust", lower.robust}};
        c["upper"] = {{"sign", upper.sign == Sign::positive ? "+" : "-"},
                      {"robust", upper.robust}};
      }
      c["conclusion"] = conclusion_name(concl);
      c["sentence"] = conclusion_sentence(concl, opt_.treatment_name,
                                          opt_.comparator_name);
      out.push_back(c);
    }

    json doc;
    doc["meta"] = meta(command);
    doc["conclusions"] = out;
    write_json("conclusions.json", doc);
    std::ostringstream text;
    for (const auto& c : out)
      text << c["outcome"].get<std::string>() << ": "
           << c["conclusion"].get<std::string>() << " - "
           << c["sentence"].get<std::string>() << "\n";
    write_txt("conclusions.txt", command, text.str());
    conclusions_ = out;
    return doc;
  }

  json report(const char* command) {
    json doc = build_report(meta(command), balance_,
                            trim_report_ ? trim_json(*trim_report_) : json(),
                            estimates_, model_docs_, sensitivity_,
                            conclusions_, files_);
    write_text_file((fs::path(opt_.outdir) / "report.json").string(),
                    doc.dump(2) + "\n");
    return doc;
  }

  const json& sensitivity_entries() const { return sensitivity_; }

 private:
  RunOptions opt_;
  CovariateSchema schema_;
  StudyDataset trial_;
  StudyDataset target_raw_;
  StudyDataset analysis_target_;
  std::size_t dropped_rows_ = 0;
  bool trimmed_ = false;
  std::optional<TrimReport> trim_report_;
  std::vector<OutcomeAnalysis> analyses_;
  std::vector<std::string> files_;
  json balance_;
  json estimates_;
  json model_docs_ = json::array();
  json sensitivity_;
  json conclusions_;
};

}  // namespace

json build_report(const json& meta, const json& balance, const json& trim,
                  const json& estimates, const json& models,
                  const json& sensitivity, const json& conclusions,
                  const std::vector<std::string>& files) {
  json doc;
  doc["schema_version"] = kReportSchemaVersion;
  doc["meta"] = meta;
  doc["balance"] = balance;
  doc["trim"] = trim;
  doc["estimates"] = estimates;
  doc["models"] = models;
  doc["sensitivity"] = sensitivity;  // null marks the section absent
  doc["conclusions"] = conclusions;
  doc["files"] = files;
  return doc;
}

json RunOptions::describe() const {
  json j;
  j["outcomes"] = outcomes;
  j["estimator"] = method_name(estimator);
  j["normalized"] = normalized;
  j["targetpop"] =
      targetpop == TargetPop::combined ? "combined" : "target-only";
  j["propensity"] =
      propensity.kind == PropensityKind::known_constant
          ? (propensity.constant
                 ? json{{"mode", "known-constant"},
                        {"c", json_number(*propensity.constant)}}
                 : json{{"mode", "known-constant"}, {"c", "observed-fraction"}})
          : json{{"mode", "fitted"}};
  j["trim_method"] = trim_method_name(trim_method);
  j["no_trim"] = no_trim;
  j["no_refit"] = no_refit;
  j["drop_missing"] = drop_missing;
  j["truncate_quantile"] =
      truncate_quantile ? json(*truncate_quantile) : json();
  j["B"] = bootstrap_B;
  j["q"] = q;
  j["grid"] = {grid_nr, grid_nc};
  j["r2_max"] = r2_max;
  // the worker cap is an execution detail: artifacts must not depend on it
  j["treatment_name"] = treatment_name;
  j["comparator_name"] = comparator_name;
  return j;
}

json run_describe(const RunOptions& options) {
  Workflow flow(options);
  return flow.describe("describe");
}

json run_trim(const RunOptions& options) {
  Workflow flow(options);
  return flow.trim("trim");
}

json run_estimate(const RunOptions& options) {
  Workflow flow(options);
  return flow.estimate("estimate");
}

json run_sensitivity(const RunOptions& options) {
  Workflow flow(options);
  flow.estimate("sensitivity");
  return flow.sensitivity("sensitivity");
}

json run_conclude(const std::string& sensitivity_json_path,
                  const RunOptions& options) {
  json doc = json::parse(read_text_file(sensitivity_json_path));
  require(doc.contains("sensitivity"), errc::invalid_argument,
          sensitivity_json_path + " has no sensitivity section");

  fs::create_directories(options.outdir);
  json out = json::array();
  for (const auto& entry : doc["sensitivity"]) {
    json c;
    c["outcome"] = entry["outcome"];
    bool degenerate = false;
    BoundStatus lower{}, upper{};
    for (const auto& b : entry["bounds"]) {
      if (b.contains("degenerate") && b["degenerate"].get<bool>()) {
        degenerate = true;
        continue;
      }
      BoundStatus status;
      status.sign =
          b["value"].get<double>() > 0.0 ? Sign::positive : Sign::negative;
      status.robust = b["robust"].get<bool>();
      (b["bound"] == "lower" ? lower : upper) = status;
    }
    Conclusion concl;
    if (degenerate) {
      concl = Conclusion::Indeterminate;
      c["diagnostic"] = "a confidence bound is exactly zero";
    } else {
      concl = conclude(lower, upper);
    }
    c["conclusion"] = conclusion_name(concl);
    c["sentence"] = conclusion_sentence(concl, options.treatment_name,
                                        options.comparator_name);
    out.push_back(c);
  }

  json result;
  result["meta"] = {{"tool", kToolName},
                    {"version", kToolVersion},
                    {"command", "conclude"},
                    {"from", sensitivity_json_path}};
  result["conclusions"] = out;
  write_text_file((fs::path(options.outdir) / "conclusions.json").string(),
                  result.dump(2) + "\n");
  return result;
}

json run_all(const RunOptions& options) {
  Workflow flow(options);
  flow.describe("run-all");
  flow.trim("run-all");
  flow.estimate("run-all");
  flow.sensitivity("run-all");
  flow.conclude_stage(flow.sensitivity_entries(), "run-all");
  return flow.report("run-all");
}

json run_simulate(const SimulateOptions& options) {
  SimConfig cfg = SimConfig::from_file(options.config_path);
  if (options.seed) cfg.seed = *options.seed;

  std::vector<EstimatorSpec> specs;
  for (const auto& name : options.estimators) {
    EstimatorSpec s;
    s.method = method_from_name(name);
    specs.push_back(s);
  }

  MCOptions mc;
  mc.replicates = options.replicates;
  mc.bootstrap_B = options.bootstrap_B;
  mc.threads = options.threads;
  MCResult result = run_mc(cfg, specs, mc);

  fs::create_directories(options.outdir);
  json doc;
  doc["meta"] = {{"tool", kToolName},
                 {"version", kToolVersion},
                 {"command", "simulate"},
                 {"config", options.config_path},
                 {"seed", cfg.seed},
                 {"replicates", options.replicates},
                 {"bootstrap_B", options.bootstrap_B}};
  doc["truth"] = json_number(result.truth);
  doc["rows"] = json::array();
  for (const auto& r : result.rows) {
    json row;
    row["estimator"] = r.estimator;
    row["mean_bias"] = json_number(r.mean_bias);
    row["mcse"] = json_number(r.mcse);
    row["emp_sd"] = json_number(r.emp_sd);
    row["coverage"] = r.coverage >= 0.0 ? json(r.coverage) : json();
    row["used"] = r.used;
    row["failed"] = r.failed;
    doc["rows"].push_back(row);
  }
  write_text_file((fs::path(options.outdir) / "mc_result.json").string(),
                  doc.dump(2) + "\n");
  std::string header = std::string("# ") + kToolName + " " + kToolVersion +
                       " simulate seed=" + std::to_string(cfg.seed) + "\n";
  write_text_file((fs::path(options.outdir) / "mc_result.txt").string(),
                  header + result.to_text());

  if (options.emit_csv) {
    GeneratedStudy study = generate(cfg, derive_seed(cfg.seed, 0));
    genrct::write_csv(study.trial,
                      (fs::path(options.outdir) / "trial.csv").string());
    genrct::write_csv(study.target,
                      (fs::path(options.outdir) / "rwd.csv").string());
    write_text_file((fs::path(options.outdir) / "schema.txt").string(),
                    study.trial.schema.to_text());
  }
  return doc;
}

}  // namespace genrct
