#include "genrct/balance.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "genrct/errors.hpp"
#include "genrct/stats.hpp"

namespace genrct {

namespace {

struct GroupStats {
  double mean = 0, sd = 0;
};

GroupStats summarize(const std::vector<double>& v) {
  return {mean(v), v.size() >= 2 ? stddev(v) : 0.0};
}

std::string fmt(double v, int prec = 4) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
  return buf;
}

}  // namespace

BalanceTable balance_table(const StudyDataset& trial,
                           const StudyDataset& target) {
  require(trial.source == Source::trial && target.source == Source::target,
          errc::invalid_argument, "balance_table needs (trial, target)");
  require(trial.schema == target.schema, errc::invalid_argument,
          "trial and target schemas differ");
  require(trial.n() >= 2 && target.n() >= 2, errc::degenerate_sample,
          "balance table needs at least 2 units per cohort");
  require(trial.arm_count(0) >= 2 && trial.arm_count(1) >= 2,
          errc::degenerate_sample,
          "balance table needs at least 2 units per arm");

  BalanceTable table;
  table.n_treat = trial.arm_count(1);
  table.n_control = trial.arm_count(0);
  table.n_trial = trial.n();
  table.n_target = target.n();

  for (std::size_t j = 0; j < trial.schema.size(); ++j) {
    const auto& entry = trial.schema.entries[j];
    std::vector<double> treat, control, overall, tgt;
    for (const auto& r : trial.records) {
      overall.push_back(r.covariates[j]);
      (*r.arm == 1 ? treat : control).push_back(r.covariates[j]);
    }
    tgt = target.covariate_column(j);

    BalanceRow row;
    row.covariate = entry.name;
    row.kind = entry.kind;
    auto st = summarize(treat);
    row.mean_treat = st.mean, row.sd_treat = st.sd;
    st = summarize(control);
    row.mean_control = st.mean, row.sd_control = st.sd;
    st = summarize(overall);
    row.mean_trial = st.mean, row.sd_trial = st.sd;
    st = summarize(tgt);
    row.mean_target = st.mean, row.sd_target = st.sd;

    if (entry.kind == CovariateKind::continuous) {
      auto ks = ks_test(overall, tgt);
      row.test = "ks";
      row.statistic = ks.d;
      row.p_value = ks.p;
    } else {
      auto ones = [](const std::vector<double>& v) {
        return static_cast<std::size_t>(
            std::count(v.begin(), v.end(), 1.0));
      };
      auto z = two_proportion_z(ones(overall), overall.size(), ones(tgt),
                                tgt.size());
      row.test = "z";
      row.statistic = z.z;
      row.p_value = z.p;
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::string BalanceTable::to_text() const {
  std::ostringstream out;
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%-12s %-18s %-18s %-18s %-18s %-6s %10s %10s\n",
                "covariate", "treatment", "control", "trial", "target", "test",
                "stat", "p");
  out << buf;
  std::snprintf(buf, sizeof(buf),
                "%-12s n=%-15zu n=%-15zu n=%-15zu n=%-15zu\n", "", n_treat,
                n_control, n_trial, n_target);
  out << buf;
  for (const auto& r : rows) {
    auto cell = [](double m, double s) {
      char b[64];
      std::snprintf(b, sizeof(b), "%.3g (%.3g)", m, s);
      return std::string(b);
    };
    std::snprintf(buf, sizeof(buf),
                  "%-12s %-18s %-18s %-18s %-18s %-6s %10.4g %10.4g\n",
                  r.covariate.c_str(), cell(r.mean_treat, r.sd_treat).c_str(),
                  cell(r.mean_control, r.sd_control).c_str(),
                  cell(r.mean_trial, r.sd_trial).c_str(),
                  cell(r.mean_target, r.sd_target).c_str(), r.test.c_str(),
                  r.statistic, r.p_value);
    out << buf;
  }
  return out.str();
}

const char* trim_method_name(TrimMethod m) {
  return m == TrimMethod::sampling_score ? "sampling-score" : "covariate-range";
}

TrimMethod trim_method_from_name(const std::string& name) {
  if (name == "sampling-score") return TrimMethod::sampling_score;
  if (name == "covariate-range") return TrimMethod::covariate_range;
  fail(errc::invalid_argument, "unknown trim method '" + name + "'");
}

TrimResult trim_with_scores(const StudyDataset& trial,
                            const StudyDataset& target,
                            const LogisticFit& sampling) {
  Eigen::VectorXd trial_scores = sampling.predict(trial.covariate_matrix());
  Eigen::VectorXd target_scores = sampling.predict(target.covariate_matrix());

  TrimResult result;
  result.report.method = TrimMethod::sampling_score;
  result.report.target_before = target.n();
  result.report.score_min = trial_scores.minCoeff();
  result.report.score_max = trial_scores.maxCoeff();
  result.report.sampling_fit = sampling;

  result.target.schema = target.schema;
  result.target.source = Source::target;
  for (std::size_t i = 0; i < target.n(); ++i) {
    double s = target_scores(static_cast<Eigen::Index>(i));
    if (s < result.report.score_min) {
      ++result.report.dropped_below;
    } else if (s > result.report.score_max) {
      ++result.report.dropped_above;
    } else {
      result.target.records.push_back(target.records[i]);
    }
  }
  result.report.target_after = result.target.n();
  require(result.report.target_after > 0, errc::empty_after_trim,
          "no target units remain inside the trial's score range");
  return result;
}

TrimResult trim_to_support(const StudyDataset& trial,
                           const StudyDataset& target, TrimMethod method) {
  require(trial.source == Source::trial && target.source == Source::target,
          errc::invalid_argument, "trim_to_support needs (trial, target)");
  require(trial.schema == target.schema, errc::invalid_argument,
          "trial and target schemas differ");

  if (method == TrimMethod::sampling_score) {
    Eigen::MatrixXd xt = trial.covariate_matrix();
    Eigen::MatrixXd xg = target.covariate_matrix();
    Eigen::MatrixXd x(xt.rows() + xg.rows(), xt.cols());
    x.topRows(xt.rows()) = xt;
    x.bottomRows(xg.rows()) = xg;
    Eigen::VectorXd s(x.rows());
    s.head(xt.rows()).setOnes();
    s.tail(xg.rows()).setZero();
    return trim_with_scores(trial, target, fit_logistic(x, s));
  }

  // covariate-range: continuous covariates must lie in the trial's [min,max]
  const std::size_t p = trial.schema.size();
  std::vector<double> lo(p, 0.0), hi(p, 0.0);
  for (std::size_t j = 0; j < p; ++j) {
    auto col = trial.covariate_column(j);
    lo[j] = *std::min_element(col.begin(), col.end());
    hi[j] = *std::max_element(col.begin(), col.end());
  }

  TrimResult result;
  result.report.method = TrimMethod::covariate_range;
  result.report.target_before = target.n();
  for (std::size_t j = 0; j < p; ++j)
    if (trial.schema.entries[j].kind == CovariateKind::continuous)
      result.report.dropped_by_covariate.emplace_back(
          trial.schema.entries[j].name, 0);

  result.target.schema = target.schema;
  result.target.source = Source::target;
  for (const auto& r : target.records) {
    bool keep = true;
    std::size_t rule = 0;
    for (std::size_t j = 0; j < p; ++j) {
      if (trial.schema.entries[j].kind != CovariateKind::continuous) continue;
      if (r.covariates[j] < lo[j] || r.covariates[j] > hi[j]) {
        ++result.report.dropped_by_covariate[rule].second;
        keep = false;  // counted once per covariate rule, kept out once
      }
      ++rule;
    }
    if (keep) result.target.records.push_back(r);
  }
  result.report.target_after = result.target.n();
  require(result.report.target_after > 0, errc::empty_after_trim,
          "no target units remain inside the trial's covariate ranges");
  return result;
}

std::string TrimReport::to_text() const {
  std::ostringstream out;
  out << "trim method: " << trim_method_name(method) << "\n";
  out << "target units: " << target_before << " -> " << target_after << "\n";
  if (method == TrimMethod::sampling_score) {
    out << "trial score range: [" << fmt(score_min) << ", " << fmt(score_max)
        << "]\n";
    out << "dropped below: " << dropped_below
        << ", dropped above: " << dropped_above << "\n";
  } else {
    for (const auto& [name, count] : dropped_by_covariate)
      out << "outside '" << name << "' range: " << count << "\n";
  }
  return out.str();
}

}  // namespace genrct
