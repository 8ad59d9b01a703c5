#ifndef GENRCT_BALANCE_HPP
#define GENRCT_BALANCE_HPP

#include <string>
#include <vector>

#include "genrct/dataset.hpp"
#include "genrct/models.hpp"

namespace genrct {

struct BalanceRow {
  std::string covariate;
  CovariateKind kind = CovariateKind::continuous;
  double mean_treat = 0, sd_treat = 0;
  double mean_control = 0, sd_control = 0;
  double mean_trial = 0, sd_trial = 0;
  double mean_target = 0, sd_target = 0;
  std::string test;  // "ks" or "z"
  double statistic = 0;
  double p_value = 1;
};

struct BalanceTable {
  std::size_t n_treat = 0, n_control = 0, n_trial = 0, n_target = 0;
  std::vector<BalanceRow> rows;

  std::string to_text() const;
};

// Baseline comparison: K-S test (trial-overall vs target) for continuous
// covariates, two-proportion Z test for binary ones.
BalanceTable balance_table(const StudyDataset& trial,
                           const StudyDataset& target);

enum class TrimMethod { sampling_score, covariate_range };

const char* trim_method_name(TrimMethod m);
TrimMethod trim_method_from_name(const std::string& name);

struct TrimReport {
  TrimMethod method = TrimMethod::sampling_score;
  std::size_t target_before = 0;
  std::size_t target_after = 0;
  // sampling-score method
  double score_min = 0, score_max = 0;
  std::size_t dropped_below = 0, dropped_above = 0;
  std::optional<LogisticFit> sampling_fit;
  // covariate-range method: covariate name -> units outside the trial range
  std::vector<std::pair<std::string, std::size_t>> dropped_by_covariate;

  std::string to_text() const;
};

struct TrimResult {
  StudyDataset target;
  TrimReport report;
};

// Restricts the target cohort to the trial's support. The sampling-score
// method fits p(X) on the pooled sample and keeps target units whose score
// lies inside the trial units' observed [min, max]; covariate-range keeps
// units whose continuous covariates all lie inside the trial ranges.
TrimResult trim_to_support(const StudyDataset& trial,
                           const StudyDataset& target, TrimMethod method);

// Score-based trim against an already-fitted sampling model.
TrimResult trim_with_scores(const StudyDataset& trial,
                            const StudyDataset& target,
                            const LogisticFit& sampling);

}  // namespace genrct

#endif  // GENRCT_BALANCE_HPP
