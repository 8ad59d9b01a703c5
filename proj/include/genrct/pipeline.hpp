#ifndef GENRCT_PIPELINE_HPP
#define GENRCT_PIPELINE_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "genrct/balance.hpp"
#include "genrct/estimators.hpp"
#include "genrct/jsonio.hpp"
#include "genrct/simulation.hpp"

namespace genrct {

inline constexpr const char* kToolName = "genrct";
inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kReportSchemaVersion = "1";

struct RunOptions {
  std::string rct_path;
  std::string rwd_path;
  std::string schema_path;
  std::string outdir = ".";
  std::vector<std::string> outcomes;

  Method estimator = Method::aipsw;
  bool normalized = true;
  TargetPop targetpop = TargetPop::combined;
  PropensityMode propensity;
  std::optional<double> truncate_quantile;

  TrimMethod trim_method = TrimMethod::sampling_score;
  bool no_trim = false;
  bool no_refit = false;  // reuse the pre-trim sampling fit for weights
  bool drop_missing = false;

  int bootstrap_B = 1000;
  std::optional<std::uint64_t> seed;

  double q = 1.0;
  int grid_nr = 200;
  int grid_nc = 200;
  double r2_max = 0.95;

  int threads = 0;
  std::string treatment_name = "treatment";
  std::string comparator_name = "comparator";

  json describe() const;  // config echo for report metadata
};

// Each command writes its artifacts under outdir and returns the top-level
// JSON document it wrote.
json run_describe(const RunOptions& options);
json run_trim(const RunOptions& options);
json run_estimate(const RunOptions& options);
json run_sensitivity(const RunOptions& options);
json run_conclude(const std::string& sensitivity_json_path,
                  const RunOptions& options);
json run_all(const RunOptions& options);

struct SimulateOptions {
  std::string config_path;
  std::string outdir = ".";
  int replicates = 500;
  std::optional<std::uint64_t> seed;  // overrides the config seed
  int bootstrap_B = 0;
  std::vector<std::string> estimators = {"om", "ipsw", "aipsw"};
  bool emit_csv = false;  // write one replicate's cohorts as CSV + schema
  int threads = 0;
};

json run_simulate(const SimulateOptions& options);

// Assembles the versioned analysis report from its parts; a null sensitivity
// or conclusions argument marks that section absent.
json build_report(const json& meta, const json& balance, const json& trim,
                  const json& estimates, const json& models,
                  const json& sensitivity, const json& conclusions,
                  const std::vector<std::string>& files);

}  // namespace genrct

#endif  // GENRCT_PIPELINE_HPP
