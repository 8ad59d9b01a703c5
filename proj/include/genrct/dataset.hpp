#ifndef GENRCT_DATASET_HPP
#define GENRCT_DATASET_HPP

#include <Eigen/Core>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace genrct {

enum class CovariateKind { continuous, binary };

// Ordered covariate declaration; the entry order is the canonical layout of
// every covariate vector downstream.
struct CovariateSchema {
  struct Entry {
    std::string name;
    CovariateKind kind;
    bool operator==(const Entry&) const = default;
  };

  std::vector<Entry> entries;

  std::size_t size() const { return entries.size(); }
  int index_of(std::string_view name) const;
  void validate() const;

  // Plain key-value text format, one "name: kind" line per covariate.
  static CovariateSchema load(const std::string& path);
  std::string to_text() const;

  bool operator==(const CovariateSchema&) const = default;
};

enum class Source { trial, target };

struct UnitRecord {
  std::vector<double> covariates;
  std::optional<int> arm;                  // trial only, 0 or 1
  std::map<std::string, double> outcomes;  // trial only; cells may be absent
};

struct StudyDataset {
  CovariateSchema schema;
  Source source = Source::target;
  std::vector<std::string> outcome_names;  // column order from ingestion
  std::vector<UnitRecord> records;

  std::size_t n() const { return records.size(); }
  Eigen::MatrixXd covariate_matrix() const;
  std::vector<double> covariate_column(std::size_t j) const;

  // Indices of trial units carrying the named outcome.
  std::vector<std::size_t> with_outcome(const std::string& outcome) const;
  std::size_t arm_count(int arm) const;

  void validate() const;
};

struct IngestOptions {
  bool drop_missing = false;
};

struct IngestResult {
  StudyDataset dataset;
  std::size_t rows_read = 0;
  std::size_t rows_dropped = 0;
};

// CSV with a header row, '.' decimal separator; empty cells and "NA"/"nan"
// are missing. Trial files need an `arm` column; every non-schema, non-arm
// column is treated as an outcome.
IngestResult ingest(const std::string& path, const CovariateSchema& schema,
                    Source source, const IngestOptions& options = {});

// Serializes with shortest round-trip formatting so that ingest(write(ds))
// reproduces every numeric value bit-exactly.
std::string to_csv(const StudyDataset& dataset);
void write_csv(const StudyDataset& dataset, const std::string& path);

}  // namespace genrct

#endif  // GENRCT_DATASET_HPP
