#include "genrct/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "genrct/errors.hpp"

namespace genrct {

namespace {

std::string trim(std::string_view s) {
  auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string_view::npos) return "";
  auto end = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(begin, end - begin + 1));
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  for (;;) {
    auto comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(trim(line.substr(start)));
      break;
    }
    fields.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return fields;
}

bool is_missing_token(const std::string& cell) {
  return cell.empty() || cell == "NA" || cell == "na" || cell == "NaN" ||
         cell == "nan";
}

// Parses a full numeric cell; returns nullopt on syntax errors.
std::optional<double> parse_number(const std::string& cell) {
  double value = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) return std::nullopt;
  return value;
}

std::string format_double(double value) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

}  // namespace

int CovariateSchema::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < entries.size(); ++i)
    if (entries[i].name == name) return static_cast<int>(i);
  return -1;
}

void CovariateSchema::validate() const {
  require(!entries.empty(), errc::invalid_config, "schema has no covariates");
  std::set<std::string> seen;
  for (const auto& e : entries) {
    require(!e.name.empty(), errc::invalid_config, "empty covariate name");
    require(seen.insert(e.name).second, errc::invalid_config,
            "duplicate covariate name '" + e.name + "'");
  }
}

CovariateSchema CovariateSchema::load(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), errc::io_error, "cannot open schema file " + path);
  CovariateSchema schema;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    auto colon = t.find(':');
    require(colon != std::string::npos, errc::invalid_config,
            "schema line " + std::to_string(lineno) + " lacks ':'");
    std::string name = trim(t.substr(0, colon));
    std::string kind = trim(t.substr(colon + 1));
    if (kind == "continuous") {
      schema.entries.push_back({name, CovariateKind::continuous});
    } else if (kind == "binary") {
      schema.entries.push_back({name, CovariateKind::binary});
    } else {
      fail(errc::invalid_config,
           "schema line " + std::to_string(lineno) + ": unknown kind '" +
               kind + "' (expected continuous or binary)");
    }
  }
  schema.validate();
  return schema;
}

std::string CovariateSchema::to_text() const {
  std::ostringstream out;
  for (const auto& e : entries)
    out << e.name << ": "
        << (e.kind == CovariateKind::continuous ? "continuous" : "binary")
        << "\n";
  return out.str();
}

Eigen::MatrixXd StudyDataset::covariate_matrix() const {
  Eigen::MatrixXd x(static_cast<Eigen::Index>(records.size()),
                    static_cast<Eigen::Index>(schema.size()));
  for (std::size_t i = 0; i < records.size(); ++i)
    for (std::size_t j = 0; j < schema.size(); ++j)
      x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          records[i].covariates[j];
  return x;
}

std::vector<double> StudyDataset::covariate_column(std::size_t j) const {
  std::vector<double> col(records.size());
  for (std::size_t i = 0; i < records.size(); ++i)
    col[i] = records[i].covariates[j];
  return col;
}

std::vector<std::size_t> StudyDataset::with_outcome(
    const std::string& outcome) const {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < records.size(); ++i)
    if (records[i].outcomes.count(outcome)) idx.push_back(i);
  return idx;
}

std::size_t StudyDataset::arm_count(int arm) const {
  std::size_t c = 0;
  for (const auto& r : records)
    if (r.arm && *r.arm == arm) ++c;
  return c;
}

void StudyDataset::validate() const {
  schema.validate();
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    require(r.covariates.size() == schema.size(), errc::invalid_argument,
            "record " + std::to_string(i + 1) + " has wrong covariate count");
    if (source == Source::trial) {
      require(r.arm.has_value(), errc::missing_value,
              "trial record " + std::to_string(i + 1) + " lacks arm");
      require(!r.outcomes.empty(), errc::missing_value,
              "trial record " + std::to_string(i + 1) + " has no outcome");
    } else {
      require(!r.arm.has_value() && r.outcomes.empty(), errc::invalid_argument,
              "target record " + std::to_string(i + 1) +
                  " carries trial-only fields");
    }
  }
  if (source == Source::trial) {
    require(arm_count(0) > 0 && arm_count(1) > 0, errc::degenerate_sample,
            "trial dataset must contain both arms");
  }
}

IngestResult ingest(const std::string& path, const CovariateSchema& schema,
                    Source source, const IngestOptions& options) {
  schema.validate();
  std::ifstream in(path);
  require(in.good(), errc::io_error, "cannot open " + path);

  std::string header_line;
  for (;;) {  // leading '#' lines carry run metadata
    require(static_cast<bool>(std::getline(in, header_line)), errc::io_error,
            path + " is empty");
    std::string t = trim(header_line);
    if (!t.empty() && t[0] != '#') break;
  }
  std::vector<std::string> header = split_csv_line(header_line);

  std::vector<int> cov_col(schema.size(), -1);
  int arm_col = -1;
  std::vector<std::pair<std::string, int>> outcome_cols;
  for (std::size_t c = 0; c < header.size(); ++c) {
    const std::string& name = header[c];
    int j = schema.index_of(name);
    if (j >= 0) {
      cov_col[static_cast<std::size_t>(j)] = static_cast<int>(c);
    } else if (name == "arm") {
      arm_col = static_cast<int>(c);
    } else if (source == Source::trial) {
      outcome_cols.emplace_back(name, static_cast<int>(c));
    }
  }
  for (std::size_t j = 0; j < schema.size(); ++j)
    require(cov_col[j] >= 0, errc::missing_column,
            path + " lacks covariate column '" + schema.entries[j].name + "'");
  if (source == Source::trial) {
    require(arm_col >= 0, errc::missing_column, path + " lacks 'arm' column");
    require(!outcome_cols.empty(), errc::missing_column,
            path + " has no outcome column");
  }

  IngestResult result;
  result.dataset.schema = schema;
  result.dataset.source = source;
  for (const auto& [name, col] : outcome_cols)
    result.dataset.outcome_names.push_back(name);

  std::string line;
  std::size_t rowno = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    ++rowno;
    ++result.rows_read;
    std::vector<std::string> cells = split_csv_line(line);
    require(cells.size() == header.size(), errc::non_numeric_cell,
            path + " row " + std::to_string(rowno) + " has " +
                std::to_string(cells.size()) + " cells, expected " +
                std::to_string(header.size()));

    UnitRecord rec;
    rec.covariates.resize(schema.size());
    bool drop = false;

    auto read_cell = [&](int col, const std::string& what,
                         bool missing_ok) -> std::optional<double> {
      const std::string& cell = cells[static_cast<std::size_t>(col)];
      if (is_missing_token(cell)) {
        if (missing_ok) return std::nullopt;
        if (options.drop_missing) {
          drop = true;
          return std::nullopt;
        }
        fail(errc::missing_value, path + " row " + std::to_string(rowno) +
                                      ": missing value in " + what);
      }
      auto value = parse_number(cell);
      if (!value)
        fail(errc::non_numeric_cell, path + " row " + std::to_string(rowno) +
                                         ": non-numeric cell '" + cell +
                                         "' in " + what);
      return value;
    };

    for (std::size_t j = 0; j < schema.size() && !drop; ++j) {
      auto v = read_cell(cov_col[j], "column '" + schema.entries[j].name + "'",
                         false);
      if (drop) break;
      if (schema.entries[j].kind == CovariateKind::binary &&
          *v != 0.0 && *v != 1.0)
        fail(errc::binary_out_of_range,
             path + " row " + std::to_string(rowno) + ", column '" +
                 schema.entries[j].name + "': value " + format_double(*v) +
                 " not in {0,1}");
      rec.covariates[j] = *v;
    }

    if (!drop && source == Source::trial) {
      auto a = read_cell(arm_col, "column 'arm'", false);
      if (!drop) {
        if (*a != 0.0 && *a != 1.0)
          fail(errc::binary_out_of_range,
               path + " row " + std::to_string(rowno) +
                   ", column 'arm': value " + format_double(*a) +
                   " not in {0,1}");
        rec.arm = static_cast<int>(*a);
        for (const auto& [name, col] : outcome_cols) {
          auto y = read_cell(col, "outcome '" + name + "'", true);
          if (y) rec.outcomes[name] = *y;
        }
        if (rec.outcomes.empty()) {
          // every outcome cell missing: treat like a missing value row
          if (options.drop_missing)
            drop = true;
          else
            fail(errc::missing_value, path + " row " + std::to_string(rowno) +
                                          ": all outcome cells missing");
        }
      }
    }

    if (drop) {
      ++result.rows_dropped;
      continue;
    }
    result.dataset.records.push_back(std::move(rec));
  }

  result.dataset.validate();
  return result;
}

std::string to_csv(const StudyDataset& dataset) {
  std::ostringstream out;
  for (std::size_t j = 0; j < dataset.schema.size(); ++j) {
    if (j) out << ',';
    out << dataset.schema.entries[j].name;
  }
  if (dataset.source == Source::trial) {
    out << ",arm";
    for (const auto& name : dataset.outcome_names) out << ',' << name;
  }
  out << '\n';

  for (const auto& r : dataset.records) {
    for (std::size_t j = 0; j < r.covariates.size(); ++j) {
      if (j) out << ',';
      out << format_double(r.covariates[j]);
    }
    if (dataset.source == Source::trial) {
      out << ',' << *r.arm;
      for (const auto& name : dataset.outcome_names) {
        out << ',';
        auto it = r.outcomes.find(name);
        if (it != r.outcomes.end()) out << format_double(it->second);
      }
    }
    out << '\n';
  }
  return out.str();
}

void write_csv(const StudyDataset& dataset, const std::string& path) {
  std::ofstream out(path);
  require(out.good(), errc::io_error, "cannot write " + path);
  out << to_csv(dataset);
  require(out.good(), errc::io_error, "write failed for " + path);
}

}  // namespace genrct
