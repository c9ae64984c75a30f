#pragma once

#include "vinedep/correlation.hpp"
#include "vinedep/transform.hpp"

#include <Eigen/Dense>

#include <filesystem>
#include <string>
#include <vector>

namespace vinedep {

// Delimited text tables: a header row of variable names (its first cell labels the
// id column) and one row per sample starting with the sample id. Empty fields and
// "NA" are missing.
struct Table {
  std::vector<std::string> row_ids;
  std::vector<std::string> column_names;
  Eigen::MatrixXd values;  // NaN for missing
};

// Comma unless the text's first line contains a tab.
char detect_delimiter(const std::string& text);
char delimiter_for_path(const std::filesystem::path& path);

Table parse_table(const std::string& text, char delimiter = '\0');
std::string format_table(const Table& table, char delimiter = ',');

Table read_table(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

DataMatrix read_data(const std::filesystem::path& path);
DataMatrix data_from_table(const Table& t);
Table table_from(const DataMatrix& data);
Table table_from(const ZMatrix& z, const std::vector<std::string>& sample_ids = {});

// Square matrices carry the variable names on both axes.
CorrelationMatrix read_correlation(const std::filesystem::path& path);
CorrelationMatrix correlation_from_table(const Table& t);
Table table_from(const CorrelationMatrix& r);
Table table_from(const Eigen::MatrixXd& m, const std::vector<std::string>& names);

// Shortest decimal text that round-trips to the same double.
std::string format_double(double x);

}  // namespace vinedep
