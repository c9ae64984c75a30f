#include "vinedep/data_io.hpp"

#include "vinedep/error.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace vinedep {

namespace {

std::vector<std::string> split_line(const std::string& line, char delim) {
  std::vector<std::string> out;
  std::string cell;
  bool quoted = false;
  for (std::size_t k = 0; k < line.size(); ++k) {
    const char c = line[k];
    if (c == '"') {
      if (quoted && k + 1 < line.size() && line[k + 1] == '"') {
        cell += '"';
        ++k;
      } else {
        quoted = !quoted;
      }
    } else if (c == delim && !quoted) {
      out.push_back(std::move(cell));
      cell.clear();
    } else {
      cell += c;
    }
  }
  out.push_back(std::move(cell));
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool is_missing_token(const std::string& s) { return s.empty() || s == "NA" || s == "NaN" || s == "nan"; }

double parse_number(const std::string& s, std::size_t line, std::size_t col) {
  double v = 0.0;
  const auto* first = s.data();
  const auto* last = s.data() + s.size();
  if (!s.empty() && s.front() == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) {
    throw InvalidArgument("line " + std::to_string(line) + ", column " + std::to_string(col) +
                          ": cannot parse '" + s + "' as a number");
  }
  return v;
}

std::string quote_if_needed(const std::string& s, char delim) {
  if (s.find(delim) == std::string::npos && s.find('"') == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

char detect_delimiter(const std::string& text) {
  const auto eol = text.find('\n');
  const auto first = text.substr(0, eol);
  return first.find('\t') != std::string::npos ? '\t' : ',';
}

char delimiter_for_path(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  return (ext == ".tsv" || ext == ".tab" || ext == ".txt") ? '\t' : ',';
}

Table parse_table(const std::string& text, char delimiter) {
  if (delimiter == '\0') delimiter = detect_delimiter(text);
  std::istringstream is(text);
  std::string line;
  Table t;
  std::vector<std::vector<double>> rows;
  std::size_t line_no = 0;
  bool header = true;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty() || line.front() == '#') continue;
    auto cells = split_line(line, delimiter);
    if (header) {
      header = false;
      if (cells.size() < 2) throw InvalidArgument("header needs an id column and at least one variable");
      for (std::size_t k = 1; k < cells.size(); ++k) t.column_names.push_back(trim(cells[k]));
      continue;
    }
    if (cells.size() != t.column_names.size() + 1) {
      throw InvalidArgument("line " + std::to_string(line_no) + " has " + std::to_string(cells.size()) +
                            " fields, expected " + std::to_string(t.column_names.size() + 1));
    }
    t.row_ids.push_back(trim(cells[0]));
    std::vector<double> row;
    for (std::size_t k = 1; k < cells.size(); ++k) {
      const auto cell = trim(cells[k]);
      row.push_back(is_missing_token(cell) ? std::numeric_limits<double>::quiet_NaN()
                                           : parse_number(cell, line_no, k + 1));
    }
    rows.push_back(std::move(row));
  }
  if (header) throw InvalidArgument("table is empty");
  t.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(t.column_names.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      t.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return t;
}

std::string format_double(double x) {
  if (std::isnan(x)) return "NA";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  if (ec != std::errc()) throw Error("cannot format number");
  return std::string(buf, ptr);
}

std::string format_table(const Table& table, char delimiter) {
  std::ostringstream os;
  os << "id";
  for (const auto& name : table.column_names) os << delimiter << quote_if_needed(name, delimiter);
  os << '\n';
  for (Eigen::Index i = 0; i < table.values.rows(); ++i) {
    os << quote_if_needed(table.row_ids[static_cast<std::size_t>(i)], delimiter);
    for (Eigen::Index j = 0; j < table.values.cols(); ++j) os << delimiter << format_double(table.values(i, j));
    os << '\n';
  }
  return os.str();
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw Error("failed writing '" + path.string() + "'");
}

Table read_table(const std::filesystem::path& path) { return parse_table(read_text(path)); }

DataMatrix data_from_table(const Table& t) { return DataMatrix(t.values, t.column_names, t.row_ids); }

DataMatrix read_data(const std::filesystem::path& path) { return data_from_table(read_table(path)); }

Table table_from(const DataMatrix& data) { return {data.sample_ids(), data.variable_names(), data.values()}; }

Table table_from(const ZMatrix& z, const std::vector<std::string>& sample_ids) {
  Table t;
  t.column_names = z.variable_names();
  t.values = z.values();
  t.row_ids = sample_ids;
  if (t.row_ids.empty()) {
    for (std::size_t i = 0; i < z.samples(); ++i) t.row_ids.push_back("S" + std::to_string(i + 1));
  }
  return t;
}

CorrelationMatrix correlation_from_table(const Table& t) {
  if (t.values.rows() != t.values.cols()) throw InvalidArgument("correlation table is not square");
  if (t.row_ids != t.column_names) throw InvalidArgument("correlation table row and column names differ");
  return CorrelationMatrix(t.values, t.column_names);
}

CorrelationMatrix read_correlation(const std::filesystem::path& path) {
  return correlation_from_table(read_table(path));
}

Table table_from(const CorrelationMatrix& r) { return {r.variable_names(), r.variable_names(), r.values()}; }

Table table_from(const Eigen::MatrixXd& m, const std::vector<std::string>& names) { return {names, names, m}; }

}  // namespace vinedep
