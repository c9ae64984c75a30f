#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace vinedep {

// Raw samples x variables table. Missing cells are stored as NaN.
class DataMatrix {
public:
  DataMatrix() = default;
  DataMatrix(Eigen::MatrixXd values, std::vector<std::string> variable_names,
             std::vector<std::string> sample_ids = {});

  std::size_t samples() const noexcept { return static_cast<std::size_t>(values_.rows()); }
  std::size_t variables() const noexcept { return static_cast<std::size_t>(values_.cols()); }

  const Eigen::MatrixXd& values() const noexcept { return values_; }
  const std::vector<std::string>& variable_names() const noexcept { return variable_names_; }
  const std::vector<std::string>& sample_ids() const noexcept { return sample_ids_; }

  bool is_missing(std::size_t row, std::size_t col) const;
  std::size_t missing_count(std::size_t col) const;
  std::size_t missing_count() const;
  bool has_missing() const { return missing_count() > 0; }

  // Throws DegenerateVariableError if a column is constant on its observed cells.
  void check_not_degenerate() const;

private:
  Eigen::MatrixXd values_;
  std::vector<std::string> variable_names_;
  std::vector<std::string> sample_ids_;
};

// Data on the z-scale: every column is a normal-scores transform.
class ZMatrix {
public:
  ZMatrix() = default;
  ZMatrix(Eigen::MatrixXd values, std::vector<std::string> variable_names,
          std::vector<int> orientation = {});

  std::size_t samples() const noexcept { return static_cast<std::size_t>(values_.rows()); }
  std::size_t variables() const noexcept { return static_cast<std::size_t>(values_.cols()); }

  const Eigen::MatrixXd& values() const noexcept { return values_; }
  const std::vector<int>& orientation() const noexcept { return orientation_; }
  const std::vector<std::string>& variable_names() const noexcept { return variable_names_; }

  // Appends a column (orientation +1). Used to attach proxy variables.
  ZMatrix with_column(const Eigen::VectorXd& column, std::string name) const;
  ZMatrix select_columns(const std::vector<std::size_t>& columns) const;

private:
  Eigen::MatrixXd values_;
  std::vector<int> orientation_;
  std::vector<std::string> variable_names_;
};

double normal_quantile(double p);
double normal_cdf(double x);

// Average ranks (1-based) of a column; ties share the mean of their positions.
std::vector<double> average_ranks(const Eigen::Ref<const Eigen::VectorXd>& column);

// z = Phi^{-1}((rank - 0.5) / n) per column, average ranks for ties.
Eigen::VectorXd normal_scores(const Eigen::Ref<const Eigen::VectorXd>& column);

ZMatrix rank_to_normal(const DataMatrix& data);

enum class ImputationMethod { none, surrogate, median };

struct ImputationRecord {
  std::size_t variable = 0;
  std::string variable_name;
  std::size_t cells_imputed = 0;
  ImputationMethod method = ImputationMethod::none;
  std::optional<std::size_t> surrogate;
  std::string surrogate_name;
  double surrogate_correlation = 0.0;
  double slope = 0.0;
  std::size_t tied_candidates = 0;  // other surrogates with the same |correlation|
  std::string warning;
};

struct ImputationOptions {
  std::size_t min_joint_samples = 10;
  double correlation_floor = 0.3;
};

struct ImputationResult {
  DataMatrix data;
  std::vector<ImputationRecord> records;  // one per variable that had missing cells
  bool skipped() const noexcept { return records.empty(); }
};

// Gaussian-copula surrogate regression imputation. Observed cells are unchanged.
ImputationResult impute_missing(const DataMatrix& data, const ImputationOptions& options = {});

// Negates the listed columns. Flipped variables carry a trailing '-' in their name;
// flipping again removes it.
ZMatrix reorient(const ZMatrix& z, const std::set<std::size_t>& flip);

}  // namespace vinedep
