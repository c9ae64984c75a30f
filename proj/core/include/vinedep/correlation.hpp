#pragma once

#include "vinedep/transform.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <map>
#include <random>
#include <string>
#include <tuple>
#include <vector>

namespace vinedep {

// Smallest eigenvalue counted as positive definite.
inline constexpr double kPdTolerance = 1e-12;

// Symmetric matrix with unit diagonal and entries in [-1, 1].
class CorrelationMatrix {
public:
  CorrelationMatrix() = default;
  // Validates symmetry (1e-12), unit diagonal and the entry range.
  explicit CorrelationMatrix(Eigen::MatrixXd values, std::vector<std::string> variable_names = {});

  std::size_t size() const noexcept { return static_cast<std::size_t>(values_.rows()); }
  const Eigen::MatrixXd& values() const noexcept { return values_; }
  const std::vector<std::string>& variable_names() const noexcept { return variable_names_; }
  double operator()(std::size_t i, std::size_t j) const {
    return values_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }

  bool positive_definite() const noexcept { return positive_definite_; }
  double min_eigenvalue() const;

  CorrelationMatrix submatrix(const std::vector<std::size_t>& indices) const;
  CorrelationMatrix permuted(const std::vector<std::size_t>& order) const { return submatrix(order); }

private:
  Eigen::MatrixXd values_;
  std::vector<std::string> variable_names_;
  bool positive_definite_ = false;
};

// Pearson correlation of the z columns. The result may be flagged not-PD.
CorrelationMatrix empirical_corr(const ZMatrix& z);

inline constexpr double kRidgeFloor = 1e-8;

// Ridge repair: shifts the diagonal when lambda_min <= 1e-8 and rescales to unit diagonal.
// Returns the input unchanged when no repair is needed.
CorrelationMatrix repair_pd(const CorrelationMatrix& r);

// Throws NotPositiveDefiniteError naming the caller when R is not PD.
void require_positive_definite(const CorrelationMatrix& r, const std::string& context);

struct PartialCorrelation {
  std::size_t i = 0;
  std::size_t j = 0;
  std::vector<std::size_t> conditioning;  // ascending
  double value = 0.0;
};

// Evaluates partial correlations of R by the one-index-at-a-time recursion, peeling
// conditioning indices in ascending order. Results are memoised per (pair, set), so
// one instance can serve many related queries (e.g. all candidates of a vine level).
class PartialCorrelationCalculator {
public:
  explicit PartialCorrelationCalculator(const CorrelationMatrix& r);

  double operator()(std::size_t i, std::size_t j, std::vector<std::size_t> conditioning);
  PartialCorrelation compute(std::size_t i, std::size_t j, std::vector<std::size_t> conditioning);
  std::size_t cache_size() const noexcept { return cache_.size(); }

private:
  double recurse(std::size_t i, std::size_t j, const std::vector<std::size_t>& conditioning);

  const CorrelationMatrix* r_;
  std::map<std::tuple<std::size_t, std::size_t, std::vector<std::size_t>>, double> cache_;
};

inline constexpr double kSingularityTolerance = 1e-12;

double partial_corr_recursive(const CorrelationMatrix& r, std::size_t i, std::size_t j,
                              const std::vector<std::size_t>& conditioning);

// Partial correlation of every pair given all remaining variables, from the inverse
// of R: -s^{ij} / sqrt(s^{ii} s^{jj}). Unit diagonal.
Eigen::MatrixXd partial_corr_given_rest(const CorrelationMatrix& r);

double log_det(const CorrelationMatrix& r);

// Random PD correlation matrix: normalised Gram matrix of a d x (d + extra) Gaussian
// matrix. Larger extra gives better conditioned matrices.
CorrelationMatrix random_correlation_matrix(std::size_t d, std::mt19937_64& rng,
                                            std::size_t extra = 2);

}  // namespace vinedep
