#pragma once

#include "vinedep/correlation.hpp"
#include "vinedep/transform.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <random>
#include <string>
#include <vector>

namespace vinedep {

struct OneFactorFit {
  std::vector<double> loadings;
  std::vector<double> uniquenesses;  // 1 - loading^2
  double objective = 0.0;            // sum over i<j of (rho_ij - a_i a_j)^2
  std::vector<double> objective_trace;
  std::size_t iterations = 0;

  static OneFactorFit from_loadings(std::vector<double> loadings, const CorrelationMatrix* r = nullptr);

  // A A^T + Psi^2
  Eigen::MatrixXd implied_correlation() const;
};

struct OneFactorOptions {
  std::size_t max_iterations = 500;
  double relative_tolerance = 1e-10;
  double loading_bound = 0.999;
};

// Minimum-residual fit by coordinate-wise least squares, started from the leading
// principal component. The loading of largest magnitude is made positive.
OneFactorFit fit_one_factor(const CorrelationMatrix& r, const OneFactorOptions& options = {});

struct ResidualReport {
  Eigen::MatrixXd residuals;        // |implied - data|, zero diagonal
  std::vector<bool> strong_residual;
  double t_max = 0.0;
  double t_rowsum = 0.0;

  std::vector<std::size_t> flagged() const;
};

ResidualReport residual_report(const CorrelationMatrix& data, const OneFactorFit& fit, double t_max,
                               double t_rowsum);

inline constexpr double kDefaultResidualMax = 0.25;
// 0.25 * (group_size - 1) * 0.5
double default_residual_rowsum(std::size_t group_size);

struct ProxyVariable {
  std::string group_id;
  Eigen::VectorXd values;
  std::vector<std::size_t> member_columns;
};

// Average of the member z-columns per sample, re-standardised by the normal-scores
// transform so the proxy is itself on the z-scale.
ProxyVariable make_proxy(const ZMatrix& z, const std::vector<std::size_t>& member_columns,
                         std::string group_id = "proxy");

// Sigma = A A^T + Psi^2, or the bordered matrix with the latent variable W last.
CorrelationMatrix simulate_one_factor(const std::vector<double>& loadings, bool include_latent = false);

// Bi-factor correlation: global loadings gamma and group partial loadings delta.
CorrelationMatrix simulate_bifactor(const std::vector<double>& global_loadings,
                                    const std::vector<double>& group_partial_loadings,
                                    const std::vector<std::vector<std::size_t>>& groups);

// n draws from N(0, R), one sample per row.
Eigen::MatrixXd sample_gaussian(const CorrelationMatrix& r, std::size_t n, std::mt19937_64& rng);

struct OneFactorSample {
  Eigen::MatrixXd observed;  // n x d
  Eigen::VectorXd latent;    // n
};

// Z_j = a_j W + sqrt(1 - a_j^2) e_j
OneFactorSample sample_one_factor(const std::vector<double>& loadings, std::size_t n,
                                  std::mt19937_64& rng);

std::vector<double> uniform_loadings(std::size_t d, double lo, double hi, std::mt19937_64& rng);

}  // namespace vinedep
