#include "vinedep/correlation.hpp"

#include "vinedep/error.hpp"

#include <algorithm>
#include <cmath>

namespace vinedep {

namespace {

bool cholesky_ok(const Eigen::MatrixXd& m) {
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  return llt.info() == Eigen::Success;
}

std::string index_list(const std::vector<std::size_t>& v) {
  std::string s = "{";
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (k) s += ",";
    s += std::to_string(v[k]);
  }
  return s + "}";
}

}  // namespace

CorrelationMatrix::CorrelationMatrix(Eigen::MatrixXd values, std::vector<std::string> variable_names)
    : values_(std::move(values)), variable_names_(std::move(variable_names)) {
  const auto d = values_.rows();
  if (d != values_.cols()) throw InvalidArgument("correlation matrix must be square");
  if (variable_names_.empty()) {
    for (Eigen::Index i = 0; i < d; ++i) variable_names_.push_back("V" + std::to_string(i + 1));
  }
  if (static_cast<Eigen::Index>(variable_names_.size()) != d) {
    throw InvalidArgument("correlation matrix name count does not match its dimension");
  }
  for (Eigen::Index i = 0; i < d; ++i) {
    if (std::abs(values_(i, i) - 1.0) > 1e-12) {
      throw InvalidArgument("correlation matrix diagonal entry " + std::to_string(i) + " is not 1");
    }
    values_(i, i) = 1.0;
    for (Eigen::Index j = i + 1; j < d; ++j) {
      if (!std::isfinite(values_(i, j)) || std::abs(values_(i, j) - values_(j, i)) > 1e-12) {
        throw InvalidArgument("correlation matrix is not symmetric at (" + std::to_string(i) + "," +
                              std::to_string(j) + ")");
      }
      if (std::abs(values_(i, j)) > 1.0) {
        throw InvalidArgument("correlation entry outside [-1, 1] at (" + std::to_string(i) + "," +
                              std::to_string(j) + ")");
      }
      values_(j, i) = values_(i, j);
    }
  }
  positive_definite_ = d > 0 && cholesky_ok(values_) && min_eigenvalue() > kPdTolerance;
}

double CorrelationMatrix::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(values_, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

CorrelationMatrix CorrelationMatrix::submatrix(const std::vector<std::size_t>& indices) const {
  const auto k = static_cast<Eigen::Index>(indices.size());
  Eigen::MatrixXd sub(k, k);
  std::vector<std::string> names;
  for (Eigen::Index a = 0; a < k; ++a) {
    if (indices[a] >= size()) throw InvalidArgument("submatrix index out of range");
    names.push_back(variable_names_[indices[a]]);
    for (Eigen::Index b = 0; b < k; ++b) {
      sub(a, b) = values_(static_cast<Eigen::Index>(indices[a]), static_cast<Eigen::Index>(indices[b]));
    }
  }
  return CorrelationMatrix(std::move(sub), std::move(names));
}

CorrelationMatrix empirical_corr(const ZMatrix& z) {
  if (z.samples() < 3) throw InvalidArgument("empirical correlation needs at least 3 samples");
  const Eigen::MatrixXd centered = z.values().rowwise() - z.values().colwise().mean();
  const Eigen::VectorXd ss = centered.colwise().squaredNorm();
  for (Eigen::Index j = 0; j < ss.size(); ++j) {
    if (!(ss(j) > 0.0)) {
      const auto& name = z.variable_names()[static_cast<std::size_t>(j)];
      throw DegenerateVariableError(name, "variable '" + name + "' is constant");
    }
  }
  const Eigen::VectorXd inv_sd = ss.array().sqrt().inverse();
  Eigen::MatrixXd r = inv_sd.asDiagonal() * (centered.transpose() * centered) * inv_sd.asDiagonal();
  r = 0.5 * (r + r.transpose());
  r = r.cwiseMax(-1.0).cwiseMin(1.0);
  r.diagonal().setOnes();
  return CorrelationMatrix(std::move(r), z.variable_names());
}

CorrelationMatrix repair_pd(const CorrelationMatrix& r) {
  const double lambda_min = r.min_eigenvalue();
  if (lambda_min > kRidgeFloor) return r;
  Eigen::MatrixXd m = r.values();
  m.diagonal().array() += kRidgeFloor - lambda_min + 1e-10;
  const Eigen::VectorXd inv_sd = m.diagonal().array().sqrt().inverse();
  m = inv_sd.asDiagonal() * m * inv_sd.asDiagonal();
  m = 0.5 * (m + m.transpose());
  m.diagonal().setOnes();
  return CorrelationMatrix(std::move(m), r.variable_names());
}

void require_positive_definite(const CorrelationMatrix& r, const std::string& context) {
  if (!r.positive_definite()) {
    throw NotPositiveDefiniteError(context +
                                   ": correlation matrix is not positive definite; apply the ridge "
                                   "repair (repair_pd) first");
  }
}

PartialCorrelationCalculator::PartialCorrelationCalculator(const CorrelationMatrix& r) : r_(&r) {}

double PartialCorrelationCalculator::operator()(std::size_t i, std::size_t j,
                                                std::vector<std::size_t> conditioning) {
  return compute(i, j, std::move(conditioning)).value;
}

PartialCorrelation PartialCorrelationCalculator::compute(std::size_t i, std::size_t j,
                                                         std::vector<std::size_t> conditioning) {
  const auto d = r_->size();
  if (i == j) throw InvalidArgument("partial correlation needs two distinct variables");
  if (i >= d || j >= d) throw InvalidArgument("partial correlation index out of range");
  std::sort(conditioning.begin(), conditioning.end());
  if (std::adjacent_find(conditioning.begin(), conditioning.end()) != conditioning.end()) {
    throw InvalidArgument("conditioning set has repeated indices");
  }
  for (auto k : conditioning) {
    if (k >= d) throw InvalidArgument("conditioning index out of range");
    if (k == i || k == j) throw InvalidArgument("conditioning set contains the conditioned pair");
  }
  const double value = recurse(i, j, conditioning);
  return {std::min(i, j), std::max(i, j), std::move(conditioning), value};
}

double PartialCorrelationCalculator::recurse(std::size_t i, std::size_t j,
                                             const std::vector<std::size_t>& conditioning) {
  if (i > j) std::swap(i, j);
  if (conditioning.empty()) return (*r_)(i, j);

  auto key = std::make_tuple(i, j, conditioning);
  if (auto it = cache_.find(key); it != cache_.end()) return it->second;

  const std::size_t k = conditioning.front();
  const std::vector<std::size_t> rest(conditioning.begin() + 1, conditioning.end());
  const double rij = recurse(i, j, rest);
  const double rik = recurse(i, k, rest);
  const double rjk = recurse(j, k, rest);
  const double di = 1.0 - rik * rik;
  const double dj = 1.0 - rjk * rjk;
  if (di <= kSingularityTolerance) {
    throw SingularityError(i, k, rest,
                           "singular partial correlation: 1 - rho^2 vanishes for (" + std::to_string(i) +
                               "," + std::to_string(k) + ") given " + index_list(rest));
  }
  if (dj <= kSingularityTolerance) {
    throw SingularityError(j, k, rest,
                           "singular partial correlation: 1 - rho^2 vanishes for (" + std::to_string(j) +
                               "," + std::to_string(k) + ") given " + index_list(rest));
  }
  const double value = (rij - rik * rjk) / std::sqrt(di * dj);
  cache_.emplace(std::move(key), value);
  return value;
}

double partial_corr_recursive(const CorrelationMatrix& r, std::size_t i, std::size_t j,
                              const std::vector<std::size_t>& conditioning) {
  PartialCorrelationCalculator calc(r);
  return calc(i, j, conditioning);
}

Eigen::MatrixXd partial_corr_given_rest(const CorrelationMatrix& r) {
  require_positive_definite(r, "partial_corr_given_rest");
  const auto d = r.values().rows();
  Eigen::LLT<Eigen::MatrixXd> llt(r.values());
  const Eigen::MatrixXd precision = llt.solve(Eigen::MatrixXd::Identity(d, d));
  const Eigen::VectorXd inv_sd = precision.diagonal().array().sqrt().inverse();
  Eigen::MatrixXd pc = -(inv_sd.asDiagonal() * precision * inv_sd.asDiagonal());
  pc = 0.5 * (pc + pc.transpose());
  pc.diagonal().setOnes();
  return pc;
}

double log_det(const CorrelationMatrix& r) {
  require_positive_definite(r, "log_det");
  Eigen::LLT<Eigen::MatrixXd> llt(r.values());
  const Eigen::MatrixXd& l = llt.matrixLLT();
  return 2.0 * l.diagonal().array().log().sum();
}

CorrelationMatrix random_correlation_matrix(std::size_t d, std::mt19937_64& rng, std::size_t extra) {
  std::normal_distribution<double> normal;
  const auto rows = static_cast<Eigen::Index>(d);
  const auto cols = static_cast<Eigen::Index>(d + extra);
  Eigen::MatrixXd g(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) g(i, j) = normal(rng);
  }
  Eigen::MatrixXd c = g * g.transpose();
  const Eigen::VectorXd inv_sd = c.diagonal().array().sqrt().inverse();
  c = inv_sd.asDiagonal() * c * inv_sd.asDiagonal();
  c = 0.5 * (c + c.transpose());
  c.diagonal().setOnes();
  return CorrelationMatrix(std::move(c));
}

}  // namespace vinedep
