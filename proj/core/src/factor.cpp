#include "vinedep/factor.hpp"

#include "vinedep/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace vinedep {

namespace {

double residual_objective(const Eigen::MatrixXd& r, const std::vector<double>& a) {
  double f = 0.0;
  const auto d = a.size();
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i + 1; j < d; ++j) {
      const double e = r(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) - a[i] * a[j];
      f += e * e;
    }
  }
  return f;
}

void check_loading(double a, const char* what) {
  if (!(a > -1.0 && a < 1.0)) {
    throw InvalidArgument(std::string(what) + " must lie in (-1, 1), got " + std::to_string(a));
  }
}

}  // namespace

OneFactorFit OneFactorFit::from_loadings(std::vector<double> loadings, const CorrelationMatrix* r) {
  OneFactorFit fit;
  fit.loadings = std::move(loadings);
  for (double a : fit.loadings) fit.uniquenesses.push_back(1.0 - a * a);
  if (r != nullptr) {
    if (r->size() != fit.loadings.size()) throw InvalidArgument("loading count does not match matrix");
    fit.objective = residual_objective(r->values(), fit.loadings);
  }
  return fit;
}

Eigen::MatrixXd OneFactorFit::implied_correlation() const {
  const auto d = static_cast<Eigen::Index>(loadings.size());
  const Eigen::Map<const Eigen::VectorXd> a(loadings.data(), d);
  Eigen::MatrixXd m = a * a.transpose();
  m.diagonal().setOnes();
  return m;
}

OneFactorFit fit_one_factor(const CorrelationMatrix& r, const OneFactorOptions& options) {
  const auto d = r.size();
  if (d < 3) throw InvalidArgument("a 1-factor model needs at least 3 variables");
  const Eigen::MatrixXd& rho = r.values();
  const double bound = options.loading_bound;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(rho);
  const double lambda = std::max(es.eigenvalues()(es.eigenvalues().size() - 1), 0.0);
  const Eigen::VectorXd v = es.eigenvectors().col(es.eigenvectors().cols() - 1);
  std::vector<double> a(d);
  for (std::size_t i = 0; i < d; ++i) {
    a[i] = std::clamp(v(static_cast<Eigen::Index>(i)) * std::sqrt(lambda), -bound, bound);
  }

  std::vector<double> trace{residual_objective(rho, a)};
  bool converged = false;
  std::size_t iter = 0;
  while (!converged && iter < options.max_iterations) {
    ++iter;
    for (std::size_t i = 0; i < d; ++i) {
      double num = 0.0;
      double den = 0.0;
      for (std::size_t j = 0; j < d; ++j) {
        if (j == i) continue;
        num += rho(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * a[j];
        den += a[j] * a[j];
      }
      a[i] = den > std::numeric_limits<double>::min() ? std::clamp(num / den, -bound, bound) : 0.0;
    }
    const double prev = trace.back();
    const double f = residual_objective(rho, a);
    trace.push_back(f);
    converged = (prev - f) <= options.relative_tolerance * prev || f <= 1e-28;
  }
  if (!converged) {
    throw ConvergenceError("1-factor fit did not converge in " + std::to_string(options.max_iterations) +
                               " iterations (objective " + std::to_string(trace.back()) + ")",
                           a, trace);
  }

  const auto largest = std::max_element(a.begin(), a.end(), [](double x, double y) {
    return std::abs(x) < std::abs(y);
  });
  if (largest != a.end() && *largest < 0.0) {
    for (double& x : a) x = -x;
  }
  for (double& x : a) {
    if (x == 0.0) x = 0.0;  // no negative zeros
  }

  OneFactorFit fit = OneFactorFit::from_loadings(std::move(a));
  fit.objective = trace.back();
  fit.objective_trace = std::move(trace);
  fit.iterations = iter;
  return fit;
}

std::vector<std::size_t> ResidualReport::flagged() const {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < strong_residual.size(); ++j) {
    if (strong_residual[j]) out.push_back(j);
  }
  return out;
}

ResidualReport residual_report(const CorrelationMatrix& data, const OneFactorFit& fit, double t_max,
                               double t_rowsum) {
  if (data.size() != fit.loadings.size()) {
    throw InvalidArgument("residual report: fit and matrix dimensions differ");
  }
  ResidualReport rep;
  rep.t_max = t_max;
  rep.t_rowsum = t_rowsum;
  rep.residuals = (fit.implied_correlation() - data.values()).cwiseAbs();
  rep.residuals.diagonal().setZero();
  const auto d = rep.residuals.rows();
  rep.strong_residual.assign(static_cast<std::size_t>(d), false);
  for (Eigen::Index j = 0; j < d; ++j) {
    const double row_max = rep.residuals.row(j).maxCoeff();
    const double row_sum = rep.residuals.row(j).sum();
    rep.strong_residual[static_cast<std::size_t>(j)] = row_max > t_max || row_sum > t_rowsum;
  }
  return rep;
}

double default_residual_rowsum(std::size_t group_size) {
  return 0.25 * (static_cast<double>(group_size) - 1.0) * 0.5;
}

ProxyVariable make_proxy(const ZMatrix& z, const std::vector<std::size_t>& member_columns,
                         std::string group_id) {
  if (member_columns.empty()) throw InvalidArgument("proxy '" + group_id + "' has no member columns");
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(z.samples()));
  for (std::size_t c : member_columns) {
    if (c >= z.variables()) throw InvalidArgument("proxy member column out of range");
    sum += z.values().col(static_cast<Eigen::Index>(c));
  }
  const Eigen::VectorXd mean = sum / static_cast<double>(member_columns.size());
  return {std::move(group_id), normal_scores(mean), member_columns};
}

CorrelationMatrix simulate_one_factor(const std::vector<double>& loadings, bool include_latent) {
  for (double a : loadings) check_loading(a, "loading");
  const auto d = loadings.size();
  const auto size = static_cast<Eigen::Index>(include_latent ? d + 1 : d);
  Eigen::MatrixXd s = Eigen::MatrixXd::Identity(size, size);
  std::vector<std::string> names;
  for (std::size_t i = 0; i < d; ++i) {
    names.push_back("Z" + std::to_string(i + 1));
    for (std::size_t j = 0; j < d; ++j) {
      if (i != j) s(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = loadings[i] * loadings[j];
    }
  }
  if (include_latent) {
    names.emplace_back("W");
    const auto w = static_cast<Eigen::Index>(d);
    for (std::size_t i = 0; i < d; ++i) {
      s(static_cast<Eigen::Index>(i), w) = loadings[i];
      s(w, static_cast<Eigen::Index>(i)) = loadings[i];
    }
  }
  return CorrelationMatrix(std::move(s), std::move(names));
}

CorrelationMatrix simulate_bifactor(const std::vector<double>& global_loadings,
                                    const std::vector<double>& group_partial_loadings,
                                    const std::vector<std::vector<std::size_t>>& groups) {
  const auto d = global_loadings.size();
  if (group_partial_loadings.size() != d) {
    throw InvalidArgument("bi-factor: global and group loading counts differ");
  }
  for (double a : global_loadings) check_loading(a, "global loading");
  for (double a : group_partial_loadings) check_loading(a, "group partial loading");

  std::vector<int> label(d, -1);
  for (std::size_t g = 0; g < groups.size(); ++g) {
    for (std::size_t j : groups[g]) {
      if (j >= d) throw InvalidArgument("bi-factor partition index out of range");
      if (label[j] != -1) throw InvalidArgument("bi-factor partition assigns variable twice");
      label[j] = static_cast<int>(g);
    }
  }
  if (std::find(label.begin(), label.end(), -1) != label.end()) {
    throw InvalidArgument("bi-factor partition does not cover every variable");
  }

  Eigen::MatrixXd s = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      if (i == j) continue;
      const double gi = global_loadings[i];
      const double gj = global_loadings[j];
      double v = gi * gj;
      if (label[i] == label[j]) {
        v += group_partial_loadings[i] * group_partial_loadings[j] * std::sqrt(1.0 - gi * gi) *
             std::sqrt(1.0 - gj * gj);
      }
      s(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
    }
  }
  return CorrelationMatrix(std::move(s));
}

Eigen::MatrixXd sample_gaussian(const CorrelationMatrix& r, std::size_t n, std::mt19937_64& rng) {
  require_positive_definite(r, "sample_gaussian");
  const auto d = r.values().rows();
  Eigen::LLT<Eigen::MatrixXd> llt(r.values());
  const Eigen::MatrixXd l = llt.matrixL();
  std::normal_distribution<double> normal;
  Eigen::MatrixXd e(static_cast<Eigen::Index>(n), d);
  for (Eigen::Index i = 0; i < e.rows(); ++i) {
    for (Eigen::Index j = 0; j < d; ++j) e(i, j) = normal(rng);
  }
  return e * l.transpose();
}

OneFactorSample sample_one_factor(const std::vector<double>& loadings, std::size_t n,
                                  std::mt19937_64& rng) {
  for (double a : loadings) check_loading(a, "loading");
  std::normal_distribution<double> normal;
  const auto d = static_cast<Eigen::Index>(loadings.size());
  OneFactorSample out{Eigen::MatrixXd(static_cast<Eigen::Index>(n), d),
                      Eigen::VectorXd(static_cast<Eigen::Index>(n))};
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(n); ++i) {
    const double w = normal(rng);
    out.latent(i) = w;
    for (Eigen::Index j = 0; j < d; ++j) {
      const double a = loadings[static_cast<std::size_t>(j)];
      out.observed(i, j) = a * w + std::sqrt(1.0 - a * a) * normal(rng);
    }
  }
  return out;
}

std::vector<double> uniform_loadings(std::size_t d, double lo, double hi, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> out(d);
  for (auto& a : out) a = u(rng);
  return out;
}

}  // namespace vinedep
