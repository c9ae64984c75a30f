#include "vinedep/transform.hpp"

#include "vinedep/error.hpp"

#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace vinedep {

namespace {

bool is_nan(double x) { return std::isnan(x); }

std::vector<std::string> default_names(std::size_t count, const char* prefix) {
  std::vector<std::string> names(count);
  for (std::size_t i = 0; i < count; ++i) names[i] = prefix + std::to_string(i + 1);
  return names;
}

double pearson(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  const double mx = x.mean();
  const double my = y.mean();
  const Eigen::ArrayXd dx = x.array() - mx;
  const Eigen::ArrayXd dy = y.array() - my;
  const double sxx = (dx * dx).sum();
  const double syy = (dy * dy).sum();
  if (sxx <= 0.0 || syy <= 0.0) return 0.0;
  return (dx * dy).sum() / std::sqrt(sxx * syy);
}

// 1-based fractional rank of x within an ascending sample, linear between order
// statistics and clamped to [1, m]. Exact hits on tied values get the average rank.
double fractional_rank(const std::vector<double>& sorted, double x) {
  const auto m = sorted.size();
  const auto lo = std::lower_bound(sorted.begin(), sorted.end(), x);
  const auto hi = std::upper_bound(sorted.begin(), sorted.end(), x);
  if (lo != hi) {
    const auto first = static_cast<double>(lo - sorted.begin()) + 1.0;
    const auto last = static_cast<double>(hi - sorted.begin());
    return 0.5 * (first + last);
  }
  if (lo == sorted.begin()) return 1.0;
  if (lo == sorted.end()) return static_cast<double>(m);
  const auto k = static_cast<std::size_t>(lo - sorted.begin());  // sorted[k-1] < x < sorted[k]
  const double a = sorted[k - 1];
  const double b = sorted[k];
  return static_cast<double>(k) + (x - a) / (b - a);
}

// Inverse of fractional_rank: value at a fractional 1-based rank.
double quantile_at_rank(const std::vector<double>& sorted, double rank) {
  const auto m = sorted.size();
  rank = std::clamp(rank, 1.0, static_cast<double>(m));
  const auto k = static_cast<std::size_t>(std::floor(rank));
  if (k >= m) return sorted.back();
  const double t = rank - static_cast<double>(k);
  return sorted[k - 1] + t * (sorted[k] - sorted[k - 1]);
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const auto m = v.size();
  return m % 2 == 1 ? v[m / 2] : 0.5 * (v[m / 2 - 1] + v[m / 2]);
}

}  // namespace

DataMatrix::DataMatrix(Eigen::MatrixXd values, std::vector<std::string> variable_names,
                       std::vector<std::string> sample_ids)
    : values_(std::move(values)),
      variable_names_(std::move(variable_names)),
      sample_ids_(std::move(sample_ids)) {
  const auto n = samples();
  const auto d = variables();
  if (n < 3 || d < 2) {
    throw InvalidArgument("data matrix needs at least 3 samples and 2 variables, got " +
                          std::to_string(n) + "x" + std::to_string(d));
  }
  if (variable_names_.empty()) variable_names_ = default_names(d, "V");
  if (sample_ids_.empty()) sample_ids_ = default_names(n, "S");
  if (variable_names_.size() != d) throw InvalidArgument("variable name count does not match columns");
  if (sample_ids_.size() != n) throw InvalidArgument("sample id count does not match rows");
  for (std::size_t j = 0; j < d; ++j) {
    if (missing_count(j) == n) {
      throw DegenerateVariableError(variable_names_[j],
                                    "variable '" + variable_names_[j] + "' is entirely missing");
    }
  }
}

bool DataMatrix::is_missing(std::size_t row, std::size_t col) const {
  return is_nan(values_(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)));
}

std::size_t DataMatrix::missing_count(std::size_t col) const {
  return static_cast<std::size_t>(values_.col(static_cast<Eigen::Index>(col)).array().isNaN().count());
}

std::size_t DataMatrix::missing_count() const {
  return static_cast<std::size_t>(values_.array().isNaN().count());
}

void DataMatrix::check_not_degenerate() const {
  for (std::size_t j = 0; j < variables(); ++j) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t i = 0; i < samples(); ++i) {
      if (is_missing(i, j)) continue;
      const double x = values_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
    if (!(hi > lo)) {
      throw DegenerateVariableError(variable_names_[j],
                                    "variable '" + variable_names_[j] + "' is constant");
    }
  }
}

ZMatrix::ZMatrix(Eigen::MatrixXd values, std::vector<std::string> variable_names,
                 std::vector<int> orientation)
    : values_(std::move(values)),
      orientation_(std::move(orientation)),
      variable_names_(std::move(variable_names)) {
  const auto d = variables();
  if (variable_names_.empty()) variable_names_ = default_names(d, "V");
  if (orientation_.empty()) orientation_.assign(d, 1);
  if (variable_names_.size() != d || orientation_.size() != d) {
    throw InvalidArgument("z-matrix labels do not match its column count");
  }
  for (int s : orientation_) {
    if (s != 1 && s != -1) throw InvalidArgument("orientation entries must be +1 or -1");
  }
}

ZMatrix ZMatrix::with_column(const Eigen::VectorXd& column, std::string name) const {
  if (column.size() != values_.rows()) throw InvalidArgument("appended column has the wrong length");
  Eigen::MatrixXd out(values_.rows(), values_.cols() + 1);
  out << values_, column;
  auto names = variable_names_;
  names.push_back(std::move(name));
  auto orient = orientation_;
  orient.push_back(1);
  return ZMatrix(std::move(out), std::move(names), std::move(orient));
}

ZMatrix ZMatrix::select_columns(const std::vector<std::size_t>& columns) const {
  Eigen::MatrixXd out(values_.rows(), static_cast<Eigen::Index>(columns.size()));
  std::vector<std::string> names;
  std::vector<int> orient;
  for (std::size_t k = 0; k < columns.size(); ++k) {
    if (columns[k] >= variables()) throw InvalidArgument("column index out of range");
    out.col(static_cast<Eigen::Index>(k)) = values_.col(static_cast<Eigen::Index>(columns[k]));
    names.push_back(variable_names_[columns[k]]);
    orient.push_back(orientation_[columns[k]]);
  }
  return ZMatrix(std::move(out), std::move(names), std::move(orient));
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw InvalidArgument("normal quantile needs p in (0, 1)");
  return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

double normal_cdf(double x) {
  return boost::math::cdf(boost::math::normal_distribution<double>(), x);
}

std::vector<double> average_ranks(const Eigen::Ref<const Eigen::VectorXd>& column) {
  const auto n = static_cast<std::size_t>(column.size());
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return column(static_cast<Eigen::Index>(a)) < column(static_cast<Eigen::Index>(b));
  });
  std::vector<double> ranks(n);
  std::size_t start = 0;
  while (start < n) {
    std::size_t end = start + 1;
    const double v = column(static_cast<Eigen::Index>(order[start]));
    while (end < n && column(static_cast<Eigen::Index>(order[end])) == v) ++end;
    const double rank = 0.5 * (static_cast<double>(start + 1) + static_cast<double>(end));
    for (std::size_t k = start; k < end; ++k) ranks[order[k]] = rank;
    start = end;
  }
  return ranks;
}

Eigen::VectorXd normal_scores(const Eigen::Ref<const Eigen::VectorXd>& column) {
  const auto ranks = average_ranks(column);
  const double n = static_cast<double>(ranks.size());
  Eigen::VectorXd z(column.size());
  for (std::size_t i = 0; i < ranks.size(); ++i) {
    z(static_cast<Eigen::Index>(i)) = normal_quantile((ranks[i] - 0.5) / n);
  }
  return z;
}

ZMatrix rank_to_normal(const DataMatrix& data) {
  if (data.has_missing()) {
    throw NotImputedError("data has " + std::to_string(data.missing_count()) +
                          " missing cells; impute before transforming");
  }
  data.check_not_degenerate();
  Eigen::MatrixXd z(data.values().rows(), data.values().cols());
  for (Eigen::Index j = 0; j < z.cols(); ++j) z.col(j) = normal_scores(data.values().col(j));
  return ZMatrix(std::move(z), data.variable_names());
}

ImputationResult impute_missing(const DataMatrix& data, const ImputationOptions& options) {
  data.check_not_degenerate();
  const auto n = data.samples();
  const auto d = data.variables();
  const auto& x = data.values();

  std::vector<std::size_t> complete;
  for (std::size_t j = 0; j < d; ++j) {
    if (data.missing_count(j) == 0) complete.push_back(j);
  }

  Eigen::MatrixXd out = x;
  std::vector<ImputationRecord> records;

  for (std::size_t v = 0; v < d; ++v) {
    const auto missing = data.missing_count(v);
    if (missing == 0) continue;

    std::vector<Eigen::Index> observed_rows;
    std::vector<Eigen::Index> missing_rows;
    for (std::size_t i = 0; i < n; ++i) {
      (data.is_missing(i, v) ? missing_rows : observed_rows).push_back(static_cast<Eigen::Index>(i));
    }
    const auto m = observed_rows.size();

    ImputationRecord rec;
    rec.variable = v;
    rec.variable_name = data.variable_names()[v];
    rec.cells_imputed = missing;

    if (m < options.min_joint_samples || complete.empty()) {
      throw ImputationError(rec.variable_name,
                            "no fully observed surrogate shares " +
                                std::to_string(options.min_joint_samples) +
                                " observed samples with variable '" + rec.variable_name + "'");
    }

    Eigen::VectorXd v_obs(static_cast<Eigen::Index>(m));
    for (std::size_t k = 0; k < m; ++k) v_obs(static_cast<Eigen::Index>(k)) = x(observed_rows[k], static_cast<Eigen::Index>(v));
    const Eigen::VectorXd zv = normal_scores(v_obs);

    // Surrogate search; ties keep the smallest column index.
    double best_abs = -1.0;
    double best_corr = 0.0;
    std::size_t best = 0;
    Eigen::VectorXd best_zs;
    std::vector<double> abs_corrs;
    for (std::size_t s : complete) {
      Eigen::VectorXd s_obs(static_cast<Eigen::Index>(m));
      for (std::size_t k = 0; k < m; ++k) s_obs(static_cast<Eigen::Index>(k)) = x(observed_rows[k], static_cast<Eigen::Index>(s));
      const Eigen::VectorXd zs = normal_scores(s_obs);
      const double r = pearson(zv, zs);
      abs_corrs.push_back(std::abs(r));
      if (std::abs(r) > best_abs) {
        best_abs = std::abs(r);
        best_corr = r;
        best = s;
        best_zs = zs;
      }
    }
    for (double a : abs_corrs) {
      if (std::abs(a - best_abs) <= 1e-12) ++rec.tied_candidates;
    }
    rec.tied_candidates -= 1;
    rec.surrogate = best;
    rec.surrogate_name = data.variable_names()[best];
    rec.surrogate_correlation = best_corr;

    std::vector<double> v_sorted(v_obs.data(), v_obs.data() + v_obs.size());
    std::sort(v_sorted.begin(), v_sorted.end());

    if (best_abs < options.correlation_floor) {
      const double med = median_of(v_sorted);
      for (auto row : missing_rows) out(row, static_cast<Eigen::Index>(v)) = med;
      rec.method = ImputationMethod::median;
      rec.warning = "best surrogate '" + rec.surrogate_name + "' has |correlation| " +
                    std::to_string(best_abs) + " below the floor; filled with the median";
      records.push_back(std::move(rec));
      continue;
    }

    const double slope = zv.dot(best_zs) / best_zs.squaredNorm();
    rec.slope = slope;
    rec.method = ImputationMethod::surrogate;

    std::vector<double> s_sorted(m);
    for (std::size_t k = 0; k < m; ++k) s_sorted[k] = x(observed_rows[k], static_cast<Eigen::Index>(best));
    std::sort(s_sorted.begin(), s_sorted.end());

    const double md = static_cast<double>(m);
    for (auto row : missing_rows) {
      const double s_value = x(row, static_cast<Eigen::Index>(best));
      const double zs = normal_quantile((fractional_rank(s_sorted, s_value) - 0.5) / md);
      const double zv_hat = slope * zs;
      const double rank_v = md * normal_cdf(zv_hat) + 0.5;
      out(row, static_cast<Eigen::Index>(v)) = quantile_at_rank(v_sorted, rank_v);
    }
    records.push_back(std::move(rec));
  }

  return {DataMatrix(std::move(out), data.variable_names(), data.sample_ids()), std::move(records)};
}

ZMatrix reorient(const ZMatrix& z, const std::set<std::size_t>& flip) {
  Eigen::MatrixXd values = z.values();
  auto orientation = z.orientation();
  auto names = z.variable_names();
  for (std::size_t j : flip) {
    if (j >= z.variables()) throw InvalidArgument("flip index out of range");
    const auto col = static_cast<Eigen::Index>(j);
    values.col(col) = -values.col(col);
    orientation[j] = -orientation[j];
    if (orientation[j] < 0) {
      names[j] += '-';
    } else if (!names[j].empty() && names[j].back() == '-') {
      names[j].pop_back();
    }
  }
  return ZMatrix(std::move(values), std::move(names), std::move(orientation));
}

}  // namespace vinedep
