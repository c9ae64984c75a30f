#include "oracles.hpp"

#include "vinedep/correlation.hpp"
#include "vinedep/error.hpp"
#include "vinedep/factor.hpp"
#include "vinedep/transform.hpp"

#include <doctest.h>

#include <algorithm>
#include <limits>
#include <numeric>
#include <random>

using namespace vinedep;

TEST_CASE("one-factor generator matches the closed form") {
  const auto s = simulate_one_factor(oracle::kTable1Loadings, true);
  CHECK((s.values() - oracle::one_factor_sigma(oracle::kTable1Loadings, true)).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(std::abs(s(0, 1) - 0.774) < 1e-12);
  CHECK(s.variable_names().back() == "W");
  CHECK(s.variable_names().front() == "Z1");
  // The printed matrix is this one rounded to two decimals, up to a few rounding slips.
  CHECK((s.values() - oracle::printed_sigma_star()).cwiseAbs().maxCoeff() < 0.02);
  CHECK(simulate_one_factor(std::vector<double>(4, 0.0)).values().isIdentity());
  CHECK(simulate_one_factor({0.3, -0.5})(0, 1) == doctest::Approx(-0.15));
  CHECK_THROWS_AS(simulate_one_factor({0.5, 1.0}), InvalidArgument);
}

TEST_CASE("exact one-factor input is recovered") {
  const auto r = simulate_one_factor(oracle::kTable1Loadings);
  const auto fit = fit_one_factor(r);
  for (std::size_t k = 0; k < fit.loadings.size(); ++k) {
    CHECK(std::abs(fit.loadings[k] - oracle::kTable1Loadings[k]) < 1e-6);
    CHECK(std::abs(fit.uniquenesses[k] - (1 - fit.loadings[k] * fit.loadings[k])) < 1e-12);
  }
  CHECK(fit.objective < 1e-12);
  for (std::size_t k = 1; k < fit.objective_trace.size(); ++k) {
    CHECK(fit.objective_trace[k] <= fit.objective_trace[k - 1] + 1e-15);
  }
  const auto implied = fit.implied_correlation();
  CHECK(implied.diagonal().isOnes(1e-12));
}

TEST_CASE("largest loading is made positive") {
  const auto r = simulate_one_factor({-0.8, 0.7, 0.6});
  const auto fit = fit_one_factor(r);
  CHECK(fit.loadings[0] == doctest::Approx(0.8).epsilon(1e-6));
  CHECK(fit.loadings[1] == doctest::Approx(-0.7).epsilon(1e-6));
  CHECK(fit.loadings[2] == doctest::Approx(-0.6).epsilon(1e-6));
  // Either sign reproduces the same correlations.
  const auto implied = fit.implied_correlation();
  CHECK((implied - r.values()).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("identity gives zero loadings") {
  const auto fit = fit_one_factor(CorrelationMatrix(Eigen::MatrixXd::Identity(5, 5)));
  for (double a : fit.loadings) CHECK(std::abs(a) < 1e-12);
  CHECK(fit.objective == doctest::Approx(0.0));
}

TEST_CASE("fit needs three variables and reports non-convergence") {
  CHECK_THROWS_AS(fit_one_factor(CorrelationMatrix(Eigen::MatrixXd::Identity(2, 2))), InvalidArgument);
  std::mt19937_64 rng(3);
  const auto r = random_correlation_matrix(8, rng);
  OneFactorOptions opts;
  opts.max_iterations = 1;
  opts.relative_tolerance = 0.0;
  try {
    fit_one_factor(r, opts);
    FAIL("expected ConvergenceError");
  } catch (const ConvergenceError& e) {
    CHECK(e.last_iterate().size() == 8);
    CHECK_FALSE(e.objective_trace().empty());
  }
}

TEST_CASE("residual report flags by the two thresholds") {
  const auto base = oracle::one_factor_sigma({0.8, 0.7, 0.6, 0.5, 0.7}, false);
  const auto fit = OneFactorFit::from_loadings({0.8, 0.7, 0.6, 0.5, 0.7});
  SUBCASE("exact input") {
    const auto rep = residual_report(CorrelationMatrix(base), fit, 0.2, 10.0);
    CHECK(rep.residuals.cwiseAbs().maxCoeff() < 1e-15);
    CHECK(rep.flagged().empty());
  }
  SUBCASE("one perturbed pair") {
    Eigen::MatrixXd m = base;
    m(1, 3) += 0.3;
    m(3, 1) += 0.3;
    const CorrelationMatrix r(m);
    const auto rep = residual_report(r, fit, 0.2, 10.0);
    CHECK(rep.flagged() == std::vector<std::size_t>{1, 3});
    CHECK(rep.residuals(1, 3) == doctest::Approx(0.3));
    CHECK(rep.residuals.diagonal().isZero());
    const double inf = std::numeric_limits<double>::infinity();
    CHECK(residual_report(r, fit, inf, inf).flagged().empty());
    // Row-sum rule alone.
    CHECK(residual_report(r, fit, 0.9, 0.25).flagged() == std::vector<std::size_t>{1, 3});
  }
  CHECK(default_residual_rowsum(5) == doctest::Approx(0.5));
  CHECK(kDefaultResidualMax == 0.25);
}

TEST_CASE("proxy is a z-scale column") {
  std::mt19937_64 rng(10);
  const auto s = sample_one_factor({0.8, 0.7, 0.6, 0.75}, 300, rng);
  const auto z = rank_to_normal(DataMatrix(s.observed, {}));
  const auto p = make_proxy(z, {0, 1, 2, 3}, "g1");
  CHECK(p.group_id == "g1");
  CHECK(p.member_columns == std::vector<std::size_t>{0, 1, 2, 3});
  std::vector<double> sorted(p.values.data(), p.values.data() + p.values.size());
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    CHECK(sorted[k] == doctest::Approx(normal_quantile((k + 0.5) / 300.0)).epsilon(1e-12));
  }
  CHECK(oracle::pearson(p.values, s.latent) > 0.85);

  const auto single = make_proxy(z, {2});
  CHECK((single.values - z.values().col(2)).cwiseAbs().maxCoeff() < 1e-12);

  const auto twin = z.with_column(z.values().col(1), "twin");
  const auto pair = make_proxy(twin, {1, 4});
  CHECK((pair.values - z.values().col(1)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK_THROWS_AS(make_proxy(z, {}), InvalidArgument);
}

TEST_CASE("bi-factor generator") {
  const std::vector<std::vector<std::size_t>> groups = {{0, 1, 2}, {3, 4, 5}};
  const auto r = simulate_bifactor(std::vector<double>(6, 0.5), std::vector<double>(6, 0.6), groups);
  CHECK(r(0, 1) == doctest::Approx(0.52));
  CHECK(r(0, 3) == doctest::Approx(0.25));
  const std::vector<double> gamma = {0.3, 0.5, 0.7, 0.4, 0.6, 0.2};
  const auto degenerate = simulate_bifactor(gamma, std::vector<double>(6, 0.0), groups);
  CHECK((degenerate.values() - simulate_one_factor(gamma).values()).cwiseAbs().maxCoeff() < 1e-15);
  CHECK_THROWS_AS(simulate_bifactor(gamma, gamma, {{0, 1, 2}, {3, 4}}), InvalidArgument);
  CHECK_THROWS_AS(simulate_bifactor(gamma, gamma, {{0, 1, 2}, {2, 3, 4, 5}}), InvalidArgument);

  SUBCASE("sampled loadings") {
    std::mt19937_64 rng(60);
    std::vector<std::vector<std::size_t>> g3(3);
    for (std::size_t j = 0; j < 60; ++j) g3[j / 20].push_back(j);
    const auto gl = uniform_loadings(60, 0.3, 0.8, rng);
    const auto dl = uniform_loadings(60, 0.4, 0.7, rng);
    const auto big = simulate_bifactor(gl, dl, g3);
    CHECK(big.positive_definite());
    // Within-group correlation exceeds the between-group value for the same pair of loadings.
    for (std::size_t i = 0; i < 60; ++i) {
      for (std::size_t j = 0; j < 60; ++j) {
        if (i != j && i / 20 == j / 20) CHECK(big(i, j) > gl[i] * gl[j]);
        if (i / 20 != j / 20) CHECK(big(i, j) == doctest::Approx(gl[i] * gl[j]));
      }
    }
  }
  SUBCASE("groups are independent given the global factor") {
    // Append the global factor: correlation gamma_j with every variable.
    const std::vector<double> d6 = {0.5, 0.6, 0.4, 0.7, 0.5, 0.6};
    const auto b = simulate_bifactor(gamma, d6, groups);
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(7, 7);
    m.topLeftCorner(6, 6) = b.values();
    for (int j = 0; j < 6; ++j) m(j, 6) = m(6, j) = gamma[static_cast<std::size_t>(j)];
    const CorrelationMatrix with_global(m);
    CHECK(std::abs(partial_corr_recursive(with_global, 0, 4, {6})) < 1e-12);
    CHECK(std::abs(partial_corr_recursive(with_global, 0, 1, {6})) > 0.1);
  }
}

TEST_CASE("samplers reproduce their correlation") {
  std::mt19937_64 rng(17);
  const auto s = sample_one_factor({0.9, 0.5, 0.7}, 20000, rng);
  CHECK(oracle::pearson(s.observed.col(0), s.latent) == doctest::Approx(0.9).epsilon(0.02));
  CHECK(oracle::pearson(s.observed.col(0), s.observed.col(1)) == doctest::Approx(0.45).epsilon(0.05));
  const auto x = sample_gaussian(simulate_one_factor({0.8, 0.8}), 20000, rng);
  CHECK(oracle::pearson(x.col(0), x.col(1)) == doctest::Approx(0.64).epsilon(0.03));
  const auto a = uniform_loadings(100, 0.5, 0.9, rng);
  CHECK(*std::min_element(a.begin(), a.end()) >= 0.5);
  CHECK(*std::max_element(a.begin(), a.end()) <= 0.9);
}
