#include "oracles.hpp"

#include "vinedep/correlation.hpp"
#include "vinedep/error.hpp"
#include "vinedep/factor.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>

using namespace vinedep;

TEST_CASE("correlation matrix validates its input") {
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(3, 3);
  m(0, 1) = 0.5;
  CHECK_THROWS_AS(CorrelationMatrix{m}, InvalidArgument);  // asymmetric
  m(1, 0) = 0.5;
  CHECK_NOTHROW(CorrelationMatrix{m});
  Eigen::MatrixXd bad_diag = m;
  bad_diag(2, 2) = 0.9;
  CHECK_THROWS_AS(CorrelationMatrix{bad_diag}, InvalidArgument);
  Eigen::MatrixXd big = Eigen::MatrixXd::Identity(2, 2);
  big(0, 1) = big(1, 0) = 1.2;
  CHECK_THROWS_AS(CorrelationMatrix{big}, InvalidArgument);
  CHECK_THROWS_AS(CorrelationMatrix(Eigen::MatrixXd::Identity(2, 2), {"a"}), InvalidArgument);
  CHECK(CorrelationMatrix(m).variable_names() == std::vector<std::string>{"V1", "V2", "V3"});
}

TEST_CASE("positive definiteness is flagged, not enforced") {
  Eigen::MatrixXd m = Eigen::MatrixXd::Ones(3, 3);
  const CorrelationMatrix r(m);
  CHECK_FALSE(r.positive_definite());
  CHECK_THROWS_AS(partial_corr_given_rest(r), NotPositiveDefiniteError);
  CHECK_THROWS_AS(log_det(r), NotPositiveDefiniteError);
  const auto fixed = repair_pd(r);
  CHECK(fixed.positive_definite());
  CHECK(fixed.min_eigenvalue() > 0.0);
  CHECK(fixed.values().diagonal().isOnes());
  CHECK(CorrelationMatrix(oracle::printed_sigma()).positive_definite());
  const CorrelationMatrix id(Eigen::MatrixXd::Identity(4, 4));
  CHECK(repair_pd(id).values() == id.values());
}

TEST_CASE("empirical correlation") {
  SUBCASE("identical columns") {
    Eigen::MatrixXd x(4, 2);
    x << 1, 1, 2, 2, 3, 3, 5, 5;
    const auto r = empirical_corr(ZMatrix(x, {"a", "b"}));
    CHECK(r(0, 1) == doctest::Approx(1.0));
    CHECK_FALSE(r.positive_definite());
  }
  SUBCASE("independent columns") {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> normal;
    Eigen::MatrixXd x(10000, 4);
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      for (Eigen::Index j = 0; j < x.cols(); ++j) x(i, j) = normal(rng);
    }
    const auto r = empirical_corr(ZMatrix(x, {"a", "b", "c", "d"}));
    const Eigen::MatrixXd off = r.values() - Eigen::MatrixXd::Identity(4, 4);
    CHECK(off.cwiseAbs().maxCoeff() < 0.05);
  }
  SUBCASE("one-factor population value") {
    std::mt19937_64 rng(2);
    const auto s = sample_one_factor({0.9, 0.8}, 100000, rng);
    const auto r = empirical_corr(ZMatrix(s.observed, {"a", "b"}));
    CHECK(r(0, 1) == doctest::Approx(0.72).epsilon(0.01 / 0.72));
  }
}

TEST_CASE("recursive partial correlations on the printed matrix") {
  const CorrelationMatrix sigma(oracle::printed_sigma());
  CHECK(partial_corr_recursive(sigma, 1, 2, {0}) == doctest::Approx(0.29).epsilon(0.005 / 0.29));
  CHECK(partial_corr_recursive(sigma, 8, 9, {0}) == doctest::Approx(0.06).epsilon(0.005 / 0.06));
  // Hand evaluation of the first-order formula.
  const double hand = (0.69 - 0.77 * 0.73) / std::sqrt((1 - 0.77 * 0.77) * (1 - 0.73 * 0.73));
  CHECK(partial_corr_recursive(sigma, 1, 2, {0}) == doctest::Approx(hand).epsilon(1e-14));
}

TEST_CASE("recursion agrees with the inversion oracle and an alternate peel order") {
  std::mt19937_64 rng(6);
  for (int rep = 0; rep < 5; ++rep) {
    const auto r = random_correlation_matrix(6, rng);
    PartialCorrelationCalculator calc(r);
    for (std::size_t i = 0; i < 6; ++i) {
      for (std::size_t j = i + 1; j < 6; ++j) {
        std::vector<std::size_t> pool;
        for (std::size_t k = 0; k < 6; ++k) {
          if (k != i && k != j) pool.push_back(k);
        }
        for (auto cond : oracle::subsets(pool)) {
          const double v = calc(i, j, cond);
          CHECK(std::abs(v - oracle::partial_by_inverse(r.values(), i, j, cond)) < 1e-10);
          CHECK(std::abs(v - oracle::partial_by_recursion_desc(r.values(), i, j, cond)) < 1e-10);
          std::reverse(cond.begin(), cond.end());
          CHECK(std::abs(calc(j, i, cond) - v) < 1e-12);
        }
      }
    }
    CHECK(calc.cache_size() > 0);
  }
}

TEST_CASE("recursion on the identity is zero") {
  const CorrelationMatrix id(Eigen::MatrixXd::Identity(5, 5));
  CHECK(partial_corr_recursive(id, 0, 4, {1, 2, 3}) == 0.0);
  const auto pc = partial_corr_given_rest(id);
  CHECK(pc.isIdentity());
}

TEST_CASE("recursion validates its arguments") {
  const CorrelationMatrix id(Eigen::MatrixXd::Identity(4, 4));
  CHECK_THROWS_AS(partial_corr_recursive(id, 1, 1, {}), InvalidArgument);
  CHECK_THROWS_AS(partial_corr_recursive(id, 0, 5, {}), InvalidArgument);
  CHECK_THROWS_AS(partial_corr_recursive(id, 0, 1, {1}), InvalidArgument);
  CHECK_THROWS_AS(partial_corr_recursive(id, 0, 1, {2, 2}), InvalidArgument);
  const auto full = PartialCorrelationCalculator(id).compute(3, 0, {2, 1});
  CHECK(full.i == 0);
  CHECK(full.j == 3);
  CHECK(full.conditioning == std::vector<std::size_t>{1, 2});
}

TEST_CASE("singular intermediate terms are reported") {
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(3, 3);
  m(0, 2) = m(2, 0) = 1.0;
  m(1, 2) = m(2, 1) = 0.5;
  m(0, 1) = m(1, 0) = 0.5;
  const CorrelationMatrix r(m);
  try {
    partial_corr_recursive(r, 0, 1, {2});
    FAIL("expected SingularityError");
  } catch (const SingularityError& e) {
    CHECK(e.first() == 0);
    CHECK(e.second() == 2);
    CHECK(e.conditioning().empty());
  }
}

TEST_CASE("partial correlations given the rest") {
  SUBCASE("printed matrix entries") {
    const auto pc = partial_corr_given_rest(CorrelationMatrix(oracle::printed_sigma()));
    CHECK(std::abs(pc(0, 1) - 0.29) <= 0.01);
    CHECK(std::abs(pc(0, 9) - 0.09) <= 0.01);
  }
  SUBCASE("matches the inversion oracle with all others conditioned") {
    std::mt19937_64 rng(8);
    const auto r = random_correlation_matrix(5, rng);
    const auto pc = partial_corr_given_rest(r);
    CHECK(pc(1, 3) == doctest::Approx(oracle::partial_by_inverse(r.values(), 1, 3, {0, 2, 4})).epsilon(1e-12));
    CHECK(pc.isApprox(pc.transpose()));
  }
  SUBCASE("factor sparsification") {
    double previous = 1.0;
    for (std::size_t d : {10, 20, 40, 80}) {
      const auto pc = partial_corr_given_rest(simulate_one_factor(std::vector<double>(d, 0.7)));
      const double worst = (pc - Eigen::MatrixXd::Identity(pc.rows(), pc.cols())).cwiseAbs().maxCoeff();
      CHECK(worst < previous);
      previous = worst;
    }
  }
}

TEST_CASE("log determinant") {
  CHECK(log_det(CorrelationMatrix(Eigen::MatrixXd::Identity(4, 4))) == 0.0);
  Eigen::MatrixXd m(2, 2);
  m << 1.0, 0.6, 0.6, 1.0;
  CHECK(log_det(CorrelationMatrix(m)) == doctest::Approx(std::log(1 - 0.36)).epsilon(1e-14));
  std::mt19937_64 rng(3);
  const auto r = random_correlation_matrix(7, rng);
  CHECK(log_det(r) == doctest::Approx(std::log(r.values().determinant())).epsilon(1e-12));
  CHECK(log_det(r) < 0.0);
}

TEST_CASE("submatrix and permutation keep names") {
  const CorrelationMatrix r(oracle::printed_sigma_star(),
                            {"Z1", "Z2", "Z3", "Z4", "Z5", "Z6", "Z7", "Z8", "Z9", "Z10", "W"});
  const auto s = r.submatrix({10, 0});
  CHECK(s.variable_names() == std::vector<std::string>{"W", "Z1"});
  CHECK(s(0, 1) == 0.90);
  CHECK_THROWS_AS(r.submatrix({11}), InvalidArgument);
}
