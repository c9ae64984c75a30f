#include "vinedep/correlation.hpp"
#include "vinedep/factor.hpp"
#include "vinedep/graphs.hpp"
#include "vinedep/grouping.hpp"
#include "vinedep/transform.hpp"
#include "vinedep/vine.hpp"

#include <benchmark/benchmark.h>

#include <numeric>
#include <random>

using namespace vinedep;

namespace {

CorrelationMatrix random_matrix(std::size_t d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return random_correlation_matrix(d, rng);
}

CorrelationMatrix planted(std::size_t d, std::size_t groups, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::vector<std::size_t>> g(groups);
  for (std::size_t j = 0; j < d; ++j) g[j * groups / d].push_back(j);
  return simulate_bifactor(uniform_loadings(d, 0.3, 0.8, rng), uniform_loadings(d, 0.4, 0.7, rng), g);
}

void BM_PartialRecursion(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  const auto r = random_matrix(d, 1);
  std::vector<std::size_t> cond(d - 2);
  std::iota(cond.begin(), cond.end(), 2);
  for (auto _ : state) {
    PartialCorrelationCalculator calc(r);
    benchmark::DoNotOptimize(calc(0, 1, cond));
  }
}
BENCHMARK(BM_PartialRecursion)->Arg(8)->Arg(12)->Arg(16);

void BM_PartialGivenRest(benchmark::State& state) {
  const auto r = random_matrix(static_cast<std::size_t>(state.range(0)), 2);
  for (auto _ : state) benchmark::DoNotOptimize(partial_corr_given_rest(r));
}
BENCHMARK(BM_PartialGivenRest)->Arg(50)->Arg(200);

void BM_TruncatedVine(benchmark::State& state) {
  const auto r = random_matrix(static_cast<std::size_t>(state.range(0)), 3);
  for (auto _ : state) benchmark::DoNotOptimize(build_truncated_vine(r, 3, 0.0));
}
BENCHMARK(BM_TruncatedVine)->Arg(30)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_Clv(benchmark::State& state) {
  const auto r = planted(static_cast<std::size_t>(state.range(0)), 4, 4);
  for (auto _ : state) benchmark::DoNotOptimize(clv_partition(r, 4, 7));
}
BENCHMARK(BM_Clv)->Arg(60)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_OneFactorFit(benchmark::State& state) {
  std::mt19937_64 rng(5);
  const auto r = simulate_one_factor(uniform_loadings(static_cast<std::size_t>(state.range(0)), 0.4, 0.9, rng));
  for (auto _ : state) benchmark::DoNotOptimize(fit_one_factor(r));
}
BENCHMARK(BM_OneFactorFit)->Arg(10)->Arg(100);

void BM_RankToNormal(benchmark::State& state) {
  std::mt19937_64 rng(6);
  const auto x = sample_gaussian(random_matrix(20, 6), static_cast<std::size_t>(state.range(0)), rng);
  const DataMatrix data(x, {});
  for (auto _ : state) benchmark::DoNotOptimize(rank_to_normal(data));
}
BENCHMARK(BM_RankToNormal)->Arg(100)->Arg(5000);

}  // namespace

BENCHMARK_MAIN();
