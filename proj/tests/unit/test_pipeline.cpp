#include "oracles.hpp"

#include "vinedep/data_io.hpp"
#include "vinedep/error.hpp"
#include "vinedep/factor.hpp"
#include "vinedep/pipeline.hpp"

#include <doctest.h>
#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <random>

using namespace vinedep;

namespace {

DataMatrix table1_sample(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const auto s = sample_one_factor(oracle::kTable1Loadings, n, rng);
  return DataMatrix(s.observed, {});
}

std::vector<oracle::Pair> pairs_of(const RunReport& rep, const std::string& method) {
  for (const auto& g : rep.graphs) {
    if (g.method() == method) {
      std::vector<oracle::Pair> out;
      for (auto p : g.edge_pairs()) out.push_back(p);
      return out;
    }
  }
  FAIL("no graph for method " << method);
  return {};
}

const DependenceGraph* find_graph(const RunReport& rep, const std::string& method) {
  for (const auto& g : rep.graphs) {
    if (g.method() == method) return &g;
  }
  return nullptr;
}

PipelineConfig config_with(std::initializer_list<std::pair<const char*, const char*>> kv) {
  PipelineConfig c;
  for (auto [k, v] : kv) c.set(k, v);
  return c;
}

}  // namespace

TEST_CASE("observed-only run skips imputation and clustering") {
  const auto result = run_pipeline(table1_sample(400, 1), config_with({{"method", "tc"}}));
  const auto& rep = result.report;
  CHECK(rep.imputation_skipped);
  CHECK(rep.groups.empty());
  CHECK_FALSE(rep.m.has_value());
  REQUIRE(rep.graphs.size() == 1);
  CHECK(rep.graphs[0].method() == "tc");
  CHECK(rep.samples == 400);
  CHECK(rep.variables == 10);
  const auto j = nlohmann::json::parse(report_to_json(rep));
  CHECK(j["imputation"]["skipped"] == true);
  CHECK(j["edge_counts"]["tc"] == rep.edge_count("tc"));
}

TEST_CASE("sampled one-factor data reproduces the population graphs with a proxy") {
  auto config = config_with({{"method", "all"}, {"tau", "0.2"}, {"m", "1"}, {"seed", "3"}, {"max_level", "2"}});
  config.set("draw", "0.2,0.2,0.2");
  const auto result = run_pipeline(table1_sample(50000, 2), config);
  const auto& rep = result.report;
  REQUIRE(rep.groups.size() == 1);
  CHECK(rep.groups[0].proxy == "proxy1");
  CHECK(rep.groups[0].proxy_members.size() == 10);
  CHECK(rep.flipped.empty());
  const auto star = oracle::star_on_w(10);
  CHECK(pairs_of(rep, "foci+proxy") == star);
  CHECK(pairs_of(rep, "vine+proxy") == star);
  CHECK(*rep.groups[0].attachment == 1.0);
  CHECK(pairs_of(rep, "cdg") == oracle::table1_cdg());
  CHECK(rep.edge_count("tc") == 45);
  // Proxy node is tagged.
  const auto* g = find_graph(rep, "vine+proxy");
  REQUIRE(g != nullptr);
  CHECK(g->nodes().back().kind == NodeKind::proxy);
  CHECK(g->nodes().back().name == "proxy1");
}

TEST_CASE("planted groups each get a proxy their members attach to") {
  std::mt19937_64 rng(8);
  std::vector<std::vector<std::size_t>> groups(3);
  for (std::size_t j = 0; j < 30; ++j) groups[j / 10].push_back(j);
  const auto gamma = uniform_loadings(30, 0.3, 0.8, rng);
  const auto delta = uniform_loadings(30, 0.4, 0.7, rng);
  const auto r = simulate_bifactor(gamma, delta, groups);
  const DataMatrix data(sample_gaussian(r, 3000, rng), {});
  const auto result = run_pipeline(data, config_with({{"method", "vine+proxy"}, {"m", "3"}, {"seed", "4"}}));
  const auto& rep = result.report;
  REQUIRE(rep.groups.size() == 3);
  for (const auto& g : rep.groups) {
    CHECK_FALSE(g.proxy.empty());
    REQUIRE(g.attachment.has_value());
    CHECK(*g.attachment > 0.8);
  }
  REQUIRE(rep.graphs.size() == 1);
  CHECK(rep.graphs[0].nodes().size() == 33);
  CHECK(result.augmented.size() == 33);
  CHECK(result.partition.groups.size() == 3);
}

TEST_CASE("strong-residual variables are left out of the proxy") {
  Eigen::MatrixXd m = oracle::one_factor_sigma({0.8, 0.8, 0.8, 0.8, 0.6, 0.6}, false);
  m(4, 5) = m(5, 4) = m(4, 5) + 0.4;
  std::mt19937_64 rng(12);
  const DataMatrix data(sample_gaussian(CorrelationMatrix(m), 5000, rng), {});
  const auto result = run_pipeline(
      data, config_with({{"method", "vine+proxy"}, {"m", "1"}, {"seed", "1"}, {"t_max", "0.15"}, {"tau_weak", "0.1"}}));
  REQUIRE(result.report.groups.size() == 1);
  const auto& g = result.report.groups[0];
  CHECK(g.flagged == std::vector<std::string>{"V5", "V6"});
  CHECK(g.proxy_members == std::vector<std::string>{"V1", "V2", "V3", "V4"});
  CHECK(g.t_rowsum_defaulted);
  CHECK(g.t_rowsum == doctest::Approx(default_residual_rowsum(6)));
}

TEST_CASE("negative loadings are reoriented") {
  std::mt19937_64 rng(21);
  const auto s = sample_one_factor({0.8, -0.7, 0.75, 0.6, -0.65, 0.7}, 3000, rng);
  const DataMatrix data(s.observed, {"a", "b", "c", "d", "e", "f"});
  const auto result = run_pipeline(data, config_with({{"method", "vine+proxy"}, {"m", "1"}, {"seed", "2"}}));
  CHECK(result.report.flipped == std::vector<std::string>{"b", "e"});
  for (double a : result.report.groups[0].loadings) CHECK(a > 0.0);
  CHECK(result.reoriented(0, 1) == doctest::Approx(-result.correlation(0, 1)));
  CHECK(result.reoriented.variable_names()[1] == "b-");
}

TEST_CASE("identical inputs give identical outputs") {
  const auto data = table1_sample(800, 5);
  const auto config = config_with({{"method", "all"}, {"seed", "9"}});
  const auto a = render_outputs(run_pipeline(data, config));
  const auto b = render_outputs(run_pipeline(data, config));
  REQUIRE(a.size() == b.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    CHECK(a[k].first == b[k].first);
    CHECK(a[k].second == b[k].second);
  }
  std::vector<std::string> names;
  for (const auto& [p, text] : a) names.push_back(p.generic_string());
  for (const char* expect : {"report.json", "config.txt", "edge_counts.tsv", "degrees.tsv", "partition.tsv",
                             "graphs/vine_proxy.dot", "graphs/tc.dot"}) {
    CHECK(std::find(names.begin(), names.end(), expect) != names.end());
  }
}

TEST_CASE("the report marks defaulted decisions") {
  const auto result = run_pipeline(table1_sample(600, 6), config_with({{"method", "all"}, {"seed", "9"}}));
  const auto& rep = result.report;
  CHECK(rep.m_defaulted);
  CHECK_FALSE(rep.m_candidates.empty());
  const auto j = nlohmann::json::parse(report_to_json(rep));
  CHECK(j["m"]["defaulted"] == true);
  bool seen_seed = false;
  for (const auto& p : j["parameters"]) {
    if (p["key"] == "seed") {
      seen_seed = true;
      CHECK(p["defaulted"] == false);
    }
    if (p["key"] == "tau_cdg") CHECK(p["defaulted"] == true);
  }
  CHECK(seen_seed);
  CHECK(j.contains("proxy_rule"));
  CHECK(edge_count_table(rep).rfind("method\tedges\n", 0) == 0);
  CHECK(degree_table(rep).rfind("method\tnode\tdegree\n", 0) == 0);
}

TEST_CASE("failures carry their stage") {
  auto stage_of = [](const DataMatrix& data, const PipelineConfig& c) -> std::string {
    try {
      run_pipeline(data, c);
    } catch (const StageError& e) {
      return e.stage();
    }
    return "none";
  };
  const auto data = table1_sample(200, 7);
  CHECK(stage_of(data, config_with({{"method", "all"}})) == "config");
  CHECK(stage_of(data, config_with({{"method", "tc"}, {"groups", "1"}})) == "config");
  CHECK(stage_of(data, config_with({{"method", "all"}, {"seed", "1"}, {"m", "4"}})) == "cluster");
  Eigen::MatrixXd flat = data.values();
  flat.col(3).setConstant(1.0);
  CHECK(stage_of(DataMatrix(flat, {}), config_with({{"method", "tc"}})) == "impute");
  try {
    run_pipeline(DataMatrix(flat, {}), config_with({{"method", "tc"}}));
  } catch (const StageError& e) {
    CHECK(std::string(e.what()).rfind("[impute] ", 0) == 0);
    CHECK(std::string(e.what()).find("V4") != std::string::npos);
  }
}

TEST_CASE("a failed run writes nothing") {
  const auto dir = std::filesystem::temp_directory_path() / "vinedep_pipeline_nowrite";
  std::filesystem::remove_all(dir);
  auto c = config_with({{"method", "all"}});
  c.output_dir = dir;
  CHECK_THROWS_AS(write_outputs(render_outputs(run_pipeline(table1_sample(100, 1), c)), dir), StageError);
  CHECK_FALSE(std::filesystem::exists(dir));
}

TEST_CASE("matrix comparison") {
  const auto rep = compare_methods(simulate_one_factor(oracle::kTable1Loadings), make_preset("table1"));
  CHECK(rep.edge_count("tc") == 45);
  CHECK(rep.edge_count("cdg") == 3);
  CHECK(rep.edge_count("foci") == 15);
  CHECK(rep.edge_count("vine") == 13);

  const auto id = compare_methods(CorrelationMatrix(Eigen::MatrixXd::Identity(5, 5)), PipelineConfig{});
  CHECK(id.edge_count("tc") == 0);
  CHECK(id.edge_count("cdg") == 0);
  CHECK(id.edge_count("foci") == 0);
  CHECK(id.edge_count("vine") == 4);  // the first tree always spans
}

TEST_CASE("reading input from a file") {
  const auto dir = std::filesystem::temp_directory_path() / "vinedep_pipeline_input";
  std::filesystem::remove_all(dir);
  const auto path = dir / "in.tsv";
  write_text(path, format_table(table_from(table1_sample(100, 3)), '\t'));
  auto c = config_with({{"method", "foci"}});
  c.input = path;
  const auto result = run_pipeline(c);
  CHECK(result.report.input == path.string());
  CHECK(result.report.samples == 100);
  c.input = dir / "absent.tsv";
  CHECK_THROWS_AS(run_pipeline(c), StageError);
  std::filesystem::remove_all(dir);
}
