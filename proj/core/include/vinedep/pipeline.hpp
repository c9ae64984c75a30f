#pragma once

#include "vinedep/config.hpp"
#include "vinedep/correlation.hpp"
#include "vinedep/factor.hpp"
#include "vinedep/graphs.hpp"
#include "vinedep/grouping.hpp"
#include "vinedep/transform.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace vinedep {

struct GroupReport {
  std::size_t id = 0;  // 1-based
  std::vector<std::string> members;
  double homogeneity = 0.0;
  std::vector<double> loadings;  // per member, after reorientation
  double fit_objective = 0.0;
  std::size_t fit_iterations = 0;
  bool fit_converged = true;
  double t_rowsum = 0.0;
  bool t_rowsum_defaulted = true;
  std::vector<std::string> flagged;
  std::string proxy;  // empty when the group has no proxy
  std::vector<std::string> proxy_members;
  // Share of proxy members joined to their proxy in the first vine tree.
  std::optional<double> attachment;
};

struct RunReport {
  std::string input;
  std::size_t samples = 0;
  std::size_t variables = 0;
  bool imputation_skipped = true;
  std::vector<ImputationRecord> imputation;
  bool correlation_repaired = false;
  double min_eigenvalue = 0.0;
  std::optional<std::size_t> m;
  bool m_defaulted = true;
  std::vector<std::size_t> m_candidates;
  std::vector<double> m_criterion;
  std::vector<GroupReport> groups;
  std::vector<std::string> isolated;
  std::vector<std::string> flipped;
  std::vector<DependenceGraph> graphs;
  std::vector<std::string> notes;
  PipelineConfig config;

  std::size_t edge_count(const std::string& method) const;
};

struct PipelineResult {
  RunReport report;
  CorrelationMatrix correlation;  // observed variables, input orientation
  CorrelationMatrix reoriented;   // observed variables after group reorientation
  CorrelationMatrix augmented;    // reoriented variables plus proxies
  GroupPartition partition;
};

// Runs impute, rank transform, correlation, grouping, fit, reorientation, residual
// screening, proxies and the requested graph methods. Method "all" also runs cdg and
// foci on the proxy-augmented matrix ("cdg+proxy", "foci+proxy"). Failures are
// rethrown as StageError tagged with the stage name. Nothing is written.
PipelineResult run_pipeline(const DataMatrix& data, const PipelineConfig& config);
// Reads config.input first.
PipelineResult run_pipeline(const PipelineConfig& config);

// tc, cdg, foci and vine on a given matrix at the config's thresholds. Variables named
// in `proxy_names` (e.g. a known latent variable) are tagged as proxies.
RunReport compare_methods(const CorrelationMatrix& r, const PipelineConfig& config,
                          const std::vector<std::string>& proxy_names = {});

std::string report_to_json(const RunReport& report);
// method, edges
std::string edge_count_table(const RunReport& report);
// method, node, degree
std::string degree_table(const RunReport& report);

// Every output file of a run as (relative path, contents), rendered before any write.
std::vector<std::pair<std::filesystem::path, std::string>> render_outputs(const PipelineResult& result);
std::vector<std::pair<std::filesystem::path, std::string>> render_outputs(const RunReport& report);
// Writes rendered outputs below `dir`; returns the written paths.
std::vector<std::filesystem::path> write_outputs(
    const std::vector<std::pair<std::filesystem::path, std::string>>& outputs, const std::filesystem::path& dir);

}  // namespace vinedep
