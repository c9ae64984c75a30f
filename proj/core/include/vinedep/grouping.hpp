#pragma once

#include "vinedep/correlation.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace vinedep {

struct GroupPartition {
  std::vector<std::vector<std::size_t>> groups;  // each sorted ascending, ordered by first member
  std::vector<std::size_t> isolated;             // sorted ascending
  std::vector<double> homogeneity;               // mean squared correlation with the group component

  std::size_t variable_count() const;
  // Group index per variable, -1 for isolated.
  std::vector<int> labels(std::size_t d) const;
  // Throws InvalidArgument unless groups and isolated partition {0..d-1}.
  void validate(std::size_t d) const;
  // Variables in group order followed by isolated ones (heatmap ordering).
  std::vector<std::size_t> sorted_order() const;
};

struct ClvOptions {
  std::size_t restarts = 20;
  std::size_t max_iterations = 100;
};

struct ClvRestartTrace {
  std::vector<double> criterion;  // total homogeneity after each iteration
  bool discarded = false;
};

// Clustering of variables around latent components. Total homogeneity is the sum,
// over variables, of the squared correlation with their group's first principal
// component (equivalently, the sum of the groups' leading eigenvalues).
GroupPartition clv_partition(const CorrelationMatrix& r, std::size_t m, std::uint64_t seed,
                             const ClvOptions& options = {},
                             std::vector<ClvRestartTrace>* traces = nullptr);

double total_homogeneity(const CorrelationMatrix& r, const std::vector<std::vector<std::size_t>>& groups);

// Moves variables whose largest within-group |rho| is below tau_weak to the isolated
// set, repeating until stable. Groups that shrink below three members dissolve.
GroupPartition separate_weak(const GroupPartition& partition, const CorrelationMatrix& r, double tau_weak);

struct GroupCountChoice {
  std::size_t m = 1;
  std::vector<std::size_t> candidates;
  std::vector<double> criterion;  // total homogeneity per candidate
};

// Scans m = 1..min(12, d/3) and keeps the last m whose gain over m - 1 is at least
// min_gain (relative).
GroupCountChoice choose_group_count(const CorrelationMatrix& r, std::uint64_t seed,
                                    double min_gain = 0.05, const ClvOptions& options = {});

double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b);

// Two-column table: variable_name, group label ("1".."m" or "isolated").
std::string format_partition(const GroupPartition& p, const std::vector<std::string>& names);
GroupPartition parse_partition(const std::string& text, const std::vector<std::string>& names);

}  // namespace vinedep
