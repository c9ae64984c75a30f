#pragma once

#include "vinedep/correlation.hpp"

#include <array>
#include <cstddef>
#include <string>
#include <vector>

namespace vinedep {

// Edge (a, b; S) of tree `level`. For level 1 `nodes` are the variables a and b;
// for level l > 1 they index the two edges of tree l-1 that this edge joins.
struct VineEdge {
  std::array<std::size_t, 2> conditioned{};  // a < b
  std::vector<std::size_t> conditioning;     // S, ascending, |S| = level - 1
  double value = 0.0;                        // rho_{a,b;S}
  std::size_t level = 1;
  std::array<std::size_t, 2> nodes{};

  // {a, b} union S, ascending.
  std::vector<std::size_t> label_set() const;
};

struct VineStructure {
  std::size_t d = 0;
  std::vector<std::vector<VineEdge>> trees;  // trees[l-1] is T_l
  std::vector<std::string> variable_names;

  std::size_t truncation_level() const noexcept { return trees.size(); }
  std::size_t edge_count() const;
};

struct SpanningCandidate {
  std::size_t u = 0;
  std::size_t v = 0;
  double weight = 0.0;
  std::array<std::size_t, 2> tie_key{};  // ascending conditioned pair
};

// Kruskal over candidates sorted by descending weight, then ascending tie key, then
// ascending (u, v). Returns indices into `candidates`, or an empty vector when the
// candidate graph does not span all nodes.
std::vector<std::size_t> maximum_spanning_tree(std::size_t node_count,
                                               const std::vector<SpanningCandidate>& candidates);

// -log(1 - rho^2)
double edge_weight(double rho);

inline constexpr std::size_t kDefaultMaxLevel = 3;
inline constexpr double kDefaultStopThreshold = 0.1;

// Sequential maximum spanning trees. Stops after max_level trees, or before a level
// whose candidates all have |partial correlation| below stop_threshold.
VineStructure build_truncated_vine(const CorrelationMatrix& r, std::size_t max_level = kDefaultMaxLevel,
                                   double stop_threshold = kDefaultStopThreshold);

// Two nodes of tree l (edges of tree l-1) may be joined iff their label sets have a
// symmetric difference of exactly two elements.
bool proximity_admissible(const VineEdge& a, const VineEdge& b);

// Edge joining two admissible nodes of the previous tree (value left at 0).
VineEdge join_nodes(const std::vector<VineEdge>& previous_tree, std::size_t n1, std::size_t n2);

struct VineValidation {
  bool ok = true;
  std::string condition;  // "tree-count", "tree-size", "node-chaining", "spanning-tree", "proximity", "labels"
  std::size_t level = 0;
  std::vector<std::size_t> offending_edges;
  std::string message;
};

VineValidation validate_vine(const VineStructure& v);

// Correlation matrix parameterised by the edge values of a full vine (all d-1 trees).
// Set later-tree values to zero to obtain an exactly truncated vine.
CorrelationMatrix vine_to_correlation(const VineStructure& v);

}  // namespace vinedep
