#pragma once

#include "vinedep/correlation.hpp"
#include "vinedep/vine.hpp"

#include <array>
#include <cstddef>
#include <set>
#include <string>
#include <vector>

namespace vinedep {

enum class NodeKind { observed, proxy };

struct GraphNode {
  std::string name;
  NodeKind kind = NodeKind::observed;
  friend bool operator==(const GraphNode&, const GraphNode&) = default;
};

struct GraphEdge {
  std::size_t a = 0;  // a < b
  std::size_t b = 0;
  double value = 0.0;
  std::size_t order = 0;                  // size of the conditioning set, 0 for a correlation
  std::vector<std::size_t> conditioning;  // empty when order is 0 or the set is "all others"
  bool labeled = false;
  friend bool operator==(const GraphEdge&, const GraphEdge&) = default;
};

// Undirected labelled graph; no self loops, no duplicate pairs.
class DependenceGraph {
public:
  DependenceGraph() = default;
  DependenceGraph(std::vector<GraphNode> nodes, std::string method);

  const std::vector<GraphNode>& nodes() const noexcept { return nodes_; }
  const std::vector<GraphEdge>& edges() const noexcept { return edges_; }
  const std::string& method() const noexcept { return method_; }
  void set_method(std::string method) { method_ = std::move(method); }

  // Normalises the pair to a < b. Throws on self loops and duplicate pairs.
  void add_edge(GraphEdge e);
  bool has_edge(std::size_t a, std::size_t b) const;
  std::vector<std::array<std::size_t, 2>> edge_pairs() const;  // sorted
  std::vector<std::size_t> degrees() const;

  friend bool operator==(const DependenceGraph&, const DependenceGraph&) = default;

private:
  std::vector<GraphNode> nodes_;
  std::vector<GraphEdge> edges_;
  std::set<std::array<std::size_t, 2>> pairs_;
  std::string method_;
};

// Node list for R's variables; names listed in `proxy_names` are tagged as proxies.
std::vector<GraphNode> graph_nodes(const CorrelationMatrix& r, const std::vector<std::string>& proxy_names = {});

// Thresholding-Correlation: edge iff |rho_ij| > tau.
DependenceGraph graph_tc(const CorrelationMatrix& r, double tau, const std::vector<std::string>& proxy_names = {});

// Conditional dependence graph: edge iff |partial correlation given the rest| > tau.
DependenceGraph graph_cdg(const CorrelationMatrix& r, double tau, const std::vector<std::string>& proxy_names = {});

// First-order conditional independence: edge iff |rho_ij| >= tau and, for every k,
// (|rho_ij| - |rho_ik||rho_jk|) / sqrt((1 - rho_ik^2)(1 - rho_jk^2)) >= tau. The edge
// value is the smallest such statistic; its k is stored as the conditioning set.
DependenceGraph graph_foci(const CorrelationMatrix& r, double tau, const std::vector<std::string>& proxy_names = {});

// Drawing and labelling thresholds for vine graphs, indexed by order bucket
// (1, 2, 3+). First-tree edges are always drawn and labelled above tree_label.
struct VineDrawThresholds {
  std::array<double, 3> draw{0.25, 0.15, 0.30};
  std::array<double, 3> label{0.5, 0.3, 0.4};
  double tree_label = 0.5;
};

DependenceGraph vine_to_graph(const VineStructure& v, const VineDrawThresholds& thresholds,
                              const std::vector<std::string>& proxy_names = {}, std::string method = "vine");

// Edge colour bucket: black for order 0, blue 1, red 2, green 3+.
const char* order_color(std::size_t order);

}  // namespace vinedep
