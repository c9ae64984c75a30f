#include "vinedep/graphs.hpp"

#include "vinedep/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace vinedep {

namespace {

void check_tau(double tau, const char* method) {
  if (!(tau >= 0.0 && tau < 1.0)) {
    throw InvalidArgument(std::string(method) + " threshold must lie in [0, 1), got " + std::to_string(tau));
  }
}

bool is_proxy(const std::string& name, const std::vector<std::string>& proxy_names) {
  return std::find(proxy_names.begin(), proxy_names.end(), name) != proxy_names.end();
}

}  // namespace

DependenceGraph::DependenceGraph(std::vector<GraphNode> nodes, std::string method)
    : nodes_(std::move(nodes)), method_(std::move(method)) {}

void DependenceGraph::add_edge(GraphEdge e) {
  if (e.a == e.b) throw InvalidArgument("dependence graph cannot hold a self loop");
  if (e.a > e.b) std::swap(e.a, e.b);
  if (e.b >= nodes_.size()) throw InvalidArgument("edge endpoint out of range");
  if (has_edge(e.a, e.b)) {
    throw InvalidArgument("duplicate edge " + nodes_[e.a].name + " -- " + nodes_[e.b].name);
  }
  pairs_.insert({e.a, e.b});
  edges_.push_back(std::move(e));
}

bool DependenceGraph::has_edge(std::size_t a, std::size_t b) const {
  if (a > b) std::swap(a, b);
  return pairs_.count({a, b}) > 0;
}

std::vector<std::array<std::size_t, 2>> DependenceGraph::edge_pairs() const {
  std::vector<std::array<std::size_t, 2>> out;
  for (const auto& e : edges_) out.push_back({e.a, e.b});
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::size_t> DependenceGraph::degrees() const {
  std::vector<std::size_t> deg(nodes_.size(), 0);
  for (const auto& e : edges_) {
    ++deg[e.a];
    ++deg[e.b];
  }
  return deg;
}

std::vector<GraphNode> graph_nodes(const CorrelationMatrix& r, const std::vector<std::string>& proxy_names) {
  std::vector<GraphNode> nodes;
  for (const auto& name : r.variable_names()) {
    nodes.push_back({name, is_proxy(name, proxy_names) ? NodeKind::proxy : NodeKind::observed});
  }
  return nodes;
}

DependenceGraph graph_tc(const CorrelationMatrix& r, double tau, const std::vector<std::string>& proxy_names) {
  check_tau(tau, "tc");
  DependenceGraph g(graph_nodes(r, proxy_names), "tc");
  const auto d = r.size();
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i + 1; j < d; ++j) {
      if (std::abs(r(i, j)) > tau) g.add_edge({i, j, r(i, j), 0, {}, false});
    }
  }
  return g;
}

DependenceGraph graph_cdg(const CorrelationMatrix& r, double tau, const std::vector<std::string>& proxy_names) {
  check_tau(tau, "cdg");
  const Eigen::MatrixXd pc = partial_corr_given_rest(r);
  DependenceGraph g(graph_nodes(r, proxy_names), "cdg");
  const auto d = r.size();
  const std::size_t order = d >= 2 ? d - 2 : 0;
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i + 1; j < d; ++j) {
      const double v = pc(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      if (std::abs(v) > tau) g.add_edge({i, j, v, order, {}, false});
    }
  }
  return g;
}

DependenceGraph graph_foci(const CorrelationMatrix& r, double tau, const std::vector<std::string>& proxy_names) {
  check_tau(tau, "foci");
  DependenceGraph g(graph_nodes(r, proxy_names), "foci");
  const auto d = r.size();
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i + 1; j < d; ++j) {
      const double rij = std::abs(r(i, j));
      if (rij < tau) continue;
      double smallest = std::numeric_limits<double>::infinity();
      std::size_t arg = d;
      for (std::size_t k = 0; k < d; ++k) {
        if (k == i || k == j) continue;
        const double rik = r(i, k);
        const double rjk = r(j, k);
        const double den_i = 1.0 - rik * rik;
        const double den_j = 1.0 - rjk * rjk;
        if (den_i <= kSingularityTolerance || den_j <= kSingularityTolerance) {
          throw SingularityError(den_i <= kSingularityTolerance ? i : j, k, {},
                                 "foci: |rho| = 1 between " + r.variable_names()[den_i <= kSingularityTolerance ? i : j] +
                                     " and " + r.variable_names()[k]);
        }
        const double stat = (rij - std::abs(rik) * std::abs(rjk)) / std::sqrt(den_i * den_j);
        if (stat < smallest) {
          smallest = stat;
          arg = k;
        }
      }
      if (arg == d) {
        g.add_edge({i, j, r(i, j), 0, {}, false});
      } else if (smallest >= tau) {
        g.add_edge({i, j, smallest, 1, {arg}, false});
      }
    }
  }
  return g;
}

DependenceGraph vine_to_graph(const VineStructure& v, const VineDrawThresholds& thresholds,
                              const std::vector<std::string>& proxy_names, std::string method) {
  std::vector<GraphNode> nodes;
  for (std::size_t j = 0; j < v.d; ++j) {
    const std::string name = j < v.variable_names.size() ? v.variable_names[j] : "V" + std::to_string(j + 1);
    nodes.push_back({name, is_proxy(name, proxy_names) ? NodeKind::proxy : NodeKind::observed});
  }
  DependenceGraph g(std::move(nodes), std::move(method));
  for (std::size_t l = 1; l <= v.trees.size(); ++l) {
    for (const auto& e : v.trees[l - 1]) {
      const double mag = std::abs(e.value);
      if (l == 1) {
        g.add_edge({e.conditioned[0], e.conditioned[1], e.value, 0, {}, mag > thresholds.tree_label});
        continue;
      }
      const auto bucket = std::min<std::size_t>(l - 1, 3) - 1;
      if (mag > thresholds.draw[bucket]) {
        g.add_edge({e.conditioned[0], e.conditioned[1], e.value, l - 1, e.conditioning,
                    mag > thresholds.label[bucket]});
      }
    }
  }
  return g;
}

const char* order_color(std::size_t order) {
  switch (order) {
    case 0: return "black";
    case 1: return "blue";
    case 2: return "red";
    default: return "green";
  }
}

}  // namespace vinedep
