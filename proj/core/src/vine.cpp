#include "vinedep/vine.hpp"

#include "vinedep/error.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace vinedep {

namespace {

class DisjointSets {
public:
  explicit DisjointSets(std::size_t n) : parent_(n), rank_(n, 0) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (rank_[a] < rank_[b]) std::swap(a, b);
    parent_[b] = a;
    if (rank_[a] == rank_[b]) ++rank_[a];
    return true;
  }

private:
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> rank_;
};

std::vector<std::size_t> set_difference_sym(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
  std::vector<std::size_t> out;
  std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

std::vector<std::size_t> set_intersection(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
  std::vector<std::size_t> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

VineValidation failure(std::string condition, std::size_t level, std::vector<std::size_t> edges,
                       std::string message) {
  return {false, std::move(condition), level, std::move(edges), std::move(message)};
}

}  // namespace

std::vector<std::size_t> VineEdge::label_set() const {
  std::vector<std::size_t> s = conditioning;
  s.push_back(conditioned[0]);
  s.push_back(conditioned[1]);
  std::sort(s.begin(), s.end());
  return s;
}

std::size_t VineStructure::edge_count() const {
  std::size_t n = 0;
  for (const auto& t : trees) n += t.size();
  return n;
}

double edge_weight(double rho) {
  const double one_minus = 1.0 - rho * rho;
  if (one_minus <= 0.0) return std::numeric_limits<double>::infinity();
  return -std::log(one_minus);
}

std::vector<std::size_t> maximum_spanning_tree(std::size_t node_count,
                                               const std::vector<SpanningCandidate>& candidates) {
  std::vector<std::size_t> order(candidates.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    const auto& a = candidates[x];
    const auto& b = candidates[y];
    if (a.weight != b.weight) return a.weight > b.weight;
    if (a.tie_key != b.tie_key) return a.tie_key < b.tie_key;
    if (a.u != b.u) return a.u < b.u;
    return a.v < b.v;
  });
  DisjointSets sets(node_count);
  std::vector<std::size_t> chosen;
  for (auto idx : order) {
    if (chosen.size() + 1 == node_count) break;
    if (sets.unite(candidates[idx].u, candidates[idx].v)) chosen.push_back(idx);
  }
  if (node_count > 0 && chosen.size() + 1 != node_count) return {};
  return chosen;
}

bool proximity_admissible(const VineEdge& a, const VineEdge& b) {
  return set_difference_sym(a.label_set(), b.label_set()).size() == 2;
}

VineEdge join_nodes(const std::vector<VineEdge>& previous_tree, std::size_t n1, std::size_t n2) {
  if (n1 > n2) std::swap(n1, n2);
  const auto u1 = previous_tree.at(n1).label_set();
  const auto u2 = previous_tree.at(n2).label_set();
  const auto diff = set_difference_sym(u1, u2);
  if (diff.size() != 2) throw InvalidArgument("nodes violate the proximity condition");
  VineEdge e;
  e.conditioned = {diff[0], diff[1]};
  e.conditioning = set_intersection(u1, u2);
  e.level = previous_tree.at(n1).level + 1;
  e.nodes = {n1, n2};
  return e;
}

VineStructure build_truncated_vine(const CorrelationMatrix& r, std::size_t max_level, double stop_threshold) {
  require_positive_definite(r, "build_truncated_vine");
  const auto d = r.size();
  if (d < 2) throw InvalidArgument("a vine needs at least two variables");
  if (max_level < 1 || max_level > d - 1) {
    throw InvalidArgument("max_level must lie in [1, d-1] = [1, " + std::to_string(d - 1) + "]");
  }
  if (!(stop_threshold >= 0.0 && stop_threshold < 1.0)) {
    throw InvalidArgument("stop_threshold must lie in [0, 1)");
  }

  VineStructure vine;
  vine.d = d;
  vine.variable_names = r.variable_names();
  PartialCorrelationCalculator calc(r);

  {
    std::vector<SpanningCandidate> candidates;
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = i + 1; j < d; ++j) candidates.push_back({i, j, edge_weight(r(i, j)), {i, j}});
    }
    const auto chosen = maximum_spanning_tree(d, candidates);
    if (chosen.empty()) throw std::logic_error("first vine tree is disconnected");
    std::vector<VineEdge> tree;
    for (auto idx : chosen) {
      const auto& c = candidates[idx];
      VineEdge e;
      e.conditioned = {c.u, c.v};
      e.value = r(c.u, c.v);
      e.level = 1;
      e.nodes = {c.u, c.v};
      tree.push_back(std::move(e));
    }
    vine.trees.push_back(std::move(tree));
  }

  for (std::size_t level = 2; level <= max_level; ++level) {
    const auto& prev = vine.trees.back();
    std::vector<VineEdge> edges;
    std::vector<SpanningCandidate> candidates;
    double largest = 0.0;
    for (std::size_t p = 0; p < prev.size(); ++p) {
      for (std::size_t q = p + 1; q < prev.size(); ++q) {
        if (!proximity_admissible(prev[p], prev[q])) continue;
        VineEdge e = join_nodes(prev, p, q);
        e.value = calc(e.conditioned[0], e.conditioned[1], e.conditioning);
        largest = std::max(largest, std::abs(e.value));
        candidates.push_back({p, q, edge_weight(e.value), e.conditioned});
        edges.push_back(std::move(e));
      }
    }
    if (candidates.empty()) throw std::logic_error("vine level has no admissible candidate edges");
    if (largest < stop_threshold) break;
    const auto chosen = maximum_spanning_tree(prev.size(), candidates);
    if (chosen.empty()) throw std::logic_error("vine candidate graph is disconnected at level " + std::to_string(level));
    std::vector<VineEdge> tree;
    for (auto idx : chosen) tree.push_back(std::move(edges[idx]));
    vine.trees.push_back(std::move(tree));
  }
  return vine;
}

VineValidation validate_vine(const VineStructure& v) {
  const auto d = v.d;
  if (d < 2 || v.trees.empty() || v.trees.size() > d - 1) {
    return failure("tree-count", 0, {}, "a vine on d variables has between 1 and d-1 trees");
  }
  for (std::size_t l = 1; l <= v.trees.size(); ++l) {
    const auto& tree = v.trees[l - 1];
    if (tree.size() != d - l) {
      return failure("tree-size", l, {}, "tree " + std::to_string(l) + " has " + std::to_string(tree.size()) +
                                             " edges, expected " + std::to_string(d - l));
    }
    const std::size_t node_count = l == 1 ? d : v.trees[l - 2].size();
    for (std::size_t k = 0; k < tree.size(); ++k) {
      const auto& e = tree[k];
      const auto [n1, n2] = e.nodes;
      if (e.level != l || n1 == n2 || n1 >= node_count || n2 >= node_count) {
        return failure("node-chaining", l, {k}, "edge does not join two distinct nodes of the previous tree");
      }
      if (l == 1) {
        const std::array<std::size_t, 2> expect{std::min(n1, n2), std::max(n1, n2)};
        if (e.conditioned != expect || !e.conditioning.empty()) {
          return failure("labels", l, {k}, "first-tree edge labels do not match its nodes");
        }
        continue;
      }
      const auto& prev = v.trees[l - 2];
      const auto u1 = prev[n1].label_set();
      const auto u2 = prev[n2].label_set();
      const auto diff = set_difference_sym(u1, u2);
      if (diff.size() != 2) {
        return failure("proximity", l, {k},
                       "nodes joined in tree " + std::to_string(l) + " differ by " + std::to_string(diff.size()) +
                           " elements, not two");
      }
      if (e.conditioned != std::array<std::size_t, 2>{diff[0], diff[1]} || e.conditioning != set_intersection(u1, u2) ||
          e.conditioning.size() != l - 1) {
        return failure("labels", l, {k}, "edge labels are not derived from its nodes");
      }
    }
    DisjointSets sets(node_count);
    for (std::size_t k = 0; k < tree.size(); ++k) {
      if (!sets.unite(tree[k].nodes[0], tree[k].nodes[1])) {
        return failure("spanning-tree", l, {k}, "tree " + std::to_string(l) + " contains a cycle");
      }
    }
  }
  return {};
}

CorrelationMatrix vine_to_correlation(const VineStructure& v) {
  const auto check = validate_vine(v);
  if (!check.ok) throw InvalidArgument("invalid vine: " + check.message);
  const auto d = v.d;
  if (v.trees.size() != d - 1) throw InvalidArgument("vine_to_correlation needs all d-1 trees");

  const auto n = static_cast<Eigen::Index>(d);
  Eigen::MatrixXd r = Eigen::MatrixXd::Identity(n, n);
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> known =
      Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>::Identity(n, n);
  auto idx = [](std::size_t x) { return static_cast<Eigen::Index>(x); };

  for (const auto& tree : v.trees) {
    for (const auto& e : tree) {
      if (!(std::abs(e.value) < 1.0)) throw InvalidArgument("vine edge value must lie in (-1, 1)");
      const auto a = e.conditioned[0];
      const auto b = e.conditioned[1];
      double value = e.value;
      if (!e.conditioning.empty()) {
        const auto& s = e.conditioning;
        const auto k = static_cast<Eigen::Index>(s.size());
        Eigen::MatrixXd rss(k, k);
        Eigen::VectorXd ras(k);
        Eigen::VectorXd rbs(k);
        for (Eigen::Index x = 0; x < k; ++x) {
          ras(x) = r(idx(a), idx(s[x]));
          rbs(x) = r(idx(b), idx(s[x]));
          if (!known(idx(a), idx(s[x])) || !known(idx(b), idx(s[x]))) {
            throw std::logic_error("vine edge depends on an undetermined correlation");
          }
          for (Eigen::Index y = 0; y < k; ++y) rss(x, y) = r(idx(s[x]), idx(s[y]));
        }
        Eigen::LLT<Eigen::MatrixXd> llt(rss);
        const Eigen::VectorXd wa = llt.solve(ras);
        const Eigen::VectorXd wb = llt.solve(rbs);
        const double base = ras.dot(wb);
        const double va = 1.0 - ras.dot(wa);
        const double vb = 1.0 - rbs.dot(wb);
        value = base + e.value * std::sqrt(std::max(va, 0.0) * std::max(vb, 0.0));
      }
      r(idx(a), idx(b)) = value;
      r(idx(b), idx(a)) = value;
      known(idx(a), idx(b)) = true;
      known(idx(b), idx(a)) = true;
    }
  }
  return CorrelationMatrix(std::move(r), v.variable_names);
}

}  // namespace vinedep
