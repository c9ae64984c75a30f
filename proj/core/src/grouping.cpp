#include "vinedep/grouping.hpp"

#include "vinedep/error.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

namespace vinedep {

namespace {

struct Component {
  double eigenvalue = 0.0;
  Eigen::VectorXd weights;  // unit-norm leading eigenvector of the group block
};

Component leading_component(const CorrelationMatrix& r, const std::vector<std::size_t>& members) {
  const auto k = static_cast<Eigen::Index>(members.size());
  Eigen::MatrixXd block(k, k);
  for (Eigen::Index a = 0; a < k; ++a) {
    for (Eigen::Index b = 0; b < k; ++b) block(a, b) = r(members[a], members[b]);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(block);
  Component c;
  c.eigenvalue = es.eigenvalues()(k - 1);
  c.weights = es.eigenvectors().col(k - 1);
  // Member correlations with the component are sqrt(lambda) * weights.
  const auto negative = (c.weights.array() < 0.0).count();
  if (2 * negative > k) c.weights = -c.weights;
  return c;
}

double squared_corr_with(const CorrelationMatrix& r, std::size_t j, const std::vector<std::size_t>& members,
                         const Component& c) {
  if (c.eigenvalue <= 0.0) return 0.0;
  double s = 0.0;
  for (std::size_t a = 0; a < members.size(); ++a) s += r(j, members[a]) * c.weights(static_cast<Eigen::Index>(a));
  return s * s / c.eigenvalue;
}

std::vector<std::vector<std::size_t>> groups_from_labels(const std::vector<int>& labels, std::size_t m) {
  std::vector<std::vector<std::size_t>> groups(m);
  for (std::size_t j = 0; j < labels.size(); ++j) groups[static_cast<std::size_t>(labels[j])].push_back(j);
  return groups;
}

// Groups sorted internally and ordered by their smallest member.
void canonicalize(std::vector<std::vector<std::size_t>>& groups) {
  for (auto& g : groups) std::sort(g.begin(), g.end());
  std::sort(groups.begin(), groups.end(), [](const auto& a, const auto& b) { return a.front() < b.front(); });
}

std::vector<double> homogeneities(const CorrelationMatrix& r, const std::vector<std::vector<std::size_t>>& groups) {
  std::vector<double> out;
  for (const auto& g : groups) out.push_back(leading_component(r, g).eigenvalue / static_cast<double>(g.size()));
  return out;
}

struct RestartResult {
  std::vector<std::vector<std::size_t>> groups;
  double criterion = -1.0;
  bool ok = false;
};

RestartResult run_restart(const CorrelationMatrix& r, std::size_t m, std::mt19937_64& rng,
                          const ClvOptions& options, ClvRestartTrace& trace) {
  const auto d = r.size();
  std::vector<std::size_t> perm(d);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<int> labels(d);
  for (std::size_t k = 0; k < d; ++k) labels[perm[k]] = static_cast<int>(k % m);

  RestartResult res;
  for (std::size_t iter = 0; iter < options.max_iterations; ++iter) {
    const auto groups = groups_from_labels(labels, m);
    if (std::any_of(groups.begin(), groups.end(), [](const auto& g) { return g.empty(); })) {
      trace.discarded = true;
      return res;
    }
    std::vector<Component> comps;
    double total = 0.0;
    for (const auto& g : groups) {
      comps.push_back(leading_component(r, g));
      total += comps.back().eigenvalue;
    }
    trace.criterion.push_back(total);
    res.groups = groups;
    res.criterion = total;

    bool changed = false;
    std::vector<int> next = labels;
    for (std::size_t j = 0; j < d; ++j) {
      const auto current = static_cast<std::size_t>(labels[j]);
      double best = squared_corr_with(r, j, groups[current], comps[current]);
      std::size_t best_g = current;
      for (std::size_t g = 0; g < m; ++g) {
        if (g == current) continue;
        const double v = squared_corr_with(r, j, groups[g], comps[g]);
        if (v > best + 1e-14) {
          best = v;
          best_g = g;
        }
      }
      if (best_g != current) {
        next[j] = static_cast<int>(best_g);
        changed = true;
      }
    }
    if (!changed) {
      res.ok = true;
      return res;
    }
    labels = std::move(next);
  }
  // Hit the iteration cap; keep the last evaluated partition.
  res.ok = true;
  return res;
}

}  // namespace

std::size_t GroupPartition::variable_count() const {
  std::size_t n = isolated.size();
  for (const auto& g : groups) n += g.size();
  return n;
}

std::vector<int> GroupPartition::labels(std::size_t d) const {
  std::vector<int> out(d, -1);
  for (std::size_t g = 0; g < groups.size(); ++g) {
    for (auto j : groups[g]) {
      if (j < d) out[j] = static_cast<int>(g);
    }
  }
  return out;
}

void GroupPartition::validate(std::size_t d) const {
  std::vector<int> seen(d, 0);
  auto mark = [&](std::size_t j) {
    if (j >= d) throw InvalidArgument("partition index " + std::to_string(j) + " out of range");
    if (seen[j]++) throw InvalidArgument("partition assigns variable " + std::to_string(j) + " twice");
  };
  for (const auto& g : groups) {
    if (g.size() < 3) throw InvalidArgument("partition group has fewer than 3 members");
    for (auto j : g) mark(j);
  }
  for (auto j : isolated) mark(j);
  for (std::size_t j = 0; j < d; ++j) {
    if (!seen[j]) throw InvalidArgument("partition misses variable " + std::to_string(j));
  }
}

std::vector<std::size_t> GroupPartition::sorted_order() const {
  std::vector<std::size_t> out;
  for (const auto& g : groups) out.insert(out.end(), g.begin(), g.end());
  out.insert(out.end(), isolated.begin(), isolated.end());
  return out;
}

double total_homogeneity(const CorrelationMatrix& r, const std::vector<std::vector<std::size_t>>& groups) {
  double total = 0.0;
  for (const auto& g : groups) {
    if (!g.empty()) total += leading_component(r, g).eigenvalue;
  }
  return total;
}

GroupPartition clv_partition(const CorrelationMatrix& r, std::size_t m, std::uint64_t seed,
                             const ClvOptions& options, std::vector<ClvRestartTrace>* traces) {
  const auto d = r.size();
  if (m < 1 || m > d / 3) {
    throw InvalidArgument("number of groups must lie in [1, d/3] = [1, " + std::to_string(d / 3) + "], got " +
                          std::to_string(m));
  }

  std::vector<std::vector<std::size_t>> best;
  std::vector<int> best_labels;
  double best_criterion = -1.0;

  for (std::size_t restart = 0; restart < std::max<std::size_t>(options.restarts, 1); ++restart) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(restart)};
    std::mt19937_64 rng(seq);
    ClvRestartTrace trace;
    auto res = run_restart(r, m, rng, options, trace);
    if (traces) traces->push_back(trace);
    if (!res.ok) continue;
    canonicalize(res.groups);
    GroupPartition tmp;
    tmp.groups = res.groups;
    const auto labels = tmp.labels(d);
    const double tol = 1e-12 * std::max(1.0, std::abs(best_criterion));
    if (res.criterion > best_criterion + tol ||
        (std::abs(res.criterion - best_criterion) <= tol && labels < best_labels)) {
      best_criterion = res.criterion;
      best = std::move(res.groups);
      best_labels = labels;
    }
  }
  if (best.empty()) throw Error("every CLV restart produced an empty group");

  GroupPartition out;
  for (auto& g : best) {
    if (g.size() < 3) {
      out.isolated.insert(out.isolated.end(), g.begin(), g.end());
    } else {
      out.groups.push_back(std::move(g));
    }
  }
  std::sort(out.isolated.begin(), out.isolated.end());
  out.homogeneity = homogeneities(r, out.groups);
  return out;
}

GroupPartition separate_weak(const GroupPartition& partition, const CorrelationMatrix& r, double tau_weak) {
  partition.validate(r.size());
  auto groups = partition.groups;
  auto isolated = partition.isolated;
  bool changed = true;
  while (changed) {
    changed = false;
    std::vector<std::vector<std::size_t>> next;
    for (auto& g : groups) {
      std::vector<std::size_t> keep;
      for (auto j : g) {
        double strongest = 0.0;
        for (auto k : g) {
          if (k != j) strongest = std::max(strongest, std::abs(r(j, k)));
        }
        if (strongest < tau_weak) {
          isolated.push_back(j);
          changed = true;
        } else {
          keep.push_back(j);
        }
      }
      if (keep.size() < 3) {
        isolated.insert(isolated.end(), keep.begin(), keep.end());
      } else {
        next.push_back(std::move(keep));
      }
    }
    if (next.size() != groups.size()) changed = true;
    groups = std::move(next);
  }
  GroupPartition out;
  out.groups = std::move(groups);
  out.isolated = std::move(isolated);
  std::sort(out.isolated.begin(), out.isolated.end());
  out.homogeneity = homogeneities(r, out.groups);
  return out;
}

GroupCountChoice choose_group_count(const CorrelationMatrix& r, std::uint64_t seed, double min_gain,
                                    const ClvOptions& options) {
  GroupCountChoice choice;
  const auto upper = std::min<std::size_t>(12, r.size() / 3);
  if (upper < 2) {
    choice.m = 1;
    return choice;
  }
  for (std::size_t m = 1; m <= upper; ++m) {
    const auto p = clv_partition(r, m, seed, options);
    double t = 0.0;
    for (std::size_t g = 0; g < p.groups.size(); ++g) t += p.homogeneity[g] * static_cast<double>(p.groups[g].size());
    choice.candidates.push_back(m);
    choice.criterion.push_back(t);
  }
  choice.m = upper;
  for (std::size_t k = 1; k < choice.criterion.size(); ++k) {
    const double prev = choice.criterion[k - 1];
    const double gain = prev > 0.0 ? (choice.criterion[k] - prev) / prev : 0.0;
    if (gain < min_gain) {
      choice.m = choice.candidates[k - 1];
      break;
    }
  }
  return choice;
}

double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size()) throw InvalidArgument("label vectors differ in length");
  const auto n = a.size();
  if (n < 2) return 1.0;
  std::map<std::pair<int, int>, double> joint;
  std::map<int, double> ra;
  std::map<int, double> rb;
  for (std::size_t i = 0; i < n; ++i) {
    joint[{a[i], b[i]}] += 1.0;
    ra[a[i]] += 1.0;
    rb[b[i]] += 1.0;
  }
  auto c2 = [](double x) { return x * (x - 1.0) / 2.0; };
  double index = 0.0;
  for (const auto& [k, v] : joint) index += c2(v);
  double sa = 0.0;
  double sb = 0.0;
  for (const auto& [k, v] : ra) sa += c2(v);
  for (const auto& [k, v] : rb) sb += c2(v);
  const double expected = sa * sb / c2(static_cast<double>(n));
  const double max_index = 0.5 * (sa + sb);
  if (max_index == expected) return 1.0;
  return (index - expected) / (max_index - expected);
}

std::string format_partition(const GroupPartition& p, const std::vector<std::string>& names) {
  const auto labels = p.labels(names.size());
  std::ostringstream os;
  os << "variable\tgroup\n";
  for (std::size_t j = 0; j < names.size(); ++j) {
    os << names[j] << '\t' << (labels[j] < 0 ? std::string("isolated") : std::to_string(labels[j] + 1)) << '\n';
  }
  return os.str();
}

GroupPartition parse_partition(const std::string& text, const std::vector<std::string>& names) {
  std::map<std::string, std::size_t> index;
  for (std::size_t j = 0; j < names.size(); ++j) index[names[j]] = j;
  std::map<std::size_t, std::vector<std::size_t>> by_label;
  GroupPartition p;
  std::istringstream is(text);
  std::string line;
  bool header = true;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto sep = line.find_first_of("\t,");
    if (sep == std::string::npos) throw InvalidArgument("partition line lacks a separator: " + line);
    const auto name = line.substr(0, sep);
    const auto label = line.substr(sep + 1);
    if (header) {
      header = false;
      if (name == "variable") continue;
    }
    const auto it = index.find(name);
    if (it == index.end()) throw InvalidArgument("partition names unknown variable '" + name + "'");
    if (label == "isolated") {
      p.isolated.push_back(it->second);
    } else {
      std::size_t g = 0;
      try {
        g = static_cast<std::size_t>(std::stoul(label));
      } catch (const std::exception&) {
        throw InvalidArgument("bad group label '" + label + "'");
      }
      by_label[g].push_back(it->second);
    }
  }
  for (auto& [g, members] : by_label) {
    std::sort(members.begin(), members.end());
    p.groups.push_back(std::move(members));
  }
  std::sort(p.isolated.begin(), p.isolated.end());
  return p;
}

}  // namespace vinedep
