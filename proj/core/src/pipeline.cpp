#include "vinedep/pipeline.hpp"

#include "vinedep/data_io.hpp"
#include "vinedep/error.hpp"
#include "vinedep/graph_export.hpp"
#include "vinedep/vine.hpp"

#include <json.hpp>

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace vinedep {

namespace {

using ojson = nlohmann::ordered_json;

template <class F>
auto in_stage(const char* stage, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(stage, e.what());
  }
}

bool runs(const PipelineConfig& c, const char* method) { return c.method == "all" || c.method == method; }

const char* imputation_method_name(ImputationMethod m) {
  switch (m) {
    case ImputationMethod::none: return "none";
    case ImputationMethod::surrogate: return "surrogate";
    case ImputationMethod::median: return "median";
  }
  return "none";
}

std::string file_stem(const std::string& method) {
  std::string s = method;
  std::replace(s.begin(), s.end(), '+', '_');
  return s;
}

std::vector<std::string> names_of(const std::vector<std::string>& all, const std::vector<std::size_t>& idx) {
  std::vector<std::string> out;
  for (auto i : idx) out.push_back(all[i]);
  return out;
}

std::size_t clamp_level(const PipelineConfig& c, std::size_t d, std::vector<std::string>& notes) {
  const std::size_t top = d - 1;
  if (c.max_level <= top) return c.max_level;
  notes.push_back("max_level " + std::to_string(c.max_level) + " exceeds d - 1; using " + std::to_string(top));
  return top;
}

void observed_graphs(const CorrelationMatrix& r, const PipelineConfig& c, RunReport& rep) {
  in_stage("graph", [&] {
    if (runs(c, "tc")) rep.graphs.push_back(graph_tc(r, c.tau_tc));
    if (runs(c, "cdg")) rep.graphs.push_back(graph_cdg(r, c.tau_cdg));
    if (runs(c, "foci")) rep.graphs.push_back(graph_foci(r, c.tau_foci));
    if (runs(c, "vine")) {
      const auto vine = build_truncated_vine(r, clamp_level(c, r.size(), rep.notes), c.stop_threshold);
      rep.graphs.push_back(vine_to_graph(vine, c.vine, {}, "vine"));
    }
  });
}

ojson imputation_json(const RunReport& rep) {
  ojson j;
  j["skipped"] = rep.imputation_skipped;
  j["records"] = ojson::array();
  for (const auto& r : rep.imputation) {
    ojson x;
    x["variable"] = r.variable_name;
    x["cells"] = r.cells_imputed;
    x["method"] = imputation_method_name(r.method);
    if (r.surrogate) {
      x["surrogate"] = r.surrogate_name;
      x["surrogate_correlation"] = r.surrogate_correlation;
      x["slope"] = r.slope;
      x["tied_candidates"] = r.tied_candidates;
    }
    if (!r.warning.empty()) x["warning"] = r.warning;
    j["records"].push_back(std::move(x));
  }
  return j;
}

}  // namespace

std::size_t RunReport::edge_count(const std::string& method) const {
  for (const auto& g : graphs) {
    if (g.method() == method) return g.edges().size();
  }
  throw InvalidArgument("no graph for method '" + method + "' in this run");
}

PipelineResult run_pipeline(const PipelineConfig& config) {
  const DataMatrix data = in_stage("input", [&] {
    if (config.input.empty()) throw InvalidArgument("no input file given");
    const char delim = config.input_format == "csv" ? ',' : config.input_format == "tsv" ? '\t' : '\0';
    return data_from_table(parse_table(read_text(config.input), delim));
  });
  return run_pipeline(data, config);
}

PipelineResult run_pipeline(const DataMatrix& data, const PipelineConfig& config) {
  const bool cluster = config.needs_seed();
  in_stage("config", [&] {
    config.validate();
    if (cluster && !config.seed) {
      throw InvalidArgument("method '" + config.method + "' clusters variables and needs a seed");
    }
    if (!cluster && !config.groups.empty()) {
      throw InvalidArgument("a group subset needs method vine+proxy or all");
    }
  });

  PipelineResult result;
  RunReport& rep = result.report;
  rep.config = config;
  rep.input = config.input.string();
  rep.samples = data.samples();
  rep.variables = data.variables();

  const auto imputed = in_stage("impute", [&] { return impute_missing(data); });
  rep.imputation_skipped = imputed.skipped();
  rep.imputation = imputed.records;
  for (const auto& rec : imputed.records) {
    if (!rec.warning.empty()) rep.notes.push_back(rec.variable_name + ": " + rec.warning);
  }

  const ZMatrix z = in_stage("transform", [&] { return rank_to_normal(imputed.data); });

  result.correlation = in_stage("correlation", [&] {
    auto r = empirical_corr(z);
    rep.min_eigenvalue = r.min_eigenvalue();
    if (rep.min_eigenvalue <= kRidgeFloor) {
      rep.correlation_repaired = true;
      rep.notes.push_back("correlation matrix repaired by a diagonal ridge");
      r = repair_pd(r);
    }
    return r;
  });
  const CorrelationMatrix& r = result.correlation;
  const auto d = r.size();

  if (!cluster) {
    observed_graphs(r, config, rep);
    return result;
  }

  const std::uint64_t seed = *config.seed;
  ClvOptions clv;
  clv.restarts = config.restarts;

  GroupPartition partition = in_stage("cluster", [&] {
    std::size_t m = 0;
    if (config.m) {
      m = *config.m;
      rep.m_defaulted = false;
    } else {
      const auto choice = choose_group_count(r, seed, 0.05, clv);
      m = choice.m;
      rep.m_candidates = choice.candidates;
      rep.m_criterion = choice.criterion;
    }
    rep.m = m;
    return clv_partition(r, m, seed, clv);
  });
  partition = in_stage("separate", [&] {
    auto p = separate_weak(partition, r, config.tau_weak);
    if (p.groups.empty()) throw Error("no group of three or more variables remains after separating weak variables");
    return p;
  });

  // Orient each group so that its loadings are non-negative.
  std::set<std::size_t> flip;
  in_stage("fit", [&] {
    for (const auto& g : partition.groups) {
      OneFactorFit fit;
      try {
        fit = fit_one_factor(r.submatrix(g));
      } catch (const ConvergenceError& e) {
        fit = OneFactorFit::from_loadings(e.last_iterate());
      }
      for (std::size_t k = 0; k < g.size(); ++k) {
        if (fit.loadings[k] < 0.0) flip.insert(g[k]);
      }
    }
  });
  const ZMatrix zr = reorient(z, flip);
  for (auto j : flip) rep.flipped.push_back(z.variable_names()[j]);

  Eigen::VectorXd sign = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(d));
  for (auto j : flip) sign(static_cast<Eigen::Index>(j)) = -1.0;
  result.reoriented = CorrelationMatrix(sign.asDiagonal() * r.values() * sign.asDiagonal(), zr.variable_names());
  const CorrelationMatrix& rr = result.reoriented;

  ZMatrix augmented_z = zr;
  std::vector<std::string> proxy_names;
  for (std::size_t gi = 0; gi < partition.groups.size(); ++gi) {
    const auto& g = partition.groups[gi];
    GroupReport gr;
    gr.id = gi + 1;
    gr.members = names_of(zr.variable_names(), g);
    gr.homogeneity = partition.homogeneity[gi];
    const auto sub = rr.submatrix(g);

    const OneFactorFit fit = in_stage("fit", [&] {
      try {
        return fit_one_factor(sub);
      } catch (const ConvergenceError& e) {
        rep.notes.push_back("group " + std::to_string(gr.id) + ": factor fit did not converge; using the last iterate");
        gr.fit_converged = false;
        return OneFactorFit::from_loadings(e.last_iterate(), &sub);
      }
    });
    gr.loadings = fit.loadings;
    gr.fit_objective = fit.objective;
    gr.fit_iterations = fit.iterations;

    gr.t_rowsum_defaulted = !config.t_rowsum.has_value();
    gr.t_rowsum = config.t_rowsum.value_or(default_residual_rowsum(g.size()));
    const auto residuals = in_stage("residual", [&] { return residual_report(sub, fit, config.t_max, gr.t_rowsum); });
    std::vector<std::size_t> kept;
    for (std::size_t k = 0; k < g.size(); ++k) {
      if (residuals.strong_residual[k]) {
        gr.flagged.push_back(gr.members[k]);
      } else {
        kept.push_back(g[k]);
      }
    }

    if (kept.size() >= 2) {
      const std::string name = "proxy" + std::to_string(gr.id);
      const auto proxy = in_stage("proxy", [&] { return make_proxy(zr, kept, name); });
      augmented_z = augmented_z.with_column(proxy.values, name);
      gr.proxy = name;
      gr.proxy_members = names_of(zr.variable_names(), kept);
      proxy_names.push_back(name);
    } else {
      rep.notes.push_back("group " + std::to_string(gr.id) + ": fewer than two unflagged members, no proxy");
    }
    rep.groups.push_back(std::move(gr));
  }
  rep.isolated = names_of(zr.variable_names(), partition.isolated);

  result.augmented = in_stage("correlation", [&] {
    auto a = empirical_corr(augmented_z);
    if (a.min_eigenvalue() <= kRidgeFloor) {
      rep.notes.push_back("augmented correlation matrix repaired by a diagonal ridge");
      a = repair_pd(a);
    }
    return a;
  });

  // Restrict both matrices to the selected groups.
  CorrelationMatrix observed = r;
  CorrelationMatrix with_proxies = result.augmented;
  if (!config.groups.empty()) {
    in_stage("config", [&] {
      std::vector<std::size_t> keep;
      std::vector<std::size_t> keep_aug;
      for (auto id : config.groups) {
        if (id > partition.groups.size()) {
          throw InvalidArgument("group " + std::to_string(id) + " does not exist; the run found " +
                                std::to_string(partition.groups.size()));
        }
        const auto& g = partition.groups[id - 1];
        keep.insert(keep.end(), g.begin(), g.end());
        const auto& proxy = rep.groups[id - 1].proxy;
        if (!proxy.empty()) {
          const auto& names = result.augmented.variable_names();
          keep_aug.push_back(static_cast<std::size_t>(std::find(names.begin(), names.end(), proxy) - names.begin()));
        }
      }
      std::sort(keep.begin(), keep.end());
      keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
      if (keep.size() < 2) throw InvalidArgument("the selected groups hold fewer than two variables");
      keep_aug.insert(keep_aug.begin(), keep.begin(), keep.end());
      observed = r.submatrix(keep);
      with_proxies = result.augmented.submatrix(keep_aug);
    });
  }

  observed_graphs(observed, config, rep);
  in_stage("graph", [&] {
    if (config.method == "all") {
      auto cdg = graph_cdg(with_proxies, config.tau_cdg, proxy_names);
      cdg.set_method("cdg+proxy");
      rep.graphs.push_back(std::move(cdg));
      auto foci = graph_foci(with_proxies, config.tau_foci, proxy_names);
      foci.set_method("foci+proxy");
      rep.graphs.push_back(std::move(foci));
    }
    const auto vine = build_truncated_vine(with_proxies, clamp_level(config, with_proxies.size(), rep.notes),
                                           config.stop_threshold);
    rep.graphs.push_back(vine_to_graph(vine, config.vine, proxy_names, "vine+proxy"));
    const auto& names = vine.variable_names;
    auto index_of = [&](const std::string& n) {
      return static_cast<std::size_t>(std::find(names.begin(), names.end(), n) - names.begin());
    };
    std::set<std::array<std::size_t, 2>> first_tree;
    for (const auto& e : vine.trees.front()) first_tree.insert(e.conditioned);
    for (auto& gr : rep.groups) {
      const auto p = index_of(gr.proxy);
      if (gr.proxy.empty() || p == names.size()) continue;
      std::size_t attached = 0;
      for (const auto& member : gr.proxy_members) {
        const auto q = index_of(member);
        if (first_tree.count({std::min(p, q), std::max(p, q)})) ++attached;
      }
      gr.attachment = static_cast<double>(attached) / static_cast<double>(gr.proxy_members.size());
    }
  });

  result.partition = std::move(partition);
  return result;
}

RunReport compare_methods(const CorrelationMatrix& r, const PipelineConfig& config,
                          const std::vector<std::string>& proxy_names) {
  in_stage("config", [&] { config.validate(); });
  RunReport rep;
  rep.config = config;
  rep.config.method = "all";
  rep.variables = r.size();
  rep.min_eigenvalue = r.min_eigenvalue();
  in_stage("graph", [&] {
    rep.graphs.push_back(graph_tc(r, config.tau_tc, proxy_names));
    rep.graphs.push_back(graph_cdg(r, config.tau_cdg, proxy_names));
    rep.graphs.push_back(graph_foci(r, config.tau_foci, proxy_names));
    const auto vine = build_truncated_vine(r, clamp_level(config, r.size(), rep.notes), config.stop_threshold);
    rep.graphs.push_back(vine_to_graph(vine, config.vine, proxy_names, "vine"));
  });
  return rep;
}

std::string report_to_json(const RunReport& rep) {
  ojson j;
  j["input"] = rep.input;
  j["samples"] = rep.samples;
  j["variables"] = rep.variables;
  j["imputation"] = imputation_json(rep);
  j["correlation"] = {{"min_eigenvalue", rep.min_eigenvalue}, {"repaired", rep.correlation_repaired}};
  if (rep.m) {
    ojson m;
    m["value"] = *rep.m;
    m["defaulted"] = rep.m_defaulted;
    if (!rep.m_candidates.empty()) {
      m["candidates"] = rep.m_candidates;
      m["homogeneity"] = rep.m_criterion;
    }
    j["m"] = std::move(m);
  }
  j["groups"] = ojson::array();
  for (const auto& g : rep.groups) {
    ojson x;
    x["id"] = g.id;
    x["size"] = g.members.size();
    x["members"] = g.members;
    x["homogeneity"] = g.homogeneity;
    x["loadings"] = g.loadings;
    x["fit"] = {{"objective", g.fit_objective}, {"iterations", g.fit_iterations}, {"converged", g.fit_converged}};
    x["t_rowsum"] = {{"value", g.t_rowsum}, {"defaulted", g.t_rowsum_defaulted}};
    x["flagged"] = g.flagged;
    if (g.proxy.empty()) {
      x["proxy"] = nullptr;
    } else {
      x["proxy"] = {{"name", g.proxy}, {"members", g.proxy_members}};
    }
    if (g.attachment) x["first_tree_attachment"] = *g.attachment;
    j["groups"].push_back(std::move(x));
  }
  j["isolated"] = rep.isolated;
  j["flipped"] = rep.flipped;
  j["edge_counts"] = ojson::object();
  for (const auto& g : rep.graphs) j["edge_counts"][g.method()] = g.edges().size();
  j["degrees"] = ojson::object();
  for (const auto& g : rep.graphs) {
    ojson deg = ojson::object();
    const auto dv = g.degrees();
    for (std::size_t k = 0; k < dv.size(); ++k) deg[g.nodes()[k].name] = dv[k];
    j["degrees"][g.method()] = std::move(deg);
  }
  j["parameters"] = ojson::array();
  for (const auto& key : config_keys()) {
    const auto src = rep.config.source(key);
    j["parameters"].push_back(
        {{"key", key}, {"value", rep.config.get(key)}, {"source", src}, {"defaulted", src == "default"}});
  }
  j["foci_rule"] = "|rho_ij| >= tau and min_k statistic >= tau";
  j["proxy_rule"] = "normal scores of the per-sample mean of member z-columns";
  j["notes"] = rep.notes;
  return j.dump(2) + "\n";
}

std::string edge_count_table(const RunReport& rep) {
  std::ostringstream os;
  os << "method\tedges\n";
  for (const auto& g : rep.graphs) os << g.method() << '\t' << g.edges().size() << '\n';
  return os.str();
}

std::string degree_table(const RunReport& rep) {
  std::ostringstream os;
  os << "method\tnode\tdegree\n";
  for (const auto& g : rep.graphs) {
    const auto dv = g.degrees();
    for (std::size_t k = 0; k < dv.size(); ++k) os << g.method() << '\t' << g.nodes()[k].name << '\t' << dv[k] << '\n';
  }
  return os.str();
}

std::vector<std::pair<std::filesystem::path, std::string>> render_outputs(const RunReport& rep) {
  const auto format = parse_graph_format(rep.config.graph_format);
  std::vector<std::pair<std::filesystem::path, std::string>> out;
  out.emplace_back("report.json", report_to_json(rep));
  out.emplace_back("config.txt", format_config(rep.config));
  out.emplace_back("edge_counts.tsv", edge_count_table(rep));
  out.emplace_back("degrees.tsv", degree_table(rep));
  for (const auto& g : rep.graphs) {
    out.emplace_back(std::filesystem::path("graphs") / (file_stem(g.method()) + graph_format_extension(format)),
                     render_graph(g, format));
  }
  return out;
}

std::vector<std::pair<std::filesystem::path, std::string>> render_outputs(const PipelineResult& result) {
  auto out = in_stage("export", [&] { return render_outputs(result.report); });
  in_stage("export", [&] {
    if (result.partition.groups.empty()) {
      out.emplace_back("correlation.csv", format_table(table_from(result.correlation)));
      return;
    }
    const auto& r = result.reoriented;
    out.emplace_back("partition.tsv", format_partition(result.partition, r.variable_names()));
    out.emplace_back("correlation_sorted.csv", format_table(table_from(r.permuted(result.partition.sorted_order()))));
  });
  return out;
}

std::vector<std::filesystem::path> write_outputs(
    const std::vector<std::pair<std::filesystem::path, std::string>>& outputs, const std::filesystem::path& dir) {
  return in_stage("export", [&] {
    std::vector<std::filesystem::path> written;
    for (const auto& [rel, text] : outputs) {
      write_text(dir / rel, text);
      written.push_back(dir / rel);
    }
    return written;
  });
}

}  // namespace vinedep
