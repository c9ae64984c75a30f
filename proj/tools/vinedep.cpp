// vinedep: command line front end for the vine dependence graph pipeline.
#include "vinedep/config.hpp"
#include "vinedep/correlation.hpp"
#include "vinedep/data_io.hpp"
#include "vinedep/error.hpp"
#include "vinedep/factor.hpp"
#include "vinedep/graph_export.hpp"
#include "vinedep/graphs.hpp"
#include "vinedep/grouping.hpp"
#include "vinedep/pipeline.hpp"
#include "vinedep/transform.hpp"
#include "vinedep/vine.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <random>
#include <sstream>

namespace {

using namespace vinedep;

// Flags shared by every subcommand that takes pipeline settings. Each maps to one
// config key; only flags given on the command line are applied.
struct ConfigFlags {
  std::string config_file;
  std::string preset;
  std::vector<std::string> sets;
  std::map<std::string, std::string> values;

  void attach(CLI::App* app, const std::vector<std::string>& keys) {
    app->add_option("--config", config_file, "Flat key = value config file")->check(CLI::ExistingFile);
    app->add_option("--preset", preset, "Named threshold preset: table1, yeast, prostate");
    app->add_option("--set", sets, "Override any config key, as key=value");
    for (const auto& key : keys) {
      if (key == "preset") continue;
      std::string flag = "--" + key;
      std::replace(flag.begin(), flag.end(), '_', '-');
      app->add_option(flag, values[key], "Config key " + key);
    }
  }

  PipelineConfig build(const CLI::App* app) const {
    PipelineConfig c;
    if (!preset.empty()) c.set("preset", preset);
    if (!config_file.empty()) apply_config_text(c, read_text(config_file));
    for (const auto& [key, value] : values) {
      std::string flag = "--" + key;
      std::replace(flag.begin(), flag.end(), '_', '-');
      if (app->count(flag) > 0) c.set(key, value);
    }
    for (const auto& kv : sets) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw InvalidArgument("--set expects key=value, got '" + kv + "'");
      c.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    return c;
  }
};

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(std::stod(cell));
  return out;
}

DataMatrix read_input(const PipelineConfig& c) {
  if (c.input.empty()) throw InvalidArgument("no input file given (--input)");
  const char delim = c.input_format == "csv" ? ',' : c.input_format == "tsv" ? '\t' : '\0';
  return data_from_table(parse_table(read_text(c.input), delim));
}

// A correlation matrix file, or one estimated from a data file.
CorrelationMatrix load_correlation(const std::string& correlation_file, const PipelineConfig& c) {
  if (!correlation_file.empty()) return read_correlation(correlation_file);
  const auto imputed = impute_missing(read_input(c));
  return repair_pd(empirical_corr(rank_to_normal(imputed.data)));
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    write_text(path, text);
  }
}

std::string graph_for_output(const DependenceGraph& g, const std::string& path, const std::string& format) {
  if (!path.empty() && path != "-" && format.empty()) {
    const auto ext = std::filesystem::path(path).extension().string();
    if (ext == ".graphml") return render_graph(g, GraphFormat::graphml);
    if (ext == ".json") return render_graph(g, GraphFormat::json);
  }
  return render_graph(g, parse_graph_format(format.empty() ? "dot" : format));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Vine dependence graphs with latent proxies for high-dimensional expression data"};
  app.require_subcommand(1);
  std::string stage = "cli";

  // impute
  auto* impute = app.add_subcommand("impute", "Fill missing cells by Gaussian-copula surrogate regression");
  std::string impute_in, impute_out;
  std::size_t min_joint = 10;
  double floor = 0.3;
  impute->add_option("-i,--input", impute_in, "Data file (samples x variables)")->required();
  impute->add_option("-o,--output", impute_out, "Output file, stdout when omitted");
  impute->add_option("--min-joint", min_joint, "Minimum jointly observed samples")->capture_default_str();
  impute->add_option("--correlation-floor", floor, "Below this surrogate correlation use the median")
      ->capture_default_str();

  // transform
  auto* transform = app.add_subcommand("transform", "Rank-transform every column to normal scores");
  std::string transform_in, transform_out, transform_corr;
  transform->add_option("-i,--input", transform_in, "Complete data file")->required();
  transform->add_option("-o,--output", transform_out, "z-scale data, stdout when omitted");
  transform->add_option("--correlation", transform_corr, "Also write the correlation matrix here");

  // cluster
  auto* cluster = app.add_subcommand("cluster", "Group variables around latent components");
  ConfigFlags cluster_flags;
  std::string cluster_corr, cluster_out;
  cluster_flags.attach(cluster, {"input", "format", "m", "seed", "restarts", "tau_weak"});
  cluster->add_option("--correlation", cluster_corr, "Correlation matrix instead of data");
  cluster->add_option("-o,--output", cluster_out, "Partition table, stdout when omitted");

  // fit
  auto* fit = app.add_subcommand("fit", "Fit a one-factor model and screen residuals");
  ConfigFlags fit_flags;
  std::string fit_corr, fit_partition, fit_out;
  fit_flags.attach(fit, {"input", "format", "t_max", "t_rowsum"});
  fit->add_option("--correlation", fit_corr, "Correlation matrix instead of data");
  fit->add_option("--partition", fit_partition, "Partition table; fits each group, else the whole matrix");
  fit->add_option("-o,--output", fit_out, "Loadings table, stdout when omitted");

  // proxy
  auto* proxy = app.add_subcommand("proxy", "Append one proxy column per group to z-scale data");
  std::string proxy_in, proxy_partition, proxy_out;
  proxy->add_option("-i,--input", proxy_in, "Complete data file")->required();
  proxy->add_option("--partition", proxy_partition, "Partition table")->required();
  proxy->add_option("-o,--output", proxy_out, "z-scale data with proxies, stdout when omitted");

  // vine
  auto* vine = app.add_subcommand("vine", "Build a truncated partial-correlation vine and its graph");
  ConfigFlags vine_flags;
  std::string vine_corr, vine_out, vine_trees, vine_format;
  vine_flags.attach(vine, {"input", "format", "max_level", "stop_threshold", "draw", "label", "tree_label"});
  vine->add_option("--correlation", vine_corr, "Correlation matrix instead of data");
  vine->add_option("-o,--output", vine_out, "Graph file, stdout when omitted");
  vine->add_option("--graph-format", vine_format, "dot, graphml or json (default from the extension, else dot)");
  vine->add_option("--trees", vine_trees, "Write every vine edge as a table here");

  // compare
  auto* compare = app.add_subcommand("compare", "Run tc, cdg, foci and vine on one correlation matrix");
  ConfigFlags compare_flags;
  std::string compare_corr;
  std::vector<std::string> compare_proxies;
  compare_flags.attach(compare, {"tau_tc", "tau_cdg", "tau_foci", "max_level", "stop_threshold", "draw", "label",
                                 "tree_label", "output_dir", "graph_format"});
  compare->add_option("--tau", compare_flags.values["tau"], "Shared threshold for tc, cdg and foci");
  compare->add_option("--correlation", compare_corr, "Correlation matrix")->required();
  compare->add_option("--proxy", compare_proxies, "Variable to draw as a latent or proxy node (repeatable)");

  // pipeline
  auto* pipeline = app.add_subcommand("pipeline", "Run the full procedure and write graphs and reports");
  ConfigFlags pipeline_flags;
  pipeline_flags.attach(pipeline, config_keys());
  pipeline->add_option("--tau", pipeline_flags.values["tau"], "Shared threshold for tc, cdg and foci");

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Factor-model correlation matrices or samples");
  std::string sim_model = "one-factor", sim_loadings, sim_groups = "20,20,20", sim_out;
  std::string sim_range = "0.5,0.9", sim_gamma = "0.3,0.8", sim_delta = "0.4,0.7";
  std::size_t sim_d = 10, sim_n = 0;
  std::uint64_t sim_seed = 0;
  bool sim_latent = false;
  simulate->add_option("--model", sim_model, "one-factor or bifactor")
      ->check(CLI::IsMember({"one-factor", "bifactor"}))
      ->capture_default_str();
  simulate->add_option("--loadings", sim_loadings, "Explicit one-factor loadings, comma separated");
  simulate->add_option("-d,--variables", sim_d, "Variables for random one-factor loadings")->capture_default_str();
  simulate->add_option("--range", sim_range, "Interval for random one-factor loadings")->capture_default_str();
  simulate->add_option("--groups", sim_groups, "Bi-factor group sizes")->capture_default_str();
  simulate->add_option("--gamma", sim_gamma, "Bi-factor global loading interval")->capture_default_str();
  simulate->add_option("--delta", sim_delta, "Bi-factor group loading interval")->capture_default_str();
  simulate->add_flag("--latent", sim_latent, "One-factor: append the latent variable W");
  simulate->add_option("-n,--samples", sim_n, "Draw this many samples instead of writing the matrix");
  simulate->add_option("--seed", sim_seed, "Random seed")->capture_default_str();
  simulate->add_option("-o,--output", sim_out, "Output file, stdout when omitted");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (impute->parsed()) {
      stage = "impute";
      const auto result = impute_missing(data_from_table(read_table(impute_in)), {min_joint, floor});
      for (const auto& rec : result.records) {
        std::cerr << rec.variable_name << ": " << rec.cells_imputed << " cells";
        if (rec.surrogate) std::cerr << " from " << rec.surrogate_name << " (r = " << rec.surrogate_correlation << ")";
        if (!rec.warning.empty()) std::cerr << "; " << rec.warning;
        std::cerr << '\n';
      }
      if (result.skipped()) std::cerr << "no missing cells; imputation skipped\n";
      emit(impute_out, format_table(table_from(result.data)));
    } else if (transform->parsed()) {
      stage = "transform";
      const auto data = data_from_table(read_table(transform_in));
      const auto z = rank_to_normal(data);
      emit(transform_out, format_table(table_from(z, data.sample_ids())));
      if (!transform_corr.empty()) write_text(transform_corr, format_table(table_from(empirical_corr(z))));
    } else if (cluster->parsed()) {
      stage = "cluster";
      const auto c = cluster_flags.build(cluster);
      if (!c.seed) throw InvalidArgument("clustering needs --seed");
      const auto r = load_correlation(cluster_corr, c);
      ClvOptions opts;
      opts.restarts = c.restarts;
      const std::size_t m = c.m ? *c.m : choose_group_count(r, *c.seed, 0.05, opts).m;
      const auto p = separate_weak(clv_partition(r, m, *c.seed, opts), r, c.tau_weak);
      std::cerr << "m = " << m << (c.m ? "" : " (chosen)") << ", " << p.groups.size() << " groups, "
                << p.isolated.size() << " isolated\n";
      emit(cluster_out, format_partition(p, r.variable_names()));
    } else if (fit->parsed()) {
      stage = "fit";
      const auto c = fit_flags.build(fit);
      const auto r = load_correlation(fit_corr, c);
      std::vector<std::vector<std::size_t>> groups;
      if (fit_partition.empty()) {
        groups.emplace_back(r.size());
        for (std::size_t k = 0; k < r.size(); ++k) groups[0][k] = k;
      } else {
        groups = parse_partition(read_text(fit_partition), r.variable_names()).groups;
      }
      std::ostringstream os;
      os << "variable\tgroup\tloading\tuniqueness\tflagged\n";
      for (std::size_t gi = 0; gi < groups.size(); ++gi) {
        const auto sub = r.submatrix(groups[gi]);
        const auto f = fit_one_factor(sub);
        const double rowsum = c.t_rowsum.value_or(default_residual_rowsum(groups[gi].size()));
        const auto rep = residual_report(sub, f, c.t_max, rowsum);
        for (std::size_t k = 0; k < groups[gi].size(); ++k) {
          os << r.variable_names()[groups[gi][k]] << '\t' << gi + 1 << '\t' << format_double(f.loadings[k]) << '\t'
             << format_double(f.uniquenesses[k]) << '\t' << (rep.strong_residual[k] ? "yes" : "no") << '\n';
        }
      }
      emit(fit_out, os.str());
    } else if (proxy->parsed()) {
      stage = "proxy";
      const auto data = data_from_table(read_table(proxy_in));
      auto z = rank_to_normal(data);
      const auto p = parse_partition(read_text(proxy_partition), data.variable_names());
      for (std::size_t gi = 0; gi < p.groups.size(); ++gi) {
        const auto name = "proxy" + std::to_string(gi + 1);
        z = z.with_column(make_proxy(z, p.groups[gi], name).values, name);
      }
      emit(proxy_out, format_table(table_from(z, data.sample_ids())));
    } else if (vine->parsed()) {
      stage = "vine";
      const auto c = vine_flags.build(vine);
      c.validate();
      const auto r = load_correlation(vine_corr, c);
      const auto v = build_truncated_vine(r, std::min(c.max_level, r.size() - 1), c.stop_threshold);
      if (!vine_trees.empty()) {
        std::ostringstream os;
        os << "tree\ta\tb\tconditioning\tvalue\n";
        for (const auto& tree : v.trees) {
          for (const auto& e : tree) {
            os << e.level << '\t' << r.variable_names()[e.conditioned[0]] << '\t'
               << r.variable_names()[e.conditioned[1]] << '\t';
            for (std::size_t k = 0; k < e.conditioning.size(); ++k) {
              os << (k ? "," : "") << r.variable_names()[e.conditioning[k]];
            }
            os << '\t' << format_double(e.value) << '\n';
          }
        }
        write_text(vine_trees, os.str());
      }
      emit(vine_out, graph_for_output(vine_to_graph(v, c.vine), vine_out, vine_format));
    } else if (compare->parsed()) {
      stage = "compare";
      const auto c = compare_flags.build(compare);
      const auto report = compare_methods(read_correlation(compare_corr), c, compare_proxies);
      stage = "export";
      write_outputs(render_outputs(report), c.output_dir);
      std::cout << edge_count_table(report);
    } else if (pipeline->parsed()) {
      stage = "pipeline";
      const auto c = pipeline_flags.build(pipeline);
      const auto result = run_pipeline(c);
      const auto written = write_outputs(render_outputs(result), c.output_dir);
      std::cout << edge_count_table(result.report);
      std::cerr << "wrote " << written.size() << " files to " << c.output_dir.string() << '\n';
    } else if (simulate->parsed()) {
      stage = "simulate";
      std::mt19937_64 rng(sim_seed);
      CorrelationMatrix r;
      if (sim_model == "one-factor") {
        std::vector<double> loadings;
        if (!sim_loadings.empty()) {
          loadings = parse_list(sim_loadings);
        } else {
          const auto range = parse_list(sim_range);
          if (range.size() != 2) throw InvalidArgument("--range needs lo,hi");
          loadings = uniform_loadings(sim_d, range[0], range[1], rng);
        }
        r = simulate_one_factor(loadings, sim_latent);
      } else {
        const auto sizes = parse_list(sim_groups);
        const auto gamma = parse_list(sim_gamma);
        const auto delta = parse_list(sim_delta);
        if (gamma.size() != 2 || delta.size() != 2) throw InvalidArgument("--gamma and --delta need lo,hi");
        std::vector<std::vector<std::size_t>> groups;
        std::size_t d = 0;
        for (double s : sizes) {
          groups.emplace_back();
          for (std::size_t k = 0; k < static_cast<std::size_t>(s); ++k) groups.back().push_back(d++);
        }
        const auto g = uniform_loadings(d, gamma[0], gamma[1], rng);
        const auto p = uniform_loadings(d, delta[0], delta[1], rng);
        r = simulate_bifactor(g, p, groups);
      }
      if (sim_n == 0) {
        emit(sim_out, format_table(table_from(r)));
      } else {
        const auto x = sample_gaussian(r, sim_n, rng);
        std::vector<std::string> ids;
        for (std::size_t i = 0; i < sim_n; ++i) ids.push_back("S" + std::to_string(i + 1));
        emit(sim_out, format_table({ids, r.variable_names(), x}));
      }
    }
  } catch (const StageError& e) {
    std::cerr << "vinedep: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "vinedep: [" << stage << "] " << e.what() << '\n';
    return 1;
  }
  return 0;
}
