#include "vinedep/config.hpp"

#include "vinedep/data_io.hpp"
#include "vinedep/error.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

namespace vinedep {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_real(const std::string& key, const std::string& value) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw InvalidArgument("config key '" + key + "': '" + value + "' is not a number");
  }
  return v;
}

std::uint64_t parse_count(const std::string& key, const std::string& value) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw InvalidArgument("config key '" + key + "': '" + value + "' is not a non-negative integer");
  }
  return v;
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(value);
  while (std::getline(is, cell, ',')) out.push_back(trim(cell));
  return out;
}

std::array<double, 3> parse_triple(const std::string& key, const std::string& value) {
  const auto cells = split_list(value);
  if (cells.size() != 3) throw InvalidArgument("config key '" + key + "' needs three comma-separated values");
  return {parse_real(key, cells[0]), parse_real(key, cells[1]), parse_real(key, cells[2])};
}

std::string format_triple(const std::array<double, 3>& t) {
  return format_double(t[0]) + "," + format_double(t[1]) + "," + format_double(t[2]);
}

void check_unit(const std::string& key, double v) {
  if (!(v >= 0.0 && v < 1.0)) {
    throw InvalidArgument("config key '" + key + "' must lie in [0, 1), got " + format_double(v));
  }
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "preset",  "input",          "format",    "method",     "tau_tc",     "tau_cdg",
      "tau_foci", "tau_weak",      "t_max",     "t_rowsum",   "draw",       "label",
      "tree_label", "stop_threshold", "max_level", "m",        "seed",       "restarts",
      "groups",  "output_dir",     "graph_format"};
  return keys;
}

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {"table1", "yeast", "prostate"};
  return names;
}

PipelineConfig make_preset(const std::string& name) {
  PipelineConfig c;
  c.set("preset", name, "user");
  return c;
}

void PipelineConfig::set(const std::string& key_in, const std::string& value_in, const std::string& src) {
  const std::string key = trim(key_in);
  const std::string value = trim(value_in);
  if (key == "tau") {
    for (const char* k : {"tau_tc", "tau_cdg", "tau_foci"}) set(k, value, src);
    return;
  }
  if (key == "preset") {
    const std::string tag = "preset:" + value;
    if (value == "table1") {
      set("tau", "0.2", tag);
      set("max_level", "2", tag);
      set("stop_threshold", "0.1", tag);
      set("draw", "0.2,0.2,0.2", tag);
    } else if (value == "yeast") {
      set("draw", "0.25,0.15,0.30", tag);
      set("label", "0.5,0.3,0.4", tag);
    } else if (value == "prostate") {
      set("draw", "0.30,0.15,0.30", tag);
      set("label", "0.5,0.3,0.4", tag);
      set("tau_cdg", "0.15", tag);
      set("stop_threshold", "0.1", tag);
    } else {
      throw InvalidArgument("unknown preset '" + value + "' (expected table1, yeast or prostate)");
    }
    preset = value;
  } else if (key == "input") {
    input = value;
  } else if (key == "format") {
    input_format = value;
  } else if (key == "method") {
    method = value;
  } else if (key == "tau_tc") {
    tau_tc = parse_real(key, value);
  } else if (key == "tau_cdg") {
    tau_cdg = parse_real(key, value);
  } else if (key == "tau_foci") {
    tau_foci = parse_real(key, value);
  } else if (key == "tau_weak") {
    tau_weak = parse_real(key, value);
  } else if (key == "t_max") {
    t_max = parse_real(key, value);
  } else if (key == "t_rowsum") {
    if (value == "auto") {
      t_rowsum.reset();
    } else {
      t_rowsum = parse_real(key, value);
    }
  } else if (key == "draw") {
    vine.draw = parse_triple(key, value);
  } else if (key == "label") {
    vine.label = parse_triple(key, value);
  } else if (key == "tree_label") {
    vine.tree_label = parse_real(key, value);
  } else if (key == "stop_threshold") {
    stop_threshold = parse_real(key, value);
  } else if (key == "max_level") {
    max_level = parse_count(key, value);
  } else if (key == "m") {
    if (value == "auto") {
      m.reset();
    } else {
      m = parse_count(key, value);
    }
  } else if (key == "seed") {
    if (value == "none") {
      seed.reset();
    } else {
      seed = parse_count(key, value);
    }
  } else if (key == "restarts") {
    restarts = parse_count(key, value);
  } else if (key == "groups") {
    groups.clear();
    if (value != "all" && !value.empty()) {
      for (const auto& cell : split_list(value)) groups.push_back(parse_count(key, cell));
    }
  } else if (key == "output_dir") {
    output_dir = value;
  } else if (key == "graph_format") {
    graph_format = value;
  } else {
    throw InvalidArgument("unknown config key '" + key + "'");
  }
  sources_[key] = src;
}

std::string PipelineConfig::get(const std::string& key) const {
  if (key == "preset") return preset.empty() ? "none" : preset;
  if (key == "input") return input.string();
  if (key == "format") return input_format;
  if (key == "method") return method;
  if (key == "tau_tc") return format_double(tau_tc);
  if (key == "tau_cdg") return format_double(tau_cdg);
  if (key == "tau_foci") return format_double(tau_foci);
  if (key == "tau_weak") return format_double(tau_weak);
  if (key == "t_max") return format_double(t_max);
  if (key == "t_rowsum") return t_rowsum ? format_double(*t_rowsum) : "auto";
  if (key == "draw") return format_triple(vine.draw);
  if (key == "label") return format_triple(vine.label);
  if (key == "tree_label") return format_double(vine.tree_label);
  if (key == "stop_threshold") return format_double(stop_threshold);
  if (key == "max_level") return std::to_string(max_level);
  if (key == "m") return m ? std::to_string(*m) : "auto";
  if (key == "seed") return seed ? std::to_string(*seed) : "none";
  if (key == "restarts") return std::to_string(restarts);
  if (key == "groups") {
    if (groups.empty()) return "all";
    std::string out;
    for (std::size_t k = 0; k < groups.size(); ++k) out += (k ? "," : "") + std::to_string(groups[k]);
    return out;
  }
  if (key == "output_dir") return output_dir.string();
  if (key == "graph_format") return graph_format;
  throw InvalidArgument("unknown config key '" + key + "'");
}

std::string PipelineConfig::source(const std::string& key) const {
  const auto it = sources_.find(key);
  return it == sources_.end() ? "default" : it->second;
}

void PipelineConfig::validate() const {
  if (std::find(std::begin(kMethods), std::end(kMethods), method) == std::end(kMethods)) {
    throw InvalidArgument("unknown method '" + method + "' (expected tc, cdg, foci, vine, vine+proxy or all)");
  }
  if (input_format != "auto" && input_format != "csv" && input_format != "tsv") {
    throw InvalidArgument("unknown input format '" + input_format + "' (expected auto, csv or tsv)");
  }
  if (graph_format != "dot" && graph_format != "graphml" && graph_format != "json") {
    throw InvalidArgument("unknown graph format '" + graph_format + "' (expected dot, graphml or json)");
  }
  check_unit("tau_tc", tau_tc);
  check_unit("tau_cdg", tau_cdg);
  check_unit("tau_foci", tau_foci);
  check_unit("tau_weak", tau_weak);
  check_unit("t_max", t_max);
  if (t_rowsum && !(*t_rowsum >= 0.0)) throw InvalidArgument("config key 't_rowsum' must be non-negative");
  for (int k = 0; k < 3; ++k) {
    check_unit("draw", vine.draw[k]);
    check_unit("label", vine.label[k]);
  }
  check_unit("tree_label", vine.tree_label);
  check_unit("stop_threshold", stop_threshold);
  if (max_level == 0) throw InvalidArgument("config key 'max_level' must be at least 1");
  if (restarts == 0) throw InvalidArgument("config key 'restarts' must be at least 1");
  if (m && *m == 0) throw InvalidArgument("config key 'm' must be at least 1 or 'auto'");
  for (auto g : groups) {
    if (g == 0) throw InvalidArgument("config key 'groups' uses 1-based group ids");
  }
}

bool PipelineConfig::needs_seed() const { return method == "vine+proxy" || method == "all"; }

void apply_config_text(PipelineConfig& config, const std::string& text, const std::string& src) {
  std::istringstream is(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw InvalidArgument("config line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    config.set(line.substr(0, eq), line.substr(eq + 1), src);
  }
}

PipelineConfig load_config(const std::filesystem::path& path) {
  PipelineConfig c;
  apply_config_text(c, read_text(path));
  return c;
}

std::string format_config(const PipelineConfig& config) {
  std::string out;
  for (const auto& key : config_keys()) out += key + " = " + config.get(key) + "\n";
  return out;
}

}  // namespace vinedep
