#pragma once

#include "vinedep/graphs.hpp"
#include "vinedep/vine.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace vinedep {

inline constexpr const char* kMethods[] = {"tc", "cdg", "foci", "vine", "vine+proxy", "all"};

// Every setting of a pipeline run. Values come from the defaults below, a named
// preset, a flat `key = value` file, or command-line overrides, applied in that order.
struct PipelineConfig {
  std::filesystem::path input;
  std::string input_format = "auto";  // auto | csv | tsv
  std::string method = "all";
  double tau_tc = 0.2;
  double tau_cdg = 0.2;
  double tau_foci = 0.2;
  double tau_weak = 0.3;
  double t_max = 0.25;
  std::optional<double> t_rowsum;  // unset: 0.25 * (group size - 1) * 0.5 per group
  VineDrawThresholds vine;
  double stop_threshold = kDefaultStopThreshold;
  std::size_t max_level = kDefaultMaxLevel;
  std::optional<std::size_t> m;  // unset: chosen from the homogeneity gain
  std::optional<std::uint64_t> seed;
  std::filesystem::path output_dir = "vinedep-out";
  std::string graph_format = "dot";
  std::vector<std::size_t> groups;  // 1-based group ids kept in the graphs; empty keeps all
  std::size_t restarts = 20;
  std::string preset;

  // Parses and stores one key. `source` is recorded for the run report ("user",
  // "preset:<name>"). Setting "preset" loads that preset's values first.
  void set(const std::string& key, const std::string& value, const std::string& source = "user");
  std::string get(const std::string& key) const;
  // "default" for keys that were never set.
  std::string source(const std::string& key) const;
  bool defaulted(const std::string& key) const { return source(key) == "default"; }

  // Throws InvalidArgument: thresholds outside [0, 1), unknown method or format,
  // max_level or restarts of zero.
  void validate() const;
  // Clustering and proxies need a seed; tc/cdg/foci/vine alone do not.
  bool needs_seed() const;

 private:
  std::map<std::string, std::string> sources_;
};

const std::vector<std::string>& config_keys();
const std::vector<std::string>& preset_names();
PipelineConfig make_preset(const std::string& name);

// Lines of `key = value`; '#' starts a comment.
void apply_config_text(PipelineConfig& config, const std::string& text, const std::string& source = "user");
PipelineConfig load_config(const std::filesystem::path& path);
// Every key with its effective value, one `key = value` line each.
std::string format_config(const PipelineConfig& config);

}  // namespace vinedep
