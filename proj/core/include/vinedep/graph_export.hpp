#pragma once

#include "vinedep/graphs.hpp"

#include <filesystem>
#include <string>

namespace vinedep {

enum class GraphFormat { dot, graphml, json };

GraphFormat parse_graph_format(const std::string& name);
const char* graph_format_extension(GraphFormat f);

// DOT: observed nodes are boxes, proxies ellipses; edges coloured by order bucket and
// labelled with the value to two decimals when flagged. Output is byte-deterministic.
std::string to_dot(const DependenceGraph& g);
std::string to_graphml(const DependenceGraph& g);
std::string to_json(const DependenceGraph& g);
DependenceGraph graph_from_json(const std::string& text);

std::string render_graph(const DependenceGraph& g, GraphFormat format);
void export_graph(const DependenceGraph& g, GraphFormat format, const std::filesystem::path& path);

}  // namespace vinedep
