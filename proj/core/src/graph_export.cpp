#include "vinedep/graph_export.hpp"

#include "vinedep/data_io.hpp"
#include "vinedep/error.hpp"

#include <json.hpp>

#include <cstdio>
#include <sstream>

namespace vinedep {

namespace {

using ojson = nlohmann::ordered_json;

std::string dot_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string two_decimals(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

const char* kind_name(NodeKind k) { return k == NodeKind::proxy ? "proxy" : "observed"; }

std::string conditioning_names(const DependenceGraph& g, const GraphEdge& e) {
  std::string out;
  for (std::size_t k = 0; k < e.conditioning.size(); ++k) {
    if (k) out += ",";
    out += g.nodes()[e.conditioning[k]].name;
  }
  return out;
}

}  // namespace

GraphFormat parse_graph_format(const std::string& name) {
  if (name == "dot") return GraphFormat::dot;
  if (name == "graphml") return GraphFormat::graphml;
  if (name == "json") return GraphFormat::json;
  throw InvalidArgument("unknown graph format '" + name + "' (expected dot, graphml or json)");
}

const char* graph_format_extension(GraphFormat f) {
  switch (f) {
    case GraphFormat::dot: return ".dot";
    case GraphFormat::graphml: return ".graphml";
    case GraphFormat::json: return ".json";
  }
  return "";
}

std::string to_dot(const DependenceGraph& g) {
  std::ostringstream os;
  os << "graph " << dot_quote(g.method()) << " {\n";
  for (const auto& n : g.nodes()) {
    os << "  " << dot_quote(n.name) << " [shape=" << (n.kind == NodeKind::proxy ? "ellipse" : "box") << "];\n";
  }
  for (const auto& e : g.edges()) {
    os << "  " << dot_quote(g.nodes()[e.a].name) << " -- " << dot_quote(g.nodes()[e.b].name)
       << " [color=" << order_color(e.order);
    if (e.labeled) os << ", label=\"" << two_decimals(e.value) << "\"";
    os << "];\n";
  }
  os << "}\n";
  return os.str();
}

std::string to_graphml(const DependenceGraph& g) {
  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n"
     << "  <key id=\"name\" for=\"node\" attr.name=\"name\" attr.type=\"string\"/>\n"
     << "  <key id=\"kind\" for=\"node\" attr.name=\"kind\" attr.type=\"string\"/>\n"
     << "  <key id=\"value\" for=\"edge\" attr.name=\"value\" attr.type=\"double\"/>\n"
     << "  <key id=\"order\" for=\"edge\" attr.name=\"order\" attr.type=\"int\"/>\n"
     << "  <key id=\"conditioning\" for=\"edge\" attr.name=\"conditioning\" attr.type=\"string\"/>\n"
     << "  <key id=\"color\" for=\"edge\" attr.name=\"color\" attr.type=\"string\"/>\n"
     << "  <key id=\"labeled\" for=\"edge\" attr.name=\"labeled\" attr.type=\"boolean\"/>\n"
     << "  <graph id=\"" << xml_escape(g.method()) << "\" edgedefault=\"undirected\">\n";
  for (std::size_t k = 0; k < g.nodes().size(); ++k) {
    const auto& n = g.nodes()[k];
    os << "    <node id=\"n" << k << "\">\n"
       << "      <data key=\"name\">" << xml_escape(n.name) << "</data>\n"
       << "      <data key=\"kind\">" << kind_name(n.kind) << "</data>\n"
       << "    </node>\n";
  }
  for (std::size_t k = 0; k < g.edges().size(); ++k) {
    const auto& e = g.edges()[k];
    os << "    <edge id=\"e" << k << "\" source=\"n" << e.a << "\" target=\"n" << e.b << "\">\n"
       << "      <data key=\"value\">" << format_double(e.value) << "</data>\n"
       << "      <data key=\"order\">" << e.order << "</data>\n"
       << "      <data key=\"conditioning\">" << xml_escape(conditioning_names(g, e)) << "</data>\n"
       << "      <data key=\"color\">" << order_color(e.order) << "</data>\n"
       << "      <data key=\"labeled\">" << (e.labeled ? "true" : "false") << "</data>\n"
       << "    </edge>\n";
  }
  os << "  </graph>\n</graphml>\n";
  return os.str();
}

std::string to_json(const DependenceGraph& g) {
  ojson j;
  j["method"] = g.method();
  j["nodes"] = ojson::array();
  for (const auto& n : g.nodes()) j["nodes"].push_back({{"name", n.name}, {"kind", kind_name(n.kind)}});
  j["edges"] = ojson::array();
  for (const auto& e : g.edges()) {
    j["edges"].push_back({{"source", e.a},
                          {"target", e.b},
                          {"value", e.value},
                          {"order", e.order},
                          {"conditioning", e.conditioning},
                          {"labeled", e.labeled}});
  }
  return j.dump(2) + "\n";
}

DependenceGraph graph_from_json(const std::string& text) {
  try {
    const auto j = ojson::parse(text);
    std::vector<GraphNode> nodes;
    for (const auto& n : j.at("nodes")) {
      const auto kind = n.at("kind").get<std::string>();
      if (kind != "proxy" && kind != "observed") throw InvalidArgument("unknown node kind '" + kind + "'");
      nodes.push_back({n.at("name").get<std::string>(), kind == "proxy" ? NodeKind::proxy : NodeKind::observed});
    }
    DependenceGraph g(std::move(nodes), j.at("method").get<std::string>());
    for (const auto& e : j.at("edges")) {
      g.add_edge({e.at("source").get<std::size_t>(), e.at("target").get<std::size_t>(), e.at("value").get<double>(),
                  e.at("order").get<std::size_t>(), e.at("conditioning").get<std::vector<std::size_t>>(),
                  e.at("labeled").get<bool>()});
    }
    return g;
  } catch (const nlohmann::json::exception& ex) {
    throw InvalidArgument(std::string("malformed graph JSON: ") + ex.what());
  }
}

std::string render_graph(const DependenceGraph& g, GraphFormat format) {
  switch (format) {
    case GraphFormat::dot: return to_dot(g);
    case GraphFormat::graphml: return to_graphml(g);
    case GraphFormat::json: return to_json(g);
  }
  throw InvalidArgument("unknown graph format");
}

void export_graph(const DependenceGraph& g, GraphFormat format, const std::filesystem::path& path) {
  write_text(path, render_graph(g, format));
}

}  // namespace vinedep
