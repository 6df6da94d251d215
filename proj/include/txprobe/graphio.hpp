// Copyright (c) 2026 The txprobe-sim developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#ifndef TXPROBE_GRAPHIO_HPP
#define TXPROBE_GRAPHIO_HPP

#include <txprobe/graph.hpp>

#include <iosfwd>
#include <stdexcept>
#include <string>

namespace txprobe {

enum class GraphFormat : uint8_t { EdgeList, GraphML };

GraphFormat graph_format_from_name(const std::string& name);
const char* graph_format_name(GraphFormat format);

/** Guess from the file extension; .graphml/.xml map to GraphML, anything else
 * to the edge list. */
GraphFormat graph_format_for_path(const std::string& path);

struct GraphParseError : std::runtime_error {
    GraphParseError(const std::string& what, size_t line)
        : std::runtime_error(what + " (line " + std::to_string(line) + ")"), line(line)
    {
    }
    size_t line;
};

/** One "u v" pair per line with u < v, sorted; ids are decimal vertex
 * indices. Attributes and isolated trailing vertices are not representable;
 * use GraphML when they matter. */
void export_edge_list(const GraphSnapshot& g, std::ostream& out);
GraphSnapshot import_edge_list(std::istream& in);

/** GraphML with region/flags vertex attributes; round-trips exactly. */
void export_graphml(const GraphSnapshot& g, std::ostream& out);
GraphSnapshot import_graphml(std::istream& in);

void save_graph(const GraphSnapshot& g, const std::string& path, GraphFormat format);
GraphSnapshot load_graph(const std::string& path, GraphFormat format);
GraphSnapshot load_graph(const std::string& path);

} // namespace txprobe

#endif // TXPROBE_GRAPHIO_HPP
