// Copyright (c) 2026 The txprobe-sim developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <txprobe/graphio.hpp>

#include <algorithm>
#include <fstream>
#include <sstream>

namespace txprobe {

GraphFormat graph_format_from_name(const std::string& name)
{
    if (name == "edgelist") return GraphFormat::EdgeList;
    if (name == "graphml") return GraphFormat::GraphML;
    throw std::invalid_argument("unknown graph format: " + name);
}

const char* graph_format_name(GraphFormat format)
{
    return format == GraphFormat::EdgeList ? "edgelist" : "graphml";
}

GraphFormat graph_format_for_path(const std::string& path)
{
    const auto dot = path.rfind('.');
    if (dot != std::string::npos) {
        const std::string ext = path.substr(dot + 1);
        if (ext == "graphml" || ext == "xml") return GraphFormat::GraphML;
    }
    return GraphFormat::EdgeList;
}

void export_edge_list(const GraphSnapshot& g, std::ostream& out)
{
    // std::set<Edge> already iterates in (u, v) order with u < v.
    for (const Edge& e : g.edges()) out << e.first << ' ' << e.second << '\n';
}

GraphSnapshot import_edge_list(std::istream& in)
{
    std::vector<Edge> edges;
    NodeId max_id = 0;
    bool any = false;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        long long u, v;
        if (!(ls >> u >> v)) throw GraphParseError("expected two integer node ids", lineno);
        std::string extra;
        if (ls >> extra) throw GraphParseError("trailing token '" + extra + "'", lineno);
        if (u < 0 || v < 0) throw GraphParseError("negative node id", lineno);
        if (u == v) throw GraphParseError("self-loop", lineno);
        edges.push_back(make_edge(static_cast<NodeId>(u), static_cast<NodeId>(v)));
        max_id = std::max({max_id, static_cast<NodeId>(u), static_cast<NodeId>(v)});
        any = true;
    }
    GraphSnapshot g(any ? max_id + 1 : 0);
    for (size_t i = 0; i < edges.size(); ++i) {
        if (!g.add_edge(edges[i].first, edges[i].second)) {
            throw GraphParseError("duplicate edge", i + 1);
        }
    }
    return g;
}

namespace {

std::string xml_escape(const std::string& s)
{
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

std::string xml_unescape(const std::string& s)
{
    std::string out;
    for (size_t i = 0; i < s.size();) {
        if (s[i] != '&') {
            out += s[i++];
            continue;
        }
        if (s.compare(i, 5, "&amp;") == 0) { out += '&'; i += 5; }
        else if (s.compare(i, 4, "&lt;") == 0) { out += '<'; i += 4; }
        else if (s.compare(i, 4, "&gt;") == 0) { out += '>'; i += 4; }
        else if (s.compare(i, 6, "&quot;") == 0) { out += '"'; i += 6; }
        else out += s[i++];
    }
    return out;
}

/** Extract attribute="value" from a tag string; empty if absent. */
std::string tag_attr(const std::string& tag, const std::string& name)
{
    const std::string needle = name + "=\"";
    const auto pos = tag.find(needle);
    if (pos == std::string::npos) return {};
    const auto end = tag.find('"', pos + needle.size());
    if (end == std::string::npos) return {};
    return xml_unescape(tag.substr(pos + needle.size(), end - pos - needle.size()));
}

} // namespace

void export_graphml(const GraphSnapshot& g, std::ostream& out)
{
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n"
        << "  <key id=\"region\" for=\"node\" attr.name=\"region\" attr.type=\"string\"/>\n"
        << "  <key id=\"flags\" for=\"node\" attr.name=\"flags\" attr.type=\"int\"/>\n"
        << "  <graph id=\"G\" edgedefault=\"undirected\">\n";
    for (NodeId u = 0; u < g.num_vertices(); ++u) {
        const VertexAttrs& a = g.attrs(u);
        out << "    <node id=\"" << u << "\">";
        if (!a.region.empty()) out << "<data key=\"region\">" << xml_escape(a.region) << "</data>";
        if (a.flags != 0) out << "<data key=\"flags\">" << a.flags << "</data>";
        out << "</node>\n";
    }
    for (const Edge& e : g.edges()) {
        out << "    <edge source=\"" << e.first << "\" target=\"" << e.second << "\"/>\n";
    }
    out << "  </graph>\n</graphml>\n";
}

GraphSnapshot import_graphml(std::istream& in)
{
    struct ParsedNode {
        NodeId id;
        VertexAttrs attrs;
    };
    std::vector<ParsedNode> nodes;
    std::vector<Edge> edges;
    std::vector<size_t> edge_lines;

    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        size_t pos = 0;
        while ((pos = line.find('<', pos)) != std::string::npos) {
            const auto close = line.find('>', pos);
            if (close == std::string::npos) throw GraphParseError("unterminated tag", lineno);
            const std::string tag = line.substr(pos, close - pos + 1);
            if (tag.rfind("<node", 0) == 0) {
                const std::string id = tag_attr(tag, "id");
                if (id.empty()) throw GraphParseError("node without id", lineno);
                ParsedNode pn;
                try {
                    pn.id = static_cast<NodeId>(std::stoul(id));
                } catch (const std::exception&) {
                    throw GraphParseError("non-numeric node id '" + id + "'", lineno);
                }
                // Inline <data> children up to </node> on the same line.
                size_t dpos = close + 1;
                while (true) {
                    const auto dstart = line.find("<data", dpos);
                    const auto nend = line.find("</node>", dpos);
                    if (dstart == std::string::npos || (nend != std::string::npos && dstart > nend)) break;
                    const auto dclose = line.find('>', dstart);
                    const auto dend = line.find("</data>", dstart);
                    if (dclose == std::string::npos || dend == std::string::npos) {
                        throw GraphParseError("unterminated data element", lineno);
                    }
                    const std::string key = tag_attr(line.substr(dstart, dclose - dstart + 1), "key");
                    const std::string value = xml_unescape(line.substr(dclose + 1, dend - dclose - 1));
                    if (key == "region") pn.attrs.region = value;
                    else if (key == "flags") pn.attrs.flags = static_cast<uint32_t>(std::stoul(value));
                    dpos = dend + 7;
                }
                nodes.push_back(std::move(pn));
            } else if (tag.rfind("<edge", 0) == 0) {
                const std::string s = tag_attr(tag, "source");
                const std::string t = tag_attr(tag, "target");
                if (s.empty() || t.empty()) throw GraphParseError("edge without source/target", lineno);
                try {
                    edges.push_back(make_edge(static_cast<NodeId>(std::stoul(s)),
                                              static_cast<NodeId>(std::stoul(t))));
                } catch (const std::exception&) {
                    throw GraphParseError("non-numeric edge endpoint", lineno);
                }
                edge_lines.push_back(lineno);
            }
            pos = close + 1;
        }
    }

    NodeId max_id = 0;
    for (const auto& pn : nodes) max_id = std::max(max_id, pn.id);
    GraphSnapshot g(nodes.empty() ? 0 : max_id + 1);
    for (const auto& pn : nodes) g.attrs(pn.id) = pn.attrs;
    for (size_t i = 0; i < edges.size(); ++i) {
        if (edges[i].first == edges[i].second) throw GraphParseError("self-loop", edge_lines[i]);
        if (!g.add_edge(edges[i].first, edges[i].second)) {
            throw GraphParseError("duplicate edge", edge_lines[i]);
        }
    }
    return g;
}

void save_graph(const GraphSnapshot& g, const std::string& path, GraphFormat format)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    if (format == GraphFormat::EdgeList) export_edge_list(g, out);
    else export_graphml(g, out);
}

GraphSnapshot load_graph(const std::string& path, GraphFormat format)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    return format == GraphFormat::EdgeList ? import_edge_list(in) : import_graphml(in);
}

GraphSnapshot load_graph(const std::string& path)
{
    return load_graph(path, graph_format_for_path(path));
}

} // namespace txprobe
