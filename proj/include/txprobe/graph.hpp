// Copyright (c) 2026 The txprobe-sim developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#ifndef TXPROBE_GRAPH_HPP
#define TXPROBE_GRAPH_HPP

#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace txprobe {

using NodeId = uint32_t;
using Edge = std::pair<NodeId, NodeId>; // normalized: first < second

inline Edge make_edge(NodeId a, NodeId b)
{
    return a < b ? Edge{a, b} : Edge{b, a};
}

struct VertexAttrs {
    std::string region;
    uint32_t flags{0};

    friend bool operator==(const VertexAttrs&, const VertexAttrs&) = default;
};

/** Simple undirected labeled graph. Self-loops and parallel edges are
 * rejected at insertion, so any GraphSnapshot is simple by construction. */
class GraphSnapshot
{
public:
    GraphSnapshot() = default;
    explicit GraphSnapshot(size_t n) : m_attrs(n), m_adj(n) {}

    size_t num_vertices() const { return m_adj.size(); }
    size_t num_edges() const { return m_edges.size(); }

    NodeId add_vertex()
    {
        m_attrs.emplace_back();
        m_adj.emplace_back();
        return static_cast<NodeId>(m_adj.size() - 1);
    }

    /** Returns false on duplicate edge; throws on self-loop or bad vertex. */
    bool add_edge(NodeId u, NodeId v)
    {
        if (u == v) throw std::invalid_argument("self-loop");
        check_vertex(u);
        check_vertex(v);
        if (!m_edges.insert(make_edge(u, v)).second) return false;
        m_adj[u].insert(v);
        m_adj[v].insert(u);
        return true;
    }

    bool remove_edge(NodeId u, NodeId v)
    {
        if (m_edges.erase(make_edge(u, v)) == 0) return false;
        m_adj[u].erase(v);
        m_adj[v].erase(u);
        return true;
    }

    bool has_edge(NodeId u, NodeId v) const
    {
        return m_edges.count(make_edge(u, v)) > 0;
    }

    const std::set<NodeId>& neighbors(NodeId u) const
    {
        check_vertex(u);
        return m_adj[u];
    }

    size_t degree(NodeId u) const { return neighbors(u).size(); }

    const std::set<Edge>& edges() const { return m_edges; }

    std::vector<size_t> degree_sequence() const
    {
        std::vector<size_t> seq;
        seq.reserve(num_vertices());
        for (size_t u = 0; u < num_vertices(); ++u) seq.push_back(m_adj[u].size());
        return seq;
    }

    VertexAttrs& attrs(NodeId u)
    {
        check_vertex(u);
        return m_attrs[u];
    }
    const VertexAttrs& attrs(NodeId u) const
    {
        check_vertex(u);
        return m_attrs[u];
    }

    friend bool operator==(const GraphSnapshot& a, const GraphSnapshot& b)
    {
        return a.m_attrs == b.m_attrs && a.m_edges == b.m_edges;
    }

private:
    void check_vertex(NodeId u) const
    {
        if (u >= m_adj.size()) throw std::out_of_range("vertex " + std::to_string(u));
    }

    std::vector<VertexAttrs> m_attrs;
    std::vector<std::set<NodeId>> m_adj;
    std::set<Edge> m_edges;
};

} // namespace txprobe

#endif // TXPROBE_GRAPH_HPP
