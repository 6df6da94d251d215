// Copyright (c) 2026 The txprobe-sim developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <txprobe/graphgen.hpp>

#include <txprobe/rng.hpp>

#include <algorithm>
#include <numeric>
#include <set>
#include <stdexcept>

namespace txprobe {

GraphSnapshot gen_er(size_t n, size_t m, uint64_t seed)
{
    const size_t max_edges = n * (n - 1) / 2;
    if (m > max_edges) throw std::invalid_argument("edge count exceeds simple-graph maximum");
    GraphSnapshot g(n);
    Rng rng = Rng::substream(seed, "gen-er");
    if (m == max_edges) {
        for (NodeId u = 0; u + 1 < n; ++u) {
            for (NodeId v = u + 1; v < n; ++v) g.add_edge(u, v);
        }
        return g;
    }
    while (g.num_edges() < m) {
        const NodeId u = static_cast<NodeId>(rng.randrange(n));
        const NodeId v = static_cast<NodeId>(rng.randrange(n));
        if (u == v) continue;
        g.add_edge(u, v);
    }
    return g;
}

bool is_graphical(std::vector<size_t> seq)
{
    // Erdős–Gallai.
    std::sort(seq.begin(), seq.end(), std::greater<size_t>());
    const size_t n = seq.size();
    if (n == 0) return true;
    if (seq[0] >= n) return false;
    const size_t total = std::accumulate(seq.begin(), seq.end(), size_t{0});
    if (total % 2 != 0) return false;
    size_t lhs = 0;
    for (size_t k = 1; k <= n; ++k) {
        lhs += seq[k - 1];
        size_t rhs = k * (k - 1);
        for (size_t i = k; i < n; ++i) rhs += std::min(seq[i], k);
        if (lhs > rhs) return false;
    }
    return true;
}

namespace {

/** Pair shuffled stubs sequentially; return the leftover stubs of pairs that
 * would have created self-loops or duplicates. */
std::vector<NodeId> match_stubs(GraphSnapshot& g, std::vector<NodeId> stubs, Rng& rng)
{
    for (size_t i = stubs.size(); i > 1; --i) {
        std::swap(stubs[i - 1], stubs[rng.randrange(i)]);
    }
    std::vector<NodeId> leftover;
    for (size_t i = 0; i + 1 < stubs.size(); i += 2) {
        const NodeId u = stubs[i];
        const NodeId v = stubs[i + 1];
        if (u == v || g.has_edge(u, v)) {
            leftover.push_back(u);
            leftover.push_back(v);
            continue;
        }
        g.add_edge(u, v);
    }
    return leftover;
}

} // namespace

GraphSnapshot gen_cm(const std::vector<size_t>& degree_sequence, uint64_t seed)
{
    const size_t total = std::accumulate(degree_sequence.begin(), degree_sequence.end(), size_t{0});
    if (total % 2 != 0) throw std::invalid_argument("degree sum is odd");
    if (!is_graphical(degree_sequence)) throw std::invalid_argument("degree sequence is not graphical");

    Rng rng = Rng::substream(seed, "gen-cm");
    GraphSnapshot g(degree_sequence.size());

    std::vector<NodeId> stubs;
    stubs.reserve(total);
    for (NodeId u = 0; u < degree_sequence.size(); ++u) {
        for (size_t k = 0; k < degree_sequence[u]; ++k) stubs.push_back(u);
    }

    // Re-match leftovers a few times before switching to edge-swap repair.
    for (int attempt = 0; attempt < 20 && !stubs.empty(); ++attempt) {
        stubs = match_stubs(g, std::move(stubs), rng);
    }

    // Each leftover stub pair (u, v) is placed by splitting a random existing
    // edge (x, y) into (u, x) and (v, y); degrees are preserved exactly.
    std::vector<Edge> edge_list(g.edges().begin(), g.edges().end());
    size_t stuck = 0;
    while (!stubs.empty()) {
        if (stuck > 10000 * stubs.size() + 100000) {
            throw std::runtime_error("configuration-model repair did not converge");
        }
        const NodeId u = stubs[stubs.size() - 2];
        const NodeId v = stubs[stubs.size() - 1];
        if (u != v && !g.has_edge(u, v)) {
            g.add_edge(u, v);
            edge_list.push_back(make_edge(u, v));
            stubs.pop_back();
            stubs.pop_back();
            continue;
        }
        const Edge e = edge_list[rng.randrange(edge_list.size())];
        NodeId x = e.first;
        NodeId y = e.second;
        if (rng.chance(0.5)) std::swap(x, y);
        const bool ok = u != x && v != y && x != v && !(u == v && x == y) &&
                        !g.has_edge(u, x) && !g.has_edge(v, y);
        if (!ok || !g.has_edge(e.first, e.second)) {
            ++stuck;
            continue;
        }
        g.remove_edge(e.first, e.second);
        g.add_edge(u, x);
        g.add_edge(v, y);
        edge_list.erase(std::find(edge_list.begin(), edge_list.end(), e));
        edge_list.push_back(make_edge(u, x));
        edge_list.push_back(make_edge(v, y));
        stubs.pop_back();
        stubs.pop_back();
        stuck = 0;
    }
    return g;
}

GraphSnapshot gen_ba(size_t n, size_t target_m, uint64_t seed)
{
    if (n < 3) throw std::invalid_argument("preferential attachment needs n >= 3");
    const size_t max_edges = n * (n - 1) / 2;
    if (target_m < n - 1 || target_m > max_edges) {
        throw std::invalid_argument("target edge count infeasible for n vertices");
    }

    // Seed core: a path over m0 vertices; the remaining arrivals attach k or
    // k+1 edges so the total lands exactly on target_m.
    const size_t k_est = std::max<size_t>(1, (target_m + n / 2) / n);
    size_t m0 = std::min(n - 1, k_est + 2);
    size_t arrivals = n - m0;
    size_t core_edges = m0 - 1;
    while (arrivals > 0) {
        const size_t remaining = target_m - core_edges;
        const size_t k = remaining / arrivals;
        // Every arrival must be able to place k+1 distinct edges.
        if (remaining % arrivals == 0 || k + 1 <= m0) break;
        ++m0;
        --arrivals;
        ++core_edges;
    }
    if (arrivals == 0 && core_edges != target_m) {
        // Degenerate small cases: fill a clique prefix instead.
        GraphSnapshot g(n);
        size_t placed = 0;
        for (NodeId u = 0; u + 1 < n && placed < target_m; ++u) {
            for (NodeId v = u + 1; v < n && placed < target_m; ++v) {
                g.add_edge(u, v);
                ++placed;
            }
        }
        return g;
    }

    const size_t remaining = target_m - core_edges;
    const size_t k = arrivals > 0 ? remaining / arrivals : 0;
    const size_t extra = arrivals > 0 ? remaining % arrivals : 0;

    GraphSnapshot g(n);
    std::vector<NodeId> repeated; // one entry per incident edge end
    repeated.reserve(target_m * 2);
    for (NodeId u = 0; u + 1 < m0; ++u) {
        g.add_edge(u, u + 1);
        repeated.push_back(u);
        repeated.push_back(u + 1);
    }

    Rng rng = Rng::substream(seed, "gen-ba");
    for (size_t a = 0; a < arrivals; ++a) {
        const NodeId u = static_cast<NodeId>(m0 + a);
        const size_t attach = k + (a < extra ? 1 : 0);
        std::set<NodeId> chosen;
        while (chosen.size() < attach) {
            const NodeId v = repeated[rng.randrange(repeated.size())];
            if (v != u) chosen.insert(v);
        }
        for (NodeId v : chosen) {
            g.add_edge(u, v);
            repeated.push_back(u);
            repeated.push_back(v);
        }
    }
    return g;
}

void assign_regions(GraphSnapshot& g, uint64_t seed, const RegionDist& dist)
{
    if (dist.names.size() != dist.weights.size() || dist.names.empty()) {
        throw std::invalid_argument("region names/weights mismatch");
    }
    double total = 0.0;
    for (double w : dist.weights) total += w;
    Rng rng = Rng::substream(seed, "regions");
    for (NodeId u = 0; u < g.num_vertices(); ++u) {
        double x = rng.uniform01() * total;
        size_t pick = dist.names.size() - 1;
        for (size_t i = 0; i < dist.weights.size(); ++i) {
            if (x < dist.weights[i]) {
                pick = i;
                break;
            }
            x -= dist.weights[i];
        }
        g.attrs(u).region = dist.names[pick];
    }
}

} // namespace txprobe
