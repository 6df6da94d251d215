// Copyright (c) 2026 The txprobe-sim developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <txprobe/metrics.hpp>

#include <txprobe/graphgen.hpp>
#include <txprobe/rng.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <sstream>

namespace txprobe {

std::vector<std::vector<NodeId>> connected_components(const GraphSnapshot& g)
{
    const size_t n = g.num_vertices();
    std::vector<char> seen(n, 0);
    std::vector<std::vector<NodeId>> components;
    for (NodeId start = 0; start < n; ++start) {
        if (seen[start]) continue;
        std::vector<NodeId> comp;
        std::deque<NodeId> queue{start};
        seen[start] = 1;
        while (!queue.empty()) {
            const NodeId u = queue.front();
            queue.pop_front();
            comp.push_back(u);
            for (NodeId v : g.neighbors(u)) {
                if (!seen[v]) {
                    seen[v] = 1;
                    queue.push_back(v);
                }
            }
        }
        components.push_back(std::move(comp));
    }
    return components;
}

DistanceMetrics distance_metrics(const GraphSnapshot& g)
{
    DistanceMetrics dm;
    if (g.num_vertices() == 0) return dm;

    auto components = connected_components(g);
    auto largest = std::max_element(components.begin(), components.end(),
                                    [](const auto& a, const auto& b) { return a.size() < b.size(); });
    dm.connected = components.size() == 1;
    dm.component_size = largest->size();

    const size_t n = g.num_vertices();
    std::vector<size_t> dist(n);
    size_t diameter = 0;
    size_t radius = std::numeric_limits<size_t>::max();
    double ecc_sum = 0.0;
    std::vector<size_t> eccentricities;
    eccentricities.reserve(largest->size());

    for (NodeId source : *largest) {
        std::fill(dist.begin(), dist.end(), std::numeric_limits<size_t>::max());
        dist[source] = 0;
        std::deque<NodeId> queue{source};
        size_t ecc = 0;
        while (!queue.empty()) {
            const NodeId u = queue.front();
            queue.pop_front();
            ecc = std::max(ecc, dist[u]);
            for (NodeId v : g.neighbors(u)) {
                if (dist[v] == std::numeric_limits<size_t>::max()) {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        eccentricities.push_back(ecc);
        ecc_sum += static_cast<double>(ecc);
        diameter = std::max(diameter, ecc);
        radius = std::min(radius, ecc);
    }

    dm.diameter = diameter;
    dm.radius = radius;
    dm.mean_eccentricity = ecc_sum / static_cast<double>(largest->size());
    for (size_t ecc : eccentricities) {
        if (ecc == radius) ++dm.center_size;
        if (ecc == diameter) ++dm.periphery_size;
    }
    return dm;
}

namespace {

size_t triangles_at(const GraphSnapshot& g, NodeId u)
{
    size_t count = 0;
    const auto& nu = g.neighbors(u);
    for (NodeId v : nu) {
        if (v <= u) continue;
        for (NodeId w : g.neighbors(v)) {
            if (w > v && nu.count(w) > 0) ++count;
        }
    }
    return count;
}

} // namespace

ClusteringMetrics clustering_metrics(const GraphSnapshot& g)
{
    ClusteringMetrics cm;
    const size_t n = g.num_vertices();
    if (n == 0) return cm;

    double local_sum = 0.0;
    double triangle_ends = 0.0; // per-node triangle incidences, = 3 * triangles total
    double triples = 0.0;
    for (NodeId u = 0; u < n; ++u) {
        const size_t deg = g.degree(u);
        const double pairs = static_cast<double>(deg) * (deg - 1) / 2.0;
        size_t tri = 0;
        if (deg >= 2) {
            const auto& nu = g.neighbors(u);
            for (auto it = nu.begin(); it != nu.end(); ++it) {
                auto jt = it;
                for (++jt; jt != nu.end(); ++jt) {
                    if (g.has_edge(*it, *jt)) ++tri;
                }
            }
            local_sum += static_cast<double>(tri) / pairs;
        }
        triangle_ends += static_cast<double>(tri);
        triples += pairs;
    }
    cm.avg_clustering = local_sum / static_cast<double>(n);
    cm.transitivity = triples > 0.0 ? triangle_ends / triples : 0.0;
    return cm;
}

std::optional<double> degree_assortativity(const GraphSnapshot& g)
{
    if (g.num_edges() < 2) return std::nullopt;
    double sum_jk = 0.0, sum_half = 0.0, sum_sq_half = 0.0;
    const double m = static_cast<double>(g.num_edges());
    for (const Edge& e : g.edges()) {
        const double j = static_cast<double>(g.degree(e.first));
        const double k = static_cast<double>(g.degree(e.second));
        sum_jk += j * k;
        sum_half += (j + k) / 2.0;
        sum_sq_half += (j * j + k * k) / 2.0;
    }
    const double mu = sum_half / m;
    const double num = sum_jk / m - mu * mu;
    const double den = sum_sq_half / m - mu * mu;
    if (std::abs(den) < 1e-15) return std::nullopt;
    return num / den;
}

std::optional<double> attribute_assortativity(const GraphSnapshot& g)
{
    if (g.num_edges() == 0) return std::nullopt;
    std::map<std::string, size_t> index;
    for (NodeId u = 0; u < g.num_vertices(); ++u) index.emplace(g.attrs(u).region, 0);
    size_t next = 0;
    for (auto& [name, idx] : index) idx = next++;
    const size_t c = index.size();
    if (c < 2) return std::nullopt;

    // Symmetric mixing matrix over directed edge endpoint pairs.
    std::vector<double> e(c * c, 0.0);
    const double m2 = 2.0 * static_cast<double>(g.num_edges());
    for (const Edge& edge : g.edges()) {
        const size_t a = index[g.attrs(edge.first).region];
        const size_t b = index[g.attrs(edge.second).region];
        e[a * c + b] += 1.0 / m2;
        e[b * c + a] += 1.0 / m2;
    }
    double trace = 0.0, a_sq = 0.0;
    for (size_t i = 0; i < c; ++i) {
        trace += e[i * c + i];
        double row = 0.0;
        for (size_t j = 0; j < c; ++j) row += e[i * c + j];
        a_sq += row * row;
    }
    if (std::abs(1.0 - a_sq) < 1e-15) return std::nullopt;
    return (trace - a_sq) / (1.0 - a_sq);
}

namespace {

/** Bit-matrix adjacency for the clique search. */
class BitAdjacency
{
public:
    explicit BitAdjacency(const GraphSnapshot& g)
        : m_n(g.num_vertices()), m_words((m_n + 63) / 64), m_bits(m_n * m_words, 0)
    {
        for (const Edge& e : g.edges()) {
            set(e.first, e.second);
            set(e.second, e.first);
        }
    }

    bool test(size_t u, size_t v) const
    {
        return (m_bits[u * m_words + v / 64] >> (v % 64)) & 1;
    }

private:
    void set(size_t u, size_t v) { m_bits[u * m_words + v / 64] |= uint64_t{1} << (v % 64); }

    size_t m_n;
    size_t m_words;
    std::vector<uint64_t> m_bits;
};

struct CliqueSearch {
    const BitAdjacency& adj;
    std::chrono::steady_clock::time_point deadline;
    size_t best{0};
    bool timed_out{false};
    uint64_t ticks{0};

    /** Greedy color bound: candidates re-ordered so colors are non-decreasing. */
    void color_sort(const std::vector<NodeId>& P, std::vector<NodeId>& ordered,
                    std::vector<size_t>& colors)
    {
        ordered.clear();
        colors.clear();
        std::vector<std::vector<NodeId>> classes;
        for (NodeId v : P) {
            bool placed = false;
            for (auto& cls : classes) {
                bool conflict = false;
                for (NodeId u : cls) {
                    if (adj.test(u, v)) {
                        conflict = true;
                        break;
                    }
                }
                if (!conflict) {
                    cls.push_back(v);
                    placed = true;
                    break;
                }
            }
            if (!placed) classes.push_back({v});
        }
        for (size_t c = 0; c < classes.size(); ++c) {
            for (NodeId v : classes[c]) {
                ordered.push_back(v);
                colors.push_back(c + 1);
            }
        }
    }

    void expand(size_t depth, std::vector<NodeId>& P)
    {
        if ((++ticks & 1023) == 0 && std::chrono::steady_clock::now() > deadline) {
            timed_out = true;
        }
        if (timed_out) return;
        std::vector<NodeId> ordered;
        std::vector<size_t> colors;
        color_sort(P, ordered, colors);
        for (size_t i = ordered.size(); i-- > 0;) {
            if (depth + colors[i] <= best) return;
            const NodeId v = ordered[i];
            std::vector<NodeId> next;
            for (size_t j = 0; j < i; ++j) {
                if (adj.test(ordered[j], v)) next.push_back(ordered[j]);
            }
            if (depth + 1 > best) best = depth + 1;
            if (!next.empty()) expand(depth + 1, next);
            if (timed_out) return;
        }
    }
};

} // namespace

CliqueResult clique_number(const GraphSnapshot& g, int64_t budget_ms)
{
    const size_t n = g.num_vertices();
    if (n == 0) return {0, true};
    if (g.num_edges() == 0) return {1, true};

    BitAdjacency adj(g);
    CliqueSearch search{adj, std::chrono::steady_clock::now() + std::chrono::milliseconds(budget_ms)};
    search.best = 1;

    // Degeneracy order at the top level keeps candidate sets small.
    std::vector<size_t> deg(n);
    std::vector<char> removed(n, 0);
    for (NodeId u = 0; u < n; ++u) deg[u] = g.degree(u);
    std::vector<NodeId> order;
    order.reserve(n);
    for (size_t step = 0; step < n; ++step) {
        NodeId pick = 0;
        size_t min_deg = std::numeric_limits<size_t>::max();
        for (NodeId u = 0; u < n; ++u) {
            if (!removed[u] && deg[u] < min_deg) {
                min_deg = deg[u];
                pick = u;
            }
        }
        removed[pick] = 1;
        order.push_back(pick);
        for (NodeId v : g.neighbors(pick)) {
            if (!removed[v]) --deg[v];
        }
    }

    std::vector<char> later(n, 0);
    for (size_t i = order.size(); i-- > 0;) {
        const NodeId v = order[i];
        later[v] = 1;
        std::vector<NodeId> candidates;
        for (NodeId u : g.neighbors(v)) {
            if (later[u]) candidates.push_back(u);
        }
        if (candidates.size() + 1 > search.best) {
            search.expand(1, candidates);
        }
        if (search.timed_out) break;
    }
    return {search.best, !search.timed_out};
}

double modularity(const GraphSnapshot& g, const std::vector<uint32_t>& community)
{
    const double m = static_cast<double>(g.num_edges());
    if (m == 0.0) return 0.0;
    std::map<uint32_t, double> internal, total_degree;
    for (const Edge& e : g.edges()) {
        if (community[e.first] == community[e.second]) internal[community[e.first]] += 1.0;
    }
    for (NodeId u = 0; u < g.num_vertices(); ++u) {
        total_degree[community[u]] += static_cast<double>(g.degree(u));
    }
    double q = 0.0;
    for (const auto& [c, d] : total_degree) {
        const double in = internal.count(c) ? internal[c] : 0.0;
        const double frac = d / (2.0 * m);
        q += in / m - frac * frac;
    }
    return q;
}

namespace {

/** Weighted multigraph the Louvain levels aggregate into. */
struct WeightedGraph {
    size_t n{0};
    std::vector<std::map<uint32_t, double>> adj; // neighbor -> weight, no self entries
    std::vector<double> self_loop;               // weight counted once
    std::vector<double> strength;                // sum of incident weight, self loops doubled
    double total_weight{0.0};                    // sum of edge weights incl. self loops
};

WeightedGraph from_graph(const GraphSnapshot& g)
{
    WeightedGraph wg;
    wg.n = g.num_vertices();
    wg.adj.resize(wg.n);
    wg.self_loop.assign(wg.n, 0.0);
    wg.strength.assign(wg.n, 0.0);
    for (const Edge& e : g.edges()) {
        wg.adj[e.first][e.second] += 1.0;
        wg.adj[e.second][e.first] += 1.0;
        wg.strength[e.first] += 1.0;
        wg.strength[e.second] += 1.0;
        wg.total_weight += 1.0;
    }
    return wg;
}

/** One Louvain level: local moves until quiescent. Returns true if anything
 * moved. `community` is dense-renumbered on exit. */
bool louvain_level(const WeightedGraph& wg, std::vector<uint32_t>& community, Rng& rng)
{
    const double m2 = 2.0 * wg.total_weight;
    std::vector<double> tot(wg.n, 0.0); // community strength sums
    community.resize(wg.n);
    for (uint32_t u = 0; u < wg.n; ++u) {
        community[u] = u;
        tot[u] = wg.strength[u];
    }

    std::vector<NodeId> visit(wg.n);
    std::iota(visit.begin(), visit.end(), 0);
    for (size_t i = visit.size(); i > 1; --i) std::swap(visit[i - 1], visit[rng.randrange(i)]);

    bool any_move = false;
    bool moved = true;
    int passes = 0;
    while (moved && passes++ < 128) {
        moved = false;
        for (NodeId u : visit) {
            const uint32_t own = community[u];
            std::map<uint32_t, double> weight_to; // community -> edge weight from u
            for (const auto& [v, w] : wg.adj[u]) weight_to[community[v]] += w;

            tot[own] -= wg.strength[u];
            const double k_u = wg.strength[u];
            // Gain of joining c (relative, common factors dropped):
            //   w_uc - tot_c * k_u / m2
            double best_gain = (weight_to.count(own) ? weight_to[own] : 0.0) - tot[own] * k_u / m2;
            uint32_t best_comm = own;
            for (const auto& [c, w_uc] : weight_to) {
                if (c == own) continue;
                const double gain = w_uc - tot[c] * k_u / m2;
                if (gain > best_gain + 1e-12 || (std::abs(gain - best_gain) <= 1e-12 && c < best_comm)) {
                    best_gain = gain;
                    best_comm = c;
                }
            }
            tot[best_comm] += wg.strength[u];
            if (best_comm != own) {
                community[u] = best_comm;
                moved = true;
                any_move = true;
            }
        }
    }

    // Dense renumbering by smallest member id.
    std::map<uint32_t, uint32_t> remap;
    for (uint32_t u = 0; u < wg.n; ++u) remap.emplace(community[u], 0);
    uint32_t next = 0;
    for (auto& [old_id, new_id] : remap) new_id = next++;
    for (uint32_t u = 0; u < wg.n; ++u) community[u] = remap[community[u]];
    return any_move;
}

WeightedGraph aggregate(const WeightedGraph& wg, const std::vector<uint32_t>& community, size_t count)
{
    WeightedGraph out;
    out.n = count;
    out.adj.resize(count);
    out.self_loop.assign(count, 0.0);
    out.strength.assign(count, 0.0);
    out.total_weight = wg.total_weight;
    for (uint32_t u = 0; u < wg.n; ++u) {
        const uint32_t cu = community[u];
        out.self_loop[cu] += wg.self_loop[u];
        for (const auto& [v, w] : wg.adj[u]) {
            const uint32_t cv = community[v];
            if (cu == cv) {
                if (u < v) out.self_loop[cu] += w;
            } else {
                out.adj[cu][cv] += w;
            }
        }
    }
    for (uint32_t c = 0; c < count; ++c) {
        double s = 2.0 * out.self_loop[c];
        for (const auto& [v, w] : out.adj[c]) s += w;
        out.strength[c] = s;
    }
    return out;
}

} // namespace

CommunityResult communities(const GraphSnapshot& g, uint64_t seed)
{
    CommunityResult result;
    const size_t n = g.num_vertices();
    result.community.assign(n, 0);
    if (n == 0) return result;
    if (g.num_edges() == 0) {
        for (uint32_t u = 0; u < n; ++u) result.community[u] = u;
        result.count = n;
        result.modularity = 0.0;
        return result;
    }

    Rng rng = Rng::substream(seed, "louvain");
    WeightedGraph wg = from_graph(g);
    std::vector<uint32_t> node_to_comm(n);
    std::iota(node_to_comm.begin(), node_to_comm.end(), 0);

    for (int level = 0; level < 64; ++level) {
        std::vector<uint32_t> level_comm;
        const bool improved = louvain_level(wg, level_comm, rng);
        const size_t count = level_comm.empty()
                                 ? 0
                                 : 1 + *std::max_element(level_comm.begin(), level_comm.end());
        for (uint32_t u = 0; u < n; ++u) node_to_comm[u] = level_comm[node_to_comm[u]];
        if (!improved || count == wg.n) break;
        wg = aggregate(wg, level_comm, count);
    }

    // Dense renumber in order of smallest original vertex.
    std::map<uint32_t, uint32_t> remap;
    for (uint32_t u = 0; u < n; ++u) remap.emplace(node_to_comm[u], 0);
    uint32_t next = 0;
    for (auto& [old_id, new_id] : remap) new_id = next++;
    for (uint32_t u = 0; u < n; ++u) result.community[u] = remap[node_to_comm[u]];
    result.count = next;
    result.modularity = modularity(g, result.community);
    return result;
}

DegreeDistribution degree_distribution(const GraphSnapshot& g)
{
    DegreeDistribution dd;
    const size_t n = g.num_vertices();
    if (n == 0) return dd;
    for (NodeId u = 0; u < n; ++u) {
        const size_t deg = g.degree(u);
        ++dd.histogram[deg];
        dd.max = std::max(dd.max, deg);
    }
    dd.mean = 2.0 * static_cast<double>(g.num_edges()) / static_cast<double>(n);
    size_t best_count = 0;
    for (const auto& [deg, count] : dd.histogram) {
        if (count > best_count) {
            best_count = count;
            dd.mode = deg;
        }
    }
    return dd;
}

MetricsReport compute_metrics(const GraphSnapshot& g, const MetricsOptions& options)
{
    MetricsReport report;
    report.distance = distance_metrics(g);
    report.clustering = clustering_metrics(g);
    report.degree_assortativity = degree_assortativity(g);
    report.attribute_assortativity = attribute_assortativity(g);
    report.clique = clique_number(g, options.clique_budget_ms);
    report.communities = communities(g, options.seed);
    report.degrees = degree_distribution(g);
    return report;
}

std::vector<std::pair<std::string, double>> metric_rows(const MetricsReport& r)
{
    const double nan = std::numeric_limits<double>::quiet_NaN();
    return {
        {"diameter", static_cast<double>(r.distance.diameter)},
        {"periphery_size", static_cast<double>(r.distance.periphery_size)},
        {"radius", static_cast<double>(r.distance.radius)},
        {"center_size", static_cast<double>(r.distance.center_size)},
        {"eccentricity", r.distance.mean_eccentricity},
        {"clustering_coefficient", r.clustering.avg_clustering},
        {"transitivity", r.clustering.transitivity},
        {"degree_assortativity", r.degree_assortativity.value_or(nan)},
        {"attribute_assortativity", r.attribute_assortativity.value_or(nan)},
        {"clique_number", static_cast<double>(r.clique.size)},
        {"modularity", r.communities.modularity},
    };
}

const char* graph_model_name(GraphModel model)
{
    switch (model) {
    case GraphModel::ER: return "er";
    case GraphModel::CM: return "cm";
    case GraphModel::BA: return "ba";
    }
    return "?";
}

GraphModel graph_model_from_name(const std::string& name)
{
    if (name == "er" || name == "ER") return GraphModel::ER;
    if (name == "cm" || name == "CM") return GraphModel::CM;
    if (name == "ba" || name == "BA") return GraphModel::BA;
    throw std::invalid_argument("unknown graph model: " + name);
}

EnsembleComparison ensemble_compare(const GraphSnapshot& g, const std::vector<GraphModel>& models,
                                    size_t runs, uint64_t seed, const MetricsOptions& options)
{
    EnsembleComparison cmp;
    cmp.runs = runs;
    MetricsOptions obs_options = options;
    obs_options.seed = seed;
    const auto observed = metric_rows(compute_metrics(g, obs_options));
    const auto degseq = g.degree_sequence();

    for (GraphModel model : models) {
        std::vector<EnsembleEntry> entries(observed.size());
        for (size_t i = 0; i < observed.size(); ++i) {
            entries[i].metric = observed[i].first;
            entries[i].observed = observed[i].second;
        }
        for (size_t run = 0; run < runs; ++run) {
            const uint64_t run_seed =
                Rng::substream(seed + run, std::string("ensemble-") + graph_model_name(model)).next();
            GraphSnapshot sample;
            switch (model) {
            case GraphModel::ER:
                sample = gen_er(g.num_vertices(), g.num_edges(), run_seed);
                assign_regions(sample, run_seed);
                break;
            case GraphModel::CM:
                sample = gen_cm(degseq, run_seed);
                // Same vertices: keep the observed labels.
                for (NodeId u = 0; u < g.num_vertices(); ++u) sample.attrs(u) = g.attrs(u);
                break;
            case GraphModel::BA:
                sample = gen_ba(g.num_vertices(), g.num_edges(), run_seed);
                assign_regions(sample, run_seed);
                break;
            }
            MetricsOptions run_options = options;
            run_options.seed = run_seed;
            const auto rows = metric_rows(compute_metrics(sample, run_options));
            for (size_t i = 0; i < rows.size(); ++i) {
                const double v = rows[i].second;
                if (std::isnan(v)) continue;
                entries[i].mean += v;
                ++entries[i].defined_runs;
                if (v > entries[i].observed) entries[i].percent_higher += 1.0;
            }
        }
        for (auto& entry : entries) {
            if (entry.defined_runs > 0) {
                entry.mean /= static_cast<double>(entry.defined_runs);
                entry.percent_higher *= 100.0 / static_cast<double>(entry.defined_runs);
            }
        }
        cmp.per_model[model] = std::move(entries);
    }
    return cmp;
}

std::string format_ensemble_table(const MetricsReport& observed, const EnsembleComparison& cmp)
{
    std::ostringstream out;
    const auto rows = metric_rows(observed);
    out << "metric                      observed";
    for (const auto& [model, entries] : cmp.per_model) {
        out << "  " << graph_model_name(model) << " mean (higher%)";
    }
    out << '\n';
    for (size_t i = 0; i < rows.size(); ++i) {
        std::ostringstream name;
        name.width(26);
        name << std::left << rows[i].first;
        out << name.str() << "  ";
        out.setf(std::ios::fixed);
        out.precision(4);
        out << rows[i].second;
        for (const auto& [model, entries] : cmp.per_model) {
            out.precision(4);
            out << "  " << entries[i].mean << " (";
            out.precision(0);
            out << entries[i].percent_higher << "%)";
        }
        out << '\n';
    }
    return out.str();
}

} // namespace txprobe
