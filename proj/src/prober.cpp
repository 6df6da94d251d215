// Copyright (c) 2026 The txprobe-sim developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <txprobe/prober.hpp>

#include <algorithm>
#include <cassert>
#include <cmath>

namespace txprobe {

const char* exclude_reason_name(ExcludeReason reason)
{
    switch (reason) {
    case ExcludeReason::Unblockable: return "unblockable";
    case ExcludeReason::Disconnected: return "disconnected";
    case ExcludeReason::Inconsistent: return "inconsistent";
    }
    return "?";
}

std::vector<std::vector<NodeId>> plan_partitions(const std::vector<NodeId>& nodes)
{
    const size_t r_n = nodes.size();
    std::vector<std::vector<NodeId>> sets;
    if (r_n < 2) return sets;

    const auto [w, h] = grid_shape(r_n);
    const auto cell = [&](size_t row, size_t col) -> std::optional<NodeId> {
        const size_t idx = row * w + col;
        if (idx >= r_n) return std::nullopt;
        return nodes[idx];
    };

    // Rows, skipping the last (its pairs are covered by the other sets).
    for (size_t row = 0; row + 1 < h; ++row) {
        std::vector<NodeId> set;
        for (size_t col = 0; col < w; ++col) {
            if (auto v = cell(row, col)) set.push_back(*v);
        }
        if (!set.empty()) sets.push_back(std::move(set));
    }

    if (h <= w) {
        // Columns, skipping the last.
        for (size_t col = 0; col + 1 < w; ++col) {
            std::vector<NodeId> set;
            for (size_t row = 0; row < h; ++row) {
                if (auto v = cell(row, col)) set.push_back(*v);
            }
            if (!set.empty()) sets.push_back(std::move(set));
        }
    } else {
        // Tall grids (w capped): columns exceed the pool limit, so each of the
        // w columns is split into ceil(h/w) row chunks.
        const size_t chunks = (h + w - 1) / w;
        const size_t chunk_rows = (h + chunks - 1) / chunks;
        for (size_t col = 0; col < w; ++col) {
            for (size_t chunk = 0; chunk < chunks; ++chunk) {
                std::vector<NodeId> set;
                const size_t row_end = std::min(h, (chunk + 1) * chunk_rows);
                for (size_t row = chunk * chunk_rows; row < row_end; ++row) {
                    if (auto v = cell(row, col)) set.push_back(*v);
                }
                if (!set.empty()) sets.push_back(std::move(set));
            }
        }
    }
    return sets;
}

std::set<Edge> infer_edges(const std::map<NodeId, std::set<TxId>>& marker_known,
                           const RoundPlan& plan)
{
    std::set<Edge> edges;
    for (const auto& [sink, known] : marker_known) {
        for (NodeId source : plan.source_set) {
            const auto it = plan.marker_of.find(source);
            if (it != plan.marker_of.end() && known.count(it->second.id()) > 0) {
                edges.insert(make_edge(source, sink));
            }
        }
    }
    return edges;
}

void sanitize(InferenceResult& result, double transitory_threshold, size_t node_count)
{
    result.edges.clear();
    for (const auto& [edge, rounds] : result.edge_rounds) {
        if (result.excluded_nodes.count(edge.first) > 0 ||
            result.excluded_nodes.count(edge.second) > 0) {
            continue;
        }
        const auto sep = result.separated_rounds.find(edge);
        if (sep == result.separated_rounds.end() || sep->second == 0) continue;
        const double needed = transitory_threshold * static_cast<double>(sep->second);
        if (static_cast<double>(rounds.size()) + 1e-9 < needed) continue;
        result.edges.insert(edge);
    }
    result.retained.clear();
    for (NodeId u = 0; u < node_count; ++u) {
        if (result.excluded_nodes.count(u) == 0) result.retained.insert(u);
    }
}

std::pair<double, double> evaluate_pr(const std::set<Edge>& inferred, const std::set<Edge>& truth,
                                      const std::set<NodeId>& retained)
{
    const auto restrict = [&](const std::set<Edge>& edges) {
        std::set<Edge> kept;
        for (const Edge& e : edges) {
            if (retained.count(e.first) > 0 && retained.count(e.second) > 0) kept.insert(e);
        }
        return kept;
    };
    const std::set<Edge> inf = restrict(inferred);
    const std::set<Edge> tru = restrict(truth);
    size_t hit = 0;
    for (const Edge& e : inf) {
        if (tru.count(e) > 0) ++hit;
    }
    const double precision = inf.empty() ? 1.0 : static_cast<double>(hit) / static_cast<double>(inf.size());
    const double recall = tru.empty() ? 1.0 : static_cast<double>(hit) / static_cast<double>(tru.size());
    return {precision, recall};
}

Prober::Prober(Simulation& sim, ProbeConfig config)
    : m_sim(sim), m_config(config), m_rng(Rng::substream(config.seed, "probe"))
{
}

std::vector<NodeId> Prober::live_nodes(const std::vector<NodeId>& candidates) const
{
    std::vector<NodeId> live;
    live.reserve(candidates.size());
    for (NodeId n : candidates) {
        if (m_sim.disconnected().count(n) == 0) live.push_back(n);
    }
    return live;
}

std::set<NodeId> Prober::detect_unblockable(const std::vector<NodeId>& nodes)
{
    const NodeId first = m_sim.measurement_node();
    const NodeId second = m_sim.second_observer();
    const TxId probe_hash = m_rng.rand256();
    const TimeMs t0 = m_sim.now();

    for (NodeId n : live_nodes(nodes)) {
        m_sim.inject(n, Message::inv(first, n, {probe_hash}), t0);
    }
    m_sim.run_until(t0 + m_config.unblockable_offer_gap_ms); // everyone requests the first offer
    const TimeMs t1 = m_sim.now();
    for (NodeId n : live_nodes(nodes)) {
        m_sim.inject(n, Message::inv(second, n, {probe_hash}), t1);
    }
    const auto captured = m_sim.run_until(t1 + m_config.unblockable_settle_ms);

    std::set<NodeId> flagged;
    for (const Message& msg : captured) {
        if (msg.kind != MsgKind::GetData || msg.to != second) continue;
        if (std::find(msg.ids.begin(), msg.ids.end(), probe_hash) != msg.ids.end()) {
            flagged.insert(msg.from);
        }
    }
    return flagged;
}

namespace {

struct CleanseKitIndex {
    const CleansingKit& kit;
    std::map<TxId, size_t> by_id;

    explicit CleanseKitIndex(const CleansingKit& k) : kit(k)
    {
        for (size_t i = 0; i < kit.squatters.size(); ++i) by_id.emplace(kit.squatters[i].id(), i);
    }
};

} // namespace

void Prober::cleanse_sinks(const std::vector<NodeId>& sink_set)
{
    const Outpoint funding = m_sim.add_funding(1)[0];
    CleansingKit kit = build_cleansing_kit(funding);
    if (m_config.squatter_grind_fraction > 0.0 && m_config.squatter_grind_fraction < 1.0) {
        const HashRange range = HashRange::bottom_fraction(m_config.squatter_grind_fraction);
        const auto attempts =
            static_cast<uint64_t>(std::ceil(32.0 / m_config.squatter_grind_fraction));
        for (auto& squatter : kit.squatters) squatter = grind_into_range(squatter, range, attempts);
    }

    const NodeId observer = m_sim.measurement_node();
    const TimeMs lat = 0; // observer links default to zero; passes advance 1 ms each
    (void)lat;
    const CleanseKitIndex index(kit);
    std::vector<TxId> squatter_ids;
    for (const auto& [id, i] : index.by_id) squatter_ids.push_back(id);

    const TimeMs t0 = m_sim.now();
    std::vector<NodeId> sinks = live_nodes(sink_set);
    for (NodeId sink : sinks) {
        for (const Transaction& squatter : kit.squatters) {
            m_sim.inject(sink, Message::tx_msg(observer, sink, squatter), t0);
        }
    }
    TimeMs t = t0 + 1;
    m_sim.run_until(t);

    // Verified fill: pool eviction may have displaced some squatters, so
    // re-offer the full set and resend whatever each sink requests back,
    // until a pass draws no requests (the pool then provably holds all 100,
    // squeezing every resident orphan out).
    std::set<NodeId> unverified(sinks.begin(), sinks.end());
    for (int pass = 0; pass < m_config.max_cleanse_passes && !unverified.empty(); ++pass) {
        for (auto it = unverified.begin(); it != unverified.end();) {
            if (m_sim.disconnected().count(*it) > 0) it = unverified.erase(it);
            else ++it;
        }
        if (unverified.empty()) break;
        for (NodeId sink : unverified) {
            m_sim.inject(sink, Message::inv(observer, sink, squatter_ids), t);
        }
        const auto captured = m_sim.run_until(t);
        std::map<NodeId, std::vector<size_t>> missing;
        for (const Message& msg : captured) {
            if (msg.kind != MsgKind::GetData || msg.to != observer) continue;
            if (unverified.count(msg.from) == 0) continue;
            for (const TxId& id : msg.ids) {
                const auto it = index.by_id.find(id);
                if (it != index.by_id.end()) missing[msg.from].push_back(it->second);
            }
        }
        for (auto it = unverified.begin(); it != unverified.end();) {
            if (missing.count(*it) == 0) it = unverified.erase(it);
            else ++it;
        }
        for (const auto& [sink, idxs] : missing) {
            for (size_t i : idxs) {
                m_sim.inject(sink, Message::tx_msg(observer, sink, kit.squatters[i]), t);
            }
        }
        t += 1;
        m_sim.run_until(t);
    }

    // Release the cleanser; every pooled squatter is promoted (one accepted,
    // the rest conflict away), emptying the verified pools.
    const TimeMs cleanser_at = std::max(t, t0 + m_config.cleanse_wait_ms);
    for (NodeId sink : live_nodes(sinks)) {
        m_sim.inject(sink, Message::tx_msg(observer, sink, kit.cleanser), cleanser_at);
    }
    m_sim.run_until(cleanser_at + 1);
}

void Prober::invblock_all(const std::vector<TxId>& ids, const std::vector<NodeId>& targets,
                          TimeMs until)
{
    const NodeId observer = m_sim.measurement_node();
    const TimeMs start = m_sim.now();
    for (TimeMs at = start; at < until; at += m_config.invblock_refresh_ms) {
        for (NodeId target : targets) {
            if (m_sim.disconnected().count(target) > 0) continue;
            m_sim.inject(target, Message::inv(observer, target, ids), at);
        }
    }
}

RoundPlan Prober::make_round_plan(size_t round_index, std::vector<NodeId> source_set,
                                  std::vector<NodeId> sink_set, TimeMs start)
{
    RoundPlan plan;
    plan.round_index = round_index;
    plan.source_set = std::move(source_set);
    plan.sink_set = std::move(sink_set);

    plan.phase_times.cleanse = start;
    plan.phase_times.invblock = start + m_config.cleanse_wait_ms + m_config.invblock_wait_ms;
    plan.phase_times.flood_send = plan.phase_times.invblock + m_config.invblock_wait_ms;
    plan.phase_times.parent_send = plan.phase_times.flood_send + m_config.flood_wait_ms;
    plan.phase_times.marker_send = plan.phase_times.parent_send + m_config.parent_wait_ms;
    plan.phase_times.probe = plan.phase_times.marker_send + m_config.marker_wait_ms;

    const Outpoint funding = m_sim.add_funding(1)[0];
    auto conflict_set = build_conflict_set(funding, plan.source_set.size());
    plan.flood = conflict_set.back();

    const bool grind = m_config.marker_grind_fraction > 0.0 && m_config.marker_grind_fraction < 1.0;
    const HashRange range = grind ? HashRange::bottom_fraction(m_config.marker_grind_fraction)
                                  : HashRange::full();
    const auto attempts = grind
                              ? static_cast<uint64_t>(std::ceil(32.0 / m_config.marker_grind_fraction))
                              : uint64_t{1};
    for (size_t i = 0; i < plan.source_set.size(); ++i) {
        Transaction marker = build_marker(conflict_set[i]);
        if (grind) marker = grind_into_range(marker, range, attempts);
        plan.parent_of.emplace(plan.source_set[i], std::move(conflict_set[i]));
        plan.marker_of.emplace(plan.source_set[i], std::move(marker));
    }
    return plan;
}

RoundResult Prober::execute_round(const RoundPlan& plan)
{
    RoundResult result;
    result.audit.round_index = plan.round_index;
    result.audit.source_size = plan.source_set.size();
    result.audit.sink_size = plan.sink_set.size();

    const NodeId observer = m_sim.measurement_node();
    const std::set<NodeId> disconnected_at_start = m_sim.disconnected();

    const TxId flood_id = plan.flood.id();
    std::map<TxId, NodeId> parent_owner;
    std::map<TxId, NodeId> marker_owner;
    std::vector<TxId> marker_ids;
    for (const auto& [node, parent] : plan.parent_of) parent_owner.emplace(parent.id(), node);
    for (const auto& [node, marker] : plan.marker_of) {
        marker_owner.emplace(marker.id(), node);
        marker_ids.push_back(marker.id());
    }

    for (NodeId sink : live_nodes(plan.sink_set)) {
        m_sim.inject(sink, Message::tx_msg(observer, sink, plan.flood), plan.phase_times.flood_send);
    }
    for (NodeId source : live_nodes(plan.source_set)) {
        m_sim.inject(source, Message::tx_msg(observer, source, plan.parent_of.at(source)),
                     plan.phase_times.parent_send);
        m_sim.inject(source, Message::tx_msg(observer, source, plan.marker_of.at(source)),
                     plan.phase_times.marker_send);
    }

    std::vector<Message> captured = m_sim.run_until(plan.phase_times.probe);

    const auto live_sinks = live_nodes(plan.sink_set);
    for (NodeId sink : live_sinks) {
        m_sim.inject(sink, Message::inv(observer, sink, marker_ids), plan.phase_times.probe);
    }
    std::map<NodeId, std::set<TxId>> requested;
    {
        auto probe_captured = m_sim.run_until(plan.phase_times.probe + m_config.probe_settle_ms);
        for (const Message& msg : probe_captured) {
            if (msg.kind == MsgKind::GetData && msg.to == observer) {
                for (const TxId& id : msg.ids) {
                    if (marker_owner.count(id) > 0) requested[msg.from].insert(id);
                }
            }
        }
        captured.insert(captured.end(), probe_captured.begin(), probe_captured.end());
    }
    {
        auto tail = m_sim.run_until(plan.phase_times.cleanse + m_config.round_budget_ms);
        captured.insert(captured.end(), tail.begin(), tail.end());
    }

    // A node that drops off mid-round yields no usable answers: aborted for it.
    for (NodeId n : m_sim.disconnected()) {
        if (disconnected_at_start.count(n) == 0) result.audit.disconnected.insert(n);
    }

    const std::set<NodeId> sources(plan.source_set.begin(), plan.source_set.end());
    std::set<NodeId> parent_acked, marker_acked;
    for (const Message& msg : captured) {
        if (msg.kind != MsgKind::Inv || msg.to != observer) continue;
        for (const TxId& id : msg.ids) {
            if (id == flood_id) {
                if (sources.count(msg.from) > 0) result.audit.flood_at_source.insert(msg.from);
            } else if (auto it = parent_owner.find(id); it != parent_owner.end()) {
                if (it->second == msg.from) parent_acked.insert(msg.from);
                else result.audit.parent_leaks.insert(msg.from);
            } else if (auto it2 = marker_owner.find(id); it2 != marker_owner.end()) {
                if (it2->second == msg.from) marker_acked.insert(msg.from);
            }
        }
    }
    for (NodeId source : plan.source_set) {
        if (result.audit.disconnected.count(source) > 0) continue;
        if (parent_acked.count(source) == 0) result.audit.missed_parent.insert(source);
        if (marker_acked.count(source) == 0) result.audit.missed_marker.insert(source);
    }

    for (NodeId sink : live_sinks) {
        if (result.audit.disconnected.count(sink) > 0) continue;
        std::set<TxId> known;
        const auto it = requested.find(sink);
        for (const TxId& id : marker_ids) {
            if (it == requested.end() || it->second.count(id) == 0) known.insert(id);
        }
        result.marker_known.emplace(sink, std::move(known));
    }
    return result;
}

InferenceResult Prober::full_scan()
{
    InferenceResult result;
    const size_t n = m_sim.node_count();
    std::vector<NodeId> all_nodes(n);
    for (size_t i = 0; i < n; ++i) all_nodes[i] = static_cast<NodeId>(i);

    for (NodeId u : detect_unblockable(all_nodes)) {
        result.excluded_nodes.emplace(u, ExcludeReason::Unblockable);
    }
    for (NodeId u : m_sim.disconnected()) {
        result.excluded_nodes.emplace(u, ExcludeReason::Disconnected);
    }

    std::vector<NodeId> retained;
    for (NodeId u : all_nodes) {
        if (result.excluded_nodes.count(u) == 0) retained.push_back(u);
    }
    const auto partitions = plan_partitions(retained);
    const std::set<NodeId> retained_set(retained.begin(), retained.end());

    const TimeMs scan_base = m_sim.now() + 2'000;
    for (size_t r = 0; r < partitions.size(); ++r) {
        const TimeMs round_start = scan_base + static_cast<TimeMs>(r) * m_config.round_budget_ms;
        m_sim.run_until(round_start);

        const std::set<NodeId> in_source(partitions[r].begin(), partitions[r].end());
        std::vector<NodeId> source_set = live_nodes(partitions[r]);
        std::vector<NodeId> sink_set;
        for (NodeId u : retained) {
            if (in_source.count(u) == 0 && m_sim.disconnected().count(u) == 0) sink_set.push_back(u);
        }
        if (source_set.empty() || sink_set.empty()) {
            RoundAuditRecord skipped;
            skipped.round_index = r;
            skipped.skipped = true;
            result.per_round_log.push_back(std::move(skipped));
            continue;
        }

        RoundPlan plan = make_round_plan(r, std::move(source_set), std::move(sink_set), round_start);
        cleanse_sinks(plan.sink_set);
        m_sim.run_until(plan.phase_times.invblock);

        std::vector<TxId> blocked_ids{plan.flood.id()};
        for (const auto& [node, parent] : plan.parent_of) blocked_ids.push_back(parent.id());
        invblock_all(blocked_ids, all_nodes, round_start + m_config.round_budget_ms);

        RoundResult round = execute_round(plan);

        for (NodeId u : round.audit.disconnected) {
            result.excluded_nodes.emplace(u, ExcludeReason::Disconnected);
        }
        for (NodeId u : round.audit.flood_at_source) {
            result.excluded_nodes.emplace(u, ExcludeReason::Inconsistent);
        }
        for (NodeId u : round.audit.parent_leaks) {
            result.excluded_nodes.emplace(u, ExcludeReason::Inconsistent);
        }
        for (NodeId u : round.audit.missed_parent) {
            result.excluded_nodes.emplace(u, ExcludeReason::Inconsistent);
        }
        for (NodeId u : round.audit.missed_marker) {
            result.excluded_nodes.emplace(u, ExcludeReason::Inconsistent);
        }

        for (NodeId source : plan.source_set) {
            if (round.audit.disconnected.count(source) > 0) continue;
            const TxId marker_id = plan.marker_of.at(source).id();
            for (NodeId sink : plan.sink_set) {
                const auto known = round.marker_known.find(sink);
                if (known == round.marker_known.end()) continue; // aborted for this sink
                const Edge e = make_edge(source, sink);
                ++result.separated_rounds[e];
                if (known->second.count(marker_id) > 0) result.edge_rounds[e].push_back(r);
            }
        }
        result.per_round_log.push_back(std::move(round.audit));
    }

    sanitize(result, m_config.transitory_threshold, n);
    return result;
}

} // namespace txprobe
