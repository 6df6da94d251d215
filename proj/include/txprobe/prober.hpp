// Copyright (c) 2026 The txprobe-sim developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#ifndef TXPROBE_PROBER_HPP
#define TXPROBE_PROBER_HPP

#include <txprobe/costmodel.hpp>
#include <txprobe/rng.hpp>
#include <txprobe/sim.hpp>
#include <txprobe/tx.hpp>

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace txprobe {

struct ProbeConfig {
    uint64_t seed{0};
    /** Gap between the squatter fill and the cleanser send. */
    TimeMs cleanse_wait_ms{5'000};
    /** Gap between the first blocking offers and the flood send. */
    TimeMs invblock_wait_ms{2'000};
    TimeMs flood_wait_ms{10'000};
    TimeMs parent_wait_ms{5'000};
    TimeMs marker_wait_ms{15'000};
    /** How long after the probe announcement replies are collected. */
    TimeMs probe_settle_ms{3'000};
    /** Blocking offers are repeated at this cadence; must stay under the
     * two-minute request timeout. */
    TimeMs invblock_refresh_ms{110'000};
    TimeMs round_budget_ms{150'000};
    /** Keep an edge only if observed in at least this fraction of the rounds
     * that separated its endpoints. */
    double transitory_threshold{1.0};
    /** Squatters are ground into this id-space fraction so pool eviction
     * displaces resident orphans instead of them. <= 0 or >= 1 disables. */
    double squatter_grind_fraction{1.0 / 256.0};
    /** Optional marker grinding (off by default; in simulation sink pools are
     * cleansed and never overflow during a round). */
    double marker_grind_fraction{0.0};
    /** Upper bound on fill-verify iterations per cleanse. */
    int max_cleanse_passes{60};
    /** Delay between the two observers' offers when hunting unblockables. */
    TimeMs unblockable_offer_gap_ms{5'000};
    TimeMs unblockable_settle_ms{3'000};
};

/** One round's bipartition and transaction assignment. */
struct RoundPlan {
    size_t round_index{0};
    std::vector<NodeId> source_set; // ordered; parent i goes to source_set[i]
    std::vector<NodeId> sink_set;
    std::map<NodeId, Transaction> parent_of;
    std::map<NodeId, Transaction> marker_of;
    Transaction flood;
    struct PhaseTimes {
        TimeMs cleanse{0};
        TimeMs invblock{0};
        TimeMs flood_send{0};
        TimeMs parent_send{0};
        TimeMs marker_send{0};
        TimeMs probe{0};
    } phase_times;
};

enum class ExcludeReason : uint8_t { Unblockable, Disconnected, Inconsistent };

const char* exclude_reason_name(ExcludeReason reason);

struct RoundAuditRecord {
    size_t round_index{0};
    size_t source_size{0};
    size_t sink_size{0};
    std::set<NodeId> flood_at_source;  // source nodes that announced the flood
    std::set<NodeId> missed_parent;    // source nodes that never echoed their parent
    std::set<NodeId> missed_marker;
    std::set<NodeId> parent_leaks;     // nodes announcing a parent assigned elsewhere
    std::set<NodeId> disconnected;     // dropped off mid-round; round aborted for them
    bool skipped{false};               // no live source nodes left
};

struct RoundResult {
    /** Per sink node, the round markers it already knew (omitted from its
     * probe reply). */
    std::map<NodeId, std::set<TxId>> marker_known;
    RoundAuditRecord audit;
};

struct InferenceResult {
    std::set<Edge> edges;                            // sanitized edges
    std::map<Edge, std::vector<size_t>> edge_rounds; // raw observations per edge
    std::map<Edge, size_t> separated_rounds;         // rounds that split the pair
    std::map<NodeId, ExcludeReason> excluded_nodes;
    std::set<NodeId> retained;
    std::vector<RoundAuditRecord> per_round_log;
};

/** Grid partition of the node list into source sets: rows then columns of a
 * min(ceil(sqrt(n)), 100)-wide grid, skipping the redundant last row (and
 * last column while columns fit); oversized columns split into ceil(h/w)
 * chunks. Every node pair lands in different sets at least once, and the set
 * count matches rounds_required(). */
std::vector<std::vector<NodeId>> plan_partitions(const std::vector<NodeId>& nodes);

/** Edges implied by one round: (source_i, sink_j) iff source_i's marker was
 * omitted from sink_j's reply. */
std::set<Edge> infer_edges(const std::map<NodeId, std::set<TxId>>& marker_known,
                           const RoundPlan& plan);

/** Drop transitory edges, inconsistent/disconnected nodes and everything
 * incident to an excluded node; idempotent on clean input. */
void sanitize(InferenceResult& result, double transitory_threshold, size_t node_count);

/** precision/recall of `inferred` vs `truth`, both restricted to edges with
 * two retained endpoints. Empty restricted sets count as perfect. */
std::pair<double, double> evaluate_pr(const std::set<Edge>& inferred, const std::set<Edge>& truth,
                                      const std::set<NodeId>& retained);

/** Protocol engine. Drives a Simulation through unblockable detection,
 * per-round pool cleansing, blocking, the send phases and marker probing;
 * the simulation is advanced as a side effect. */
class Prober
{
public:
    Prober(Simulation& sim, ProbeConfig config = {});

    /** Offer a random hash from two observers in one timeout window; nodes
     * answering the second offer ignore the offer queue. */
    std::set<NodeId> detect_unblockable(const std::vector<NodeId>& nodes);

    /** Fill every sink's orphan pool with the squatters (re-offering and
     * re-sending evicted ones until each pool verifiably holds all 100), then
     * release the cleanser. On return every verified well-behaved sink has an
     * empty pool and exactly one squatter in its mempool. */
    void cleanse_sinks(const std::vector<NodeId>& sink_set);

    /** Pin `ids` as pending-from-observer at every target, repeating offers at
     * the configured cadence until `until`. */
    void invblock_all(const std::vector<TxId>& ids, const std::vector<NodeId>& targets,
                      TimeMs until);

    /** Build the transactions and phase schedule for one round starting at
     * `start` (cleansing and blocking occupy the pre-send phases). */
    RoundPlan make_round_plan(size_t round_index, std::vector<NodeId> source_set,
                              std::vector<NodeId> sink_set, TimeMs start);

    /** Run the send phases and the marker probe of a prepared round. Cleansing
     * and blocking must already be scheduled (full_scan does both). */
    RoundResult execute_round(const RoundPlan& plan);

    /** The full protocol: detection, partition planning, one round per source
     * set, edge accumulation, sanitization. */
    InferenceResult full_scan();

private:
    std::vector<NodeId> live_nodes(const std::vector<NodeId>& candidates) const;

    Simulation& m_sim;
    ProbeConfig m_config;
    Rng m_rng;
};

} // namespace txprobe

#endif // TXPROBE_PROBER_HPP
