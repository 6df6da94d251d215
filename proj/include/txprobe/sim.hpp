// Copyright (c) 2026 The txprobe-sim developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#ifndef TXPROBE_SIM_HPP
#define TXPROBE_SIM_HPP

#include <txprobe/graph.hpp>
#include <txprobe/node.hpp>
#include <txprobe/rng.hpp>
#include <txprobe/tx.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <queue>
#include <set>
#include <string>
#include <variant>
#include <vector>

namespace txprobe {

struct LatencyModel {
    enum class Kind : uint8_t { Fixed, Uniform };
    Kind kind{Kind::Uniform};
    TimeMs lo{50};
    TimeMs hi{150};

    static LatencyModel fixed(TimeMs ms) { return {Kind::Fixed, ms, ms}; }
    static LatencyModel uniform(TimeMs lo, TimeMs hi) { return {Kind::Uniform, lo, hi}; }
};

struct SimConfig {
    uint64_t seed{0};
    LatencyModel latency{};
    /** Probability that a node ignores the offer queue (drawn per node). */
    double unblockable_fraction{0.0};
    /** Scheduled (time, node) disconnects. */
    std::vector<std::pair<TimeMs, NodeId>> churn;
    /** Optional per-inv delay: each announcement from a real node is delayed
     * by an extra uniform draw from [0, inv_trickle_max_ms]. */
    TimeMs inv_trickle_max_ms{0};
    /** Latency on links between the observer endpoints and the nodes. */
    TimeMs measurement_latency_ms{0};
    size_t orphan_pool_capacity{DEFAULT_ORPHAN_POOL_CAPACITY};
};

/** Deterministic discrete-event simulator. One NodeState per topology vertex;
 * two observer endpoints (outside the topology, never part of metrics or
 * inference) hold a link to every node: the primary measurement endpoint and
 * a second observer used when hunting unblockable nodes. Events are processed
 * in strict (time, insertion-sequence) order, so equal configurations yield
 * bit-identical traces. */
class Simulation
{
public:
    Simulation(const GraphSnapshot& topology, SimConfig config);

    size_t node_count() const { return m_nodes.size(); }
    NodeId measurement_node() const { return static_cast<NodeId>(m_nodes.size()); }
    NodeId second_observer() const { return static_cast<NodeId>(m_nodes.size() + 1); }
    bool is_observer(NodeId id) const { return id >= m_nodes.size(); }

    TimeMs now() const { return m_now; }

    /** Queue a message for delivery at `at` (>= now; throws on past times). */
    void inject(NodeId to, Message msg, TimeMs at);

    /** Process every event with time <= t and advance the clock to t. Returns
     * the messages delivered to the observer endpoints since the last call,
     * in delivery order. */
    std::vector<Message> run_until(TimeMs t);

    void schedule_disconnect(TimeMs at, NodeId node);
    void schedule_link_change(TimeMs at, NodeId u, NodeId v, bool add);

    /** Create a confirmed funding root with the given number of outputs and
     * credit it to every node's UTXO view. Returns the spendable outpoints. */
    std::vector<Outpoint> add_funding(uint32_t outputs);

    NodeState& node(NodeId id);
    const NodeState& node(NodeId id) const;
    const std::set<NodeId>& disconnected() const { return m_disconnected; }

    struct Counters {
        uint64_t scheduled{0};
        uint64_t delivered{0};
        uint64_t dropped_disconnected{0};
        uint64_t dropped_no_link{0};
        uint64_t timers{0};

        uint64_t accounted() const
        {
            return delivered + dropped_disconnected + dropped_no_link;
        }
    };
    const Counters& counters() const { return m_counters; }

    /** FNV-1a hash over every processed trace line; equal traces hash equal. */
    uint64_t trace_hash() const { return m_trace_hash; }

    /** Optional line-delimited trace sink. Fields, space-separated:
     * time kind from to detail — detail is a comma-joined id prefix list for
     * inv/getdata, a single id prefix for tx, or a drop/timer annotation. */
    void set_trace_sink(std::ostream* sink) { m_trace_sink = sink; }

private:
    struct Deliver {
        Message msg;
    };
    struct Timer {
        NodeId node;
    };
    struct Disconnect {
        NodeId node;
    };
    struct LinkChange {
        NodeId u, v;
        bool add;
    };
    using Action = std::variant<Deliver, Timer, Disconnect, LinkChange>;

    struct Event {
        TimeMs time;
        uint64_t seq;
        Action action;
    };
    struct EventAfter {
        bool operator()(const Event& a, const Event& b) const
        {
            if (a.time != b.time) return a.time > b.time;
            return a.seq > b.seq;
        }
    };

    void schedule(TimeMs at, Action action);
    void process(const Event& ev);
    void deliver(const Message& msg);
    void route_outbound(std::vector<Message> msgs);
    void ensure_timer(NodeId node);
    TimeMs sample_latency(const Message& msg);
    void trace(TimeMs t, const std::string& kind, NodeId from, NodeId to, const std::string& detail);
    bool link_up(NodeId a, NodeId b) const;

    SimConfig m_config;
    std::vector<NodeState> m_nodes;
    std::set<NodeId> m_disconnected;
    std::priority_queue<Event, std::vector<Event>, EventAfter> m_queue;
    uint64_t m_next_seq{0};
    TimeMs m_now{0};
    Rng m_latency_rng;
    Rng m_trickle_rng;
    std::vector<Message> m_captured;
    std::map<NodeId, std::set<TimeMs>> m_timers_scheduled;
    uint64_t m_funding_counter{0};
    Counters m_counters;
    uint64_t m_trace_hash{0xcbf29ce484222325ULL};
    std::ostream* m_trace_sink{nullptr};
};

} // namespace txprobe

#endif // TXPROBE_SIM_HPP
