// Copyright (c) 2026 The txprobe-sim developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <txprobe/sim.hpp>

#include <sstream>
#include <stdexcept>

namespace txprobe {

Simulation::Simulation(const GraphSnapshot& topology, SimConfig config)
    : m_config(config),
      m_latency_rng(Rng::substream(config.seed, "sim-latency")),
      m_trickle_rng(Rng::substream(config.seed, "sim-trickle"))
{
    const size_t n = topology.num_vertices();
    Rng behavior_rng = Rng::substream(config.seed, "sim-behavior");
    m_nodes.reserve(n);
    for (size_t i = 0; i < n; ++i) {
        const NodeBehavior behavior = behavior_rng.chance(config.unblockable_fraction)
                                          ? NodeBehavior::Unblockable
                                          : NodeBehavior::WellBehaved;
        Rng node_rng = Rng::substream(config.seed + 0x9e3779b97f4a7c15ULL * (i + 1), "sim-node");
        m_nodes.emplace_back(static_cast<NodeId>(i), node_rng.next(), behavior,
                             config.orphan_pool_capacity);
    }
    for (const Edge& e : topology.edges()) {
        m_nodes[e.first].add_peer(e.second);
        m_nodes[e.second].add_peer(e.first);
    }
    // Observer endpoints hold a link to every node.
    for (auto& node : m_nodes) {
        node.add_peer(measurement_node());
        node.add_peer(second_observer());
    }
    for (const auto& [at, node] : config.churn) schedule_disconnect(at, node);
}

NodeState& Simulation::node(NodeId id)
{
    if (id >= m_nodes.size()) throw std::out_of_range("node id " + std::to_string(id));
    return m_nodes[id];
}

const NodeState& Simulation::node(NodeId id) const
{
    if (id >= m_nodes.size()) throw std::out_of_range("node id " + std::to_string(id));
    return m_nodes[id];
}

void Simulation::schedule(TimeMs at, Action action)
{
    m_queue.push(Event{at, m_next_seq++, std::move(action)});
}

void Simulation::inject(NodeId to, Message msg, TimeMs at)
{
    if (at < m_now) throw std::invalid_argument("injection time is in the past");
    msg.to = to;
    ++m_counters.scheduled;
    schedule(at + (is_observer(to) ? 0 : m_config.measurement_latency_ms), Deliver{std::move(msg)});
}

void Simulation::schedule_disconnect(TimeMs at, NodeId node)
{
    schedule(at, Disconnect{node});
}

void Simulation::schedule_link_change(TimeMs at, NodeId u, NodeId v, bool add)
{
    schedule(at, LinkChange{u, v, add});
}

std::vector<Outpoint> Simulation::add_funding(uint32_t outputs)
{
    Transaction root;
    root.outputs = outputs;
    root.nonce = m_funding_counter++;
    const TxId id = root.id();
    std::vector<Outpoint> outs;
    outs.reserve(outputs);
    for (uint32_t i = 0; i < outputs; ++i) outs.push_back(Outpoint{id, i});
    for (auto& node : m_nodes) node.add_confirmed(id, outs);
    return outs;
}

bool Simulation::link_up(NodeId a, NodeId b) const
{
    if (is_observer(a) || is_observer(b)) return true;
    return m_nodes[a].has_peer(b);
}

TimeMs Simulation::sample_latency(const Message& msg)
{
    if (is_observer(msg.from) || is_observer(msg.to)) return m_config.measurement_latency_ms;
    TimeMs base;
    switch (m_config.latency.kind) {
    case LatencyModel::Kind::Fixed:
        base = m_config.latency.lo;
        break;
    case LatencyModel::Kind::Uniform:
        base = m_latency_rng.uniform_int(m_config.latency.lo, m_config.latency.hi);
        break;
    default:
        base = m_config.latency.lo;
        break;
    }
    if (msg.kind == MsgKind::Inv && m_config.inv_trickle_max_ms > 0) {
        base += m_trickle_rng.uniform_int(0, m_config.inv_trickle_max_ms);
    }
    return base;
}

void Simulation::route_outbound(std::vector<Message> msgs)
{
    for (Message& msg : msgs) {
        ++m_counters.scheduled;
        schedule(m_now + sample_latency(msg), Deliver{std::move(msg)});
    }
}

void Simulation::ensure_timer(NodeId node_id)
{
    auto deadline = m_nodes[node_id].next_request_deadline();
    if (!deadline) return;
    auto& times = m_timers_scheduled[node_id];
    if (times.insert(*deadline).second) schedule(*deadline, Timer{node_id});
}

void Simulation::trace(TimeMs t, const std::string& kind, NodeId from, NodeId to, const std::string& detail)
{
    std::ostringstream line;
    line << t << ' ' << kind << ' ' << from << ' ' << to << ' ' << detail;
    const std::string s = line.str();
    for (char c : s) {
        m_trace_hash ^= static_cast<unsigned char>(c);
        m_trace_hash *= 0x100000001b3ULL;
    }
    m_trace_hash ^= '\n';
    m_trace_hash *= 0x100000001b3ULL;
    if (m_trace_sink) *m_trace_sink << s << '\n';
}

namespace {

std::string id_list(const std::vector<TxId>& ids)
{
    std::string s;
    for (size_t i = 0; i < ids.size(); ++i) {
        if (i) s += ',';
        s += ids[i].to_hex16();
    }
    return s;
}

} // namespace

void Simulation::deliver(const Message& msg)
{
    if (is_observer(msg.to)) {
        trace(m_now, msg_kind_name(msg.kind), msg.from, msg.to,
              msg.kind == MsgKind::Tx ? msg.tx->id().to_hex16() : id_list(msg.ids));
        ++m_counters.delivered;
        m_captured.push_back(msg);
        return;
    }
    if (msg.to >= m_nodes.size() || m_disconnected.count(msg.to) > 0) {
        trace(m_now, "drop", msg.from, msg.to, "disconnected");
        ++m_counters.dropped_disconnected;
        return;
    }
    if (!link_up(msg.from, msg.to)) {
        trace(m_now, "drop", msg.from, msg.to, "no_link");
        ++m_counters.dropped_no_link;
        return;
    }
    trace(m_now, msg_kind_name(msg.kind), msg.from, msg.to,
          msg.kind == MsgKind::Tx ? msg.tx->id().to_hex16() : id_list(msg.ids));
    ++m_counters.delivered;

    NodeState& node = m_nodes[msg.to];
    std::vector<Message> out;
    switch (msg.kind) {
    case MsgKind::Inv:
        out = node.handle_inv(msg.from, msg.ids, m_now);
        break;
    case MsgKind::GetData:
        out = node.handle_getdata(msg.from, msg.ids);
        break;
    case MsgKind::Tx:
        out = node.handle_tx(msg.from, *msg.tx, m_now).second;
        break;
    }
    route_outbound(std::move(out));
    ensure_timer(msg.to);
}

void Simulation::process(const Event& ev)
{
    if (std::holds_alternative<Deliver>(ev.action)) {
        deliver(std::get<Deliver>(ev.action).msg);
    } else if (std::holds_alternative<Timer>(ev.action)) {
        const NodeId id = std::get<Timer>(ev.action).node;
        ++m_counters.timers;
        m_timers_scheduled[id].erase(ev.time);
        if (m_disconnected.count(id) > 0) return;
        trace(m_now, "timer", id, id, "expire");
        route_outbound(m_nodes[id].expire_requests(m_now));
        ensure_timer(id);
    } else if (std::holds_alternative<Disconnect>(ev.action)) {
        const NodeId id = std::get<Disconnect>(ev.action).node;
        if (id >= m_nodes.size() || !m_disconnected.insert(id).second) return;
        trace(m_now, "disconnect", id, id, "churn");
        for (NodeId peer : m_nodes[id].peers()) {
            if (!is_observer(peer)) m_nodes[peer].remove_peer(id);
        }
    } else {
        const auto& lc = std::get<LinkChange>(ev.action);
        if (lc.u >= m_nodes.size() || lc.v >= m_nodes.size() || lc.u == lc.v) return;
        if (m_disconnected.count(lc.u) > 0 || m_disconnected.count(lc.v) > 0) return;
        trace(m_now, lc.add ? "link_add" : "link_del", lc.u, lc.v, "");
        if (lc.add) {
            m_nodes[lc.u].add_peer(lc.v);
            m_nodes[lc.v].add_peer(lc.u);
        } else {
            m_nodes[lc.u].remove_peer(lc.v);
            m_nodes[lc.v].remove_peer(lc.u);
        }
    }
}

std::vector<Message> Simulation::run_until(TimeMs t)
{
    if (t < m_now) throw std::invalid_argument("run_until target is in the past");
    while (!m_queue.empty() && m_queue.top().time <= t) {
        Event ev = m_queue.top();
        m_queue.pop();
        m_now = ev.time;
        process(ev);
    }
    m_now = t;
    std::vector<Message> captured = std::move(m_captured);
    m_captured.clear();
    return captured;
}

} // namespace txprobe
