// Copyright (c) 2026 The txprobe-sim developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <txprobe/node.hpp>

#include <algorithm>
#include <cassert>

namespace txprobe {

const char* msg_kind_name(MsgKind kind)
{
    switch (kind) {
    case MsgKind::Inv: return "inv";
    case MsgKind::GetData: return "getdata";
    case MsgKind::Tx: return "tx";
    }
    return "?";
}

const char* tx_status_name(TxStatus status)
{
    switch (status) {
    case TxStatus::Accepted: return "accepted";
    case TxStatus::Orphaned: return "orphaned";
    case TxStatus::RejectedConflict: return "rejected_conflict";
    case TxStatus::Duplicate: return "duplicate";
    }
    return "?";
}

NodeState::NodeState(NodeId id, uint64_t rng_seed, NodeBehavior behavior, size_t orphan_capacity)
    : m_id(id), m_behavior(behavior), m_orphan_capacity(orphan_capacity), m_rng(rng_seed)
{
}

void NodeState::add_confirmed(const TxId& txid, const std::vector<Outpoint>& outputs)
{
    m_confirmed.insert(txid);
    for (const Outpoint& op : outputs) m_utxo.insert(op);
}

bool NodeState::is_known(const TxId& id) const
{
    return m_mempool.count(id) > 0 || m_orphans.count(id) > 0 || m_confirmed.count(id) > 0;
}

std::optional<NodeId> NodeState::pending_peer(const TxId& id) const
{
    auto it = m_pending.find(id);
    if (it == m_pending.end()) return std::nullopt;
    return it->second.current;
}

size_t NodeState::pending_queue_length(const TxId& id) const
{
    auto it = m_pending.find(id);
    return it == m_pending.end() ? 0 : it->second.queue.size();
}

std::optional<TimeMs> NodeState::next_request_deadline() const
{
    std::optional<TimeMs> earliest;
    for (const auto& [id, req] : m_pending) {
        if (!earliest || req.deadline < *earliest) earliest = req.deadline;
    }
    return earliest;
}

std::vector<Message> NodeState::handle_inv(NodeId from, const std::vector<TxId>& ids, TimeMs now)
{
    if (!has_peer(from)) {
        ++m_dropped_unknown_peer;
        return {};
    }
    std::vector<TxId> wanted;
    for (const TxId& id : ids) {
        if (is_known(id)) continue;
        auto it = m_pending.find(id);
        if (it == m_pending.end()) {
            m_pending.emplace(id, PendingRequest{from, now + REQUEST_TIMEOUT_MS, {}});
            wanted.push_back(id);
        } else if (it->second.current == from) {
            // Re-offer from the peer we are already waiting on: request again
            // with a fresh deadline. The offer queue keeps its order.
            it->second.deadline = now + REQUEST_TIMEOUT_MS;
            wanted.push_back(id);
        } else if (m_behavior == NodeBehavior::Unblockable) {
            it->second.current = from;
            it->second.deadline = now + REQUEST_TIMEOUT_MS;
            wanted.push_back(id);
        } else {
            it->second.queue.emplace_back(from, now);
        }
    }
    if (wanted.empty()) return {};
    return {Message::getdata(m_id, from, std::move(wanted))};
}

std::vector<Message> NodeState::handle_getdata(NodeId from, const std::vector<TxId>& ids)
{
    if (!has_peer(from)) {
        ++m_dropped_unknown_peer;
        return {};
    }
    std::vector<Message> out;
    for (const TxId& id : ids) {
        auto it = m_mempool.find(id);
        if (it != m_mempool.end()) out.push_back(Message::tx_msg(m_id, from, it->second));
    }
    return out;
}

NodeState::Validity NodeState::classify(const Transaction& tx) const
{
    bool missing_parent = false;
    for (const Outpoint& in : tx.inputs) {
        if (m_utxo.count(in) > 0) continue;
        if (m_spent.count(in) > 0) return Validity::Conflict;
        if (m_mempool.count(in.txid) > 0 || m_confirmed.count(in.txid) > 0) {
            // Source transaction known but the output neither spendable nor
            // spent: the outpoint does not exist.
            return Validity::Conflict;
        }
        missing_parent = true;
    }
    return missing_parent ? Validity::Orphan : Validity::Valid;
}

std::vector<Message> NodeState::accept_to_mempool(const Transaction& tx, std::optional<NodeId> skip_peer)
{
    const TxId id = tx.id();
    for (const Outpoint& in : tx.inputs) {
        m_utxo.erase(in);
        m_spent.insert(in);
    }
    for (uint32_t i = 0; i < tx.outputs; ++i) m_utxo.insert(Outpoint{id, i});
    m_mempool.emplace(id, tx);

    std::vector<Message> out;
    for (NodeId peer : m_peers) {
        if (skip_peer && peer == *skip_peer) continue;
        out.push_back(Message::inv(m_id, peer, {id}));
    }
    return out;
}

std::vector<Message> NodeState::promote_orphans(const Transaction& accepted)
{
    std::vector<Message> out;
    std::deque<Transaction> work{accepted};
    while (!work.empty()) {
        const Transaction parent = std::move(work.front());
        work.pop_front();
        const TxId parent_id = parent.id();

        // Collect orphans spending any output of the newly accepted tx, in id
        // order for determinism.
        std::vector<TxId> candidates;
        for (const auto& [oid, orphan] : m_orphans) {
            for (const Outpoint& in : orphan.inputs) {
                if (in.txid == parent_id) {
                    candidates.push_back(oid);
                    break;
                }
            }
        }
        for (const TxId& oid : candidates) {
            auto it = m_orphans.find(oid);
            if (it == m_orphans.end()) continue;
            const Transaction orphan = it->second;
            switch (classify(orphan)) {
            case Validity::Valid: {
                m_orphans.erase(it);
                auto msgs = accept_to_mempool(orphan, std::nullopt);
                out.insert(out.end(), msgs.begin(), msgs.end());
                work.push_back(orphan);
                break;
            }
            case Validity::Conflict:
                m_orphans.erase(it);
                break;
            case Validity::Orphan:
                break; // still waiting on another ancestor
            }
        }
    }
    return out;
}

std::pair<TxStatus, std::vector<Message>> NodeState::handle_tx(NodeId from, const Transaction& tx, TimeMs now)
{
    (void)now;
    const TxId id = tx.id();
    m_pending.erase(id);

    if (is_known(id)) return {TxStatus::Duplicate, {}};

    switch (classify(tx)) {
    case Validity::Conflict:
        return {TxStatus::RejectedConflict, {}};
    case Validity::Orphan: {
        m_orphans.emplace(id, tx);
        limit_orphans();
        return {TxStatus::Orphaned, {}};
    }
    case Validity::Valid:
        break;
    }

    std::vector<Message> out = accept_to_mempool(tx, from);
    auto promoted = promote_orphans(tx);
    out.insert(out.end(), promoted.begin(), promoted.end());
    return {TxStatus::Accepted, std::move(out)};
}

std::vector<Message> NodeState::expire_requests(TimeMs now)
{
    std::vector<Message> out;
    for (auto it = m_pending.begin(); it != m_pending.end();) {
        PendingRequest& req = it->second;
        if (req.deadline > now) {
            ++it;
            continue;
        }
        if (req.queue.empty()) {
            it = m_pending.erase(it);
            continue;
        }
        auto [next_peer, offer_time] = req.queue.front();
        req.queue.pop_front();
        req.current = next_peer;
        req.deadline = now + REQUEST_TIMEOUT_MS;
        out.push_back(Message::getdata(m_id, next_peer, {it->first}));
        ++it;
    }
    return out;
}

size_t NodeState::limit_orphans()
{
    size_t evicted = 0;
    while (m_orphans.size() > m_orphan_capacity) {
        const U256 randomhash = m_rng.rand256();
        auto it = m_orphans.lower_bound(randomhash);
        if (it == m_orphans.end()) it = m_orphans.begin();
        m_orphans.erase(it);
        ++evicted;
    }
    return evicted;
}

size_t NodeState::force_orphan(const Transaction& tx)
{
    m_orphans.emplace(tx.id(), tx);
    return limit_orphans();
}

} // namespace txprobe
