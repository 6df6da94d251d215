// Copyright (c) 2026 The txprobe-sim developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#ifndef TXPROBE_NODE_HPP
#define TXPROBE_NODE_HPP

#include <txprobe/graph.hpp>
#include <txprobe/rng.hpp>
#include <txprobe/tx.hpp>

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <utility>
#include <vector>

namespace txprobe {

using TimeMs = int64_t;

/** How long a node waits for an offered item before asking the next peer. */
inline constexpr TimeMs REQUEST_TIMEOUT_MS = 120'000;
inline constexpr size_t DEFAULT_ORPHAN_POOL_CAPACITY = 100;

enum class MsgKind : uint8_t { Inv, GetData, Tx };

const char* msg_kind_name(MsgKind kind);

/** One relay message. inv/getdata carry ids; tx carries a single transaction. */
struct Message {
    MsgKind kind{MsgKind::Inv};
    NodeId from{0};
    NodeId to{0};
    std::vector<TxId> ids;
    std::optional<Transaction> tx;

    static Message inv(NodeId from, NodeId to, std::vector<TxId> ids)
    {
        return Message{MsgKind::Inv, from, to, std::move(ids), std::nullopt};
    }
    static Message getdata(NodeId from, NodeId to, std::vector<TxId> ids)
    {
        return Message{MsgKind::GetData, from, to, std::move(ids), std::nullopt};
    }
    static Message tx_msg(NodeId from, NodeId to, Transaction tx)
    {
        return Message{MsgKind::Tx, from, to, {}, std::move(tx)};
    }
};

enum class NodeBehavior : uint8_t {
    WellBehaved,
    /** Requests every announced item even while a request is pending,
     * defeating the offer queue. Detected and excluded before a scan. */
    Unblockable,
};

enum class TxStatus : uint8_t { Accepted, Orphaned, RejectedConflict, Duplicate };

const char* tx_status_name(TxStatus status);

/** State machine for one relay peer: the three-step announce/request/deliver
 * protocol, double-spend rejection against mempool and spent outputs, a
 * bounded orphan pool with random-hash eviction, and per-id offer queues with
 * the two-minute request timeout. */
class NodeState
{
public:
    NodeState(NodeId id, uint64_t rng_seed,
              NodeBehavior behavior = NodeBehavior::WellBehaved,
              size_t orphan_capacity = DEFAULT_ORPHAN_POOL_CAPACITY);

    NodeId node_id() const { return m_id; }
    NodeBehavior behavior() const { return m_behavior; }

    void add_peer(NodeId peer) { m_peers.insert(peer); }
    void remove_peer(NodeId peer) { m_peers.erase(peer); }
    bool has_peer(NodeId peer) const { return m_peers.count(peer) > 0; }
    const std::set<NodeId>& peers() const { return m_peers; }

    /** Register a confirmed funding root whose outputs every node may spend. */
    void add_confirmed(const TxId& txid, const std::vector<Outpoint>& outputs);

    /** Process an announcement. Emits at most one getdata back to `from` with
     * the ids that are neither known nor pending; ids pending from another
     * peer are queued FIFO behind the outstanding request; a re-offer from the
     * peer currently being waited on refreshes its deadline. Announcements
     * from unknown peers are dropped (counted). */
    std::vector<Message> handle_inv(NodeId from, const std::vector<TxId>& ids, TimeMs now);

    /** Serve mempool transactions; ids held only as orphans are ignored. */
    std::vector<Message> handle_getdata(NodeId from, const std::vector<TxId>& ids);

    /** Validate and store a delivered transaction. Accepted transactions are
     * announced to every peer except the sender, and any orphans they satisfy
     * are re-evaluated recursively. Orphans are stored without relaying. */
    std::pair<TxStatus, std::vector<Message>> handle_tx(NodeId from, const Transaction& tx, TimeMs now);

    /** Retire pending requests whose deadline passed: ask the next queued
     * offerer (fresh deadline) or drop the entry when the queue is empty. */
    std::vector<Message> expire_requests(TimeMs now);

    /** Evict until the orphan pool is back within capacity: draw a uniform
     * 256-bit point and remove the entry with the smallest id at or above it,
     * wrapping to the pool minimum. Returns the number of evictions. */
    size_t limit_orphans();

    bool is_known(const TxId& id) const;
    bool in_mempool(const TxId& id) const { return m_mempool.count(id) > 0; }
    bool in_orphan_pool(const TxId& id) const { return m_orphans.count(id) > 0; }
    bool is_pending(const TxId& id) const { return m_pending.count(id) > 0; }
    std::optional<NodeId> pending_peer(const TxId& id) const;
    size_t pending_queue_length(const TxId& id) const;

    const std::map<TxId, Transaction>& mempool() const { return m_mempool; }
    const std::map<TxId, Transaction>& orphan_pool() const { return m_orphans; }
    const std::set<Outpoint>& utxo_view() const { return m_utxo; }
    size_t orphan_capacity() const { return m_orphan_capacity; }

    /** Earliest pending deadline, for timer scheduling. */
    std::optional<TimeMs> next_request_deadline() const;

    uint64_t dropped_unknown_peer() const { return m_dropped_unknown_peer; }

    /** Test hook: store an orphan directly (still applies the pool limit). */
    size_t force_orphan(const Transaction& tx);

private:
    struct PendingRequest {
        NodeId current;
        TimeMs deadline;
        std::deque<std::pair<NodeId, TimeMs>> queue;
    };

    enum class Validity { Valid, Conflict, Orphan };
    Validity classify(const Transaction& tx) const;

    /** Move a validated transaction into the mempool and announce it. */
    std::vector<Message> accept_to_mempool(const Transaction& tx, std::optional<NodeId> skip_peer);

    /** Re-evaluate orphans whose inputs a newly accepted tx may satisfy. */
    std::vector<Message> promote_orphans(const Transaction& accepted);

    NodeId m_id;
    NodeBehavior m_behavior;
    size_t m_orphan_capacity;
    Rng m_rng;

    std::map<TxId, Transaction> m_mempool;
    std::map<TxId, Transaction> m_orphans;
    std::set<Outpoint> m_utxo;
    std::set<Outpoint> m_spent; // consumed by mempool or confirmed transactions
    std::set<TxId> m_confirmed;
    std::map<TxId, PendingRequest> m_pending;
    std::set<NodeId> m_peers;

    uint64_t m_dropped_unknown_peer{0};
};

} // namespace txprobe

#endif // TXPROBE_NODE_HPP
