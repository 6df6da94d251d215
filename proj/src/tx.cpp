// Copyright (c) 2026 The txprobe-sim developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <txprobe/tx.hpp>

#include <openssl/sha.h>

#include <algorithm>
#include <cstring>

namespace txprobe {

const char* tx_role_name(TxRole role)
{
    switch (role) {
    case TxRole::Ordinary: return "ordinary";
    case TxRole::Parent: return "parent";
    case TxRole::Marker: return "marker";
    case TxRole::Flood: return "flood";
    case TxRole::Cleanser: return "cleanser";
    case TxRole::Squatter: return "squatter";
    }
    return "?";
}

namespace {

void put_u32(std::vector<unsigned char>& buf, uint32_t v)
{
    for (int i = 0; i < 4; ++i) buf.push_back(static_cast<unsigned char>((v >> (8 * i)) & 0xff));
}

void put_u64(std::vector<unsigned char>& buf, uint64_t v)
{
    for (int i = 0; i < 8; ++i) buf.push_back(static_cast<unsigned char>((v >> (8 * i)) & 0xff));
}

/** Canonical encoding: input count, each (txid, index), output count, nonce.
 * The nonce occupies the last 8 bytes so grinding can patch it in place. */
std::vector<unsigned char> encode(const Transaction& tx)
{
    std::vector<unsigned char> buf;
    buf.reserve(4 + tx.inputs.size() * 36 + 4 + 8);
    put_u32(buf, static_cast<uint32_t>(tx.inputs.size()));
    unsigned char idbytes[32];
    for (const Outpoint& in : tx.inputs) {
        in.txid.to_bytes(idbytes);
        buf.insert(buf.end(), idbytes, idbytes + 32);
        put_u32(buf, in.index);
    }
    put_u32(buf, tx.outputs);
    put_u64(buf, tx.nonce);
    return buf;
}

TxId hash_encoding(const std::vector<unsigned char>& buf)
{
    unsigned char digest[SHA256_DIGEST_LENGTH];
    SHA256(buf.data(), buf.size(), digest);
    return U256::from_bytes(digest);
}

} // namespace

TxId Transaction::id() const
{
    return hash_encoding(encode(*this));
}

bool Transaction::conflicts_with(const Transaction& other) const
{
    for (const Outpoint& a : inputs) {
        for (const Outpoint& b : other.inputs) {
            if (a == b) return true;
        }
    }
    return false;
}

std::vector<Transaction> build_conflict_set(const Outpoint& funding, size_t n)
{
    std::vector<Transaction> txs;
    txs.reserve(n + 1);
    for (size_t i = 0; i <= n; ++i) {
        Transaction tx;
        tx.inputs = {funding};
        tx.outputs = 1;
        tx.nonce = i; // distinct nonces give distinct ids over the shared input
        tx.role = i < n ? TxRole::Parent : TxRole::Flood;
        txs.push_back(std::move(tx));
    }
    return txs;
}

Transaction build_marker(const Transaction& parent)
{
    if (parent.outputs == 0) throw std::invalid_argument("marker parent has no outputs");
    Transaction marker;
    marker.inputs = {parent.outpoint(0)};
    marker.outputs = 1;
    marker.role = TxRole::Marker;
    return marker;
}

CleansingKit build_cleansing_kit(const Outpoint& funding)
{
    CleansingKit kit;
    kit.cleanser.inputs = {funding};
    kit.cleanser.outputs = 1;
    kit.cleanser.role = TxRole::Cleanser;
    const Outpoint spend = kit.cleanser.outpoint(0);
    kit.squatters.reserve(SQUATTER_COUNT);
    for (size_t i = 0; i < SQUATTER_COUNT; ++i) {
        Transaction sq;
        sq.inputs = {spend};
        sq.outputs = 1;
        sq.nonce = i;
        sq.role = TxRole::Squatter;
        kit.squatters.push_back(std::move(sq));
    }
    return kit;
}

Transaction grind_into_range(const Transaction& tx, const HashRange& range, uint64_t max_attempts)
{
    Transaction candidate = tx;
    std::vector<unsigned char> buf = encode(candidate);
    const size_t nonce_off = buf.size() - 8;
    uint64_t nonce = tx.nonce;
    for (uint64_t attempt = 0; attempt < max_attempts; ++attempt, ++nonce) {
        for (int i = 0; i < 8; ++i) buf[nonce_off + i] = static_cast<unsigned char>((nonce >> (8 * i)) & 0xff);
        if (range.contains(hash_encoding(buf))) {
            candidate.nonce = nonce;
            return candidate;
        }
    }
    throw GrindExhaustedError("no nonce found in target range after " + std::to_string(max_attempts) + " attempts");
}

} // namespace txprobe
