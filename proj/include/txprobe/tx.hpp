// Copyright (c) 2026 The txprobe-sim developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#ifndef TXPROBE_TX_HPP
#define TXPROBE_TX_HPP

#include <txprobe/u256.hpp>

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace txprobe {

using TxId = U256;

/** One output of one transaction; the unit a transaction spends. */
struct Outpoint {
    TxId txid;
    uint32_t index{0};

    friend bool operator==(const Outpoint&, const Outpoint&) = default;
    friend std::strong_ordering operator<=>(const Outpoint&, const Outpoint&) = default;
};

/** Probe-protocol role a transaction was created for. Not part of the id. */
enum class TxRole : uint8_t {
    Ordinary,
    Parent,
    Marker,
    Flood,
    Cleanser,
    Squatter,
};

const char* tx_role_name(TxRole role);

/** Abstract transaction: spendable inputs, a count of created outputs, and a
 * nonce that perturbs the id without touching conflict relations. There is no
 * script or signature machinery; the relay and probing logic only depend on
 * conflicts, parent-child links, and the 256-bit id. */
struct Transaction {
    std::vector<Outpoint> inputs;
    uint32_t outputs{0};
    uint64_t nonce{0};
    TxRole role{TxRole::Ordinary};

    /** Content hash over (inputs, outputs, nonce) in a canonical byte order.
     * Pure: role does not contribute. */
    TxId id() const;

    /** Two transactions conflict iff their input sets intersect. */
    bool conflicts_with(const Transaction& other) const;

    Outpoint outpoint(uint32_t index) const { return Outpoint{id(), index}; }
};

/** Inclusive id interval; the grinding target. */
struct HashRange {
    U256 lo;
    U256 hi;

    static HashRange full() { return {U256::zero(), U256::max()}; }

    /** Bottom slice of the hash space covering the given density. */
    static HashRange bottom_fraction(double fraction)
    {
        return {U256::zero(), U256::fraction_of_range(fraction)};
    }

    bool contains(const U256& v) const { return lo <= v && v <= hi; }

    /** width / 2^256. */
    double fraction() const { return (hi - lo).as_unit_fraction(); }
};

struct GrindExhaustedError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/** The cleanser plus its 100 mutually conflicting children. */
struct CleansingKit {
    Transaction cleanser;
    std::vector<Transaction> squatters;
};

inline constexpr size_t SQUATTER_COUNT = 100;

/** n parent transactions plus the flood transaction, all spending `funding`
 * and therefore pairwise conflicting. The flood is the last element. */
std::vector<Transaction> build_conflict_set(const Outpoint& funding, size_t n);

/** Child spending output 0 of `parent`. Throws std::invalid_argument if the
 * parent creates no outputs. */
Transaction build_marker(const Transaction& parent);

CleansingKit build_cleansing_kit(const Outpoint& funding);

/** Search nonces (starting from tx.nonce) until the id lands in `range`.
 * Inputs and outputs are untouched, so conflict relations are preserved.
 * Throws GrindExhaustedError after max_attempts misses. */
Transaction grind_into_range(const Transaction& tx, const HashRange& range, uint64_t max_attempts);

} // namespace txprobe

#endif // TXPROBE_TX_HPP
