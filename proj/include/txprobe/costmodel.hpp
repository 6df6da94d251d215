// Copyright (c) 2026 The txprobe-sim developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#ifndef TXPROBE_COSTMODEL_HPP
#define TXPROBE_COSTMODEL_HPP

#include <cstdint>
#include <utility>

namespace txprobe {

/** Size of a 1-input 1-output P2PKH transaction with a compressed key and a
 * maximum-length signature; the unit the fee bounds are quoted in. */
inline constexpr int64_t PROBE_TX_SIZE_BYTES = 193;

/** Grid dimensions the partition planner uses for r_n reachable nodes. */
struct GridShape {
    size_t width;
    size_t height;
};

GridShape grid_shape(size_t reachable_nodes);

/** Number of scan rounds (= number of distinct source sets) for a network of
 * the given size: h + w - 2 when h <= w, else h - 1 + ceil(h/w) * w. */
size_t rounds_required(size_t reachable_nodes);

/** Wall-clock estimate in minutes. */
double scan_duration_minutes(size_t reachable_nodes, double minutes_per_round = 2.5);

/** Fee range in satoshi: per round, the cleansing pair always confirms and
 * either the flood or a parent+marker pair does, so the total lies between 3
 * and 4 standard transactions per round. */
std::pair<int64_t, int64_t> fee_bounds(size_t reachable_nodes, int64_t fee_rate_sat_per_byte);

struct CostEstimate {
    size_t rounds;
    double duration_minutes;
    int64_t fee_low_sat;
    int64_t fee_high_sat;
    int64_t tx_size_bytes{PROBE_TX_SIZE_BYTES};
};

CostEstimate estimate_cost(size_t reachable_nodes, int64_t fee_rate_sat_per_byte,
                           double minutes_per_round = 2.5);

} // namespace txprobe

#endif // TXPROBE_COSTMODEL_HPP
