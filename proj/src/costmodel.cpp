// Copyright (c) 2026 The txprobe-sim developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <txprobe/costmodel.hpp>

#include <cmath>
#include <stdexcept>

namespace txprobe {

GridShape grid_shape(size_t reachable_nodes)
{
    if (reachable_nodes < 1) throw std::invalid_argument("need at least one node");
    size_t w = static_cast<size_t>(std::ceil(std::sqrt(static_cast<double>(reachable_nodes))));
    // Guard against floating-point undershoot near perfect squares.
    while (w * w < reachable_nodes) ++w;
    while (w > 1 && (w - 1) * (w - 1) >= reachable_nodes) --w;
    w = std::min<size_t>(w, 100);
    const size_t h = (reachable_nodes + w - 1) / w;
    return {w, h};
}

size_t rounds_required(size_t reachable_nodes)
{
    const auto [w, h] = grid_shape(reachable_nodes);
    if (h <= w) return h + w - 2;
    const size_t sets_per_column = (h + w - 1) / w;
    return h - 1 + sets_per_column * w;
}

double scan_duration_minutes(size_t reachable_nodes, double minutes_per_round)
{
    return minutes_per_round * static_cast<double>(rounds_required(reachable_nodes));
}

std::pair<int64_t, int64_t> fee_bounds(size_t reachable_nodes, int64_t fee_rate_sat_per_byte)
{
    if (fee_rate_sat_per_byte < 0) throw std::invalid_argument("negative fee rate");
    const int64_t t_r = static_cast<int64_t>(rounds_required(reachable_nodes));
    const int64_t per_tx = PROBE_TX_SIZE_BYTES * fee_rate_sat_per_byte;
    return {3 * per_tx * t_r, 4 * per_tx * t_r};
}

CostEstimate estimate_cost(size_t reachable_nodes, int64_t fee_rate_sat_per_byte,
                           double minutes_per_round)
{
    const auto [low, high] = fee_bounds(reachable_nodes, fee_rate_sat_per_byte);
    return CostEstimate{rounds_required(reachable_nodes),
                        scan_duration_minutes(reachable_nodes, minutes_per_round), low, high};
}

} // namespace txprobe
