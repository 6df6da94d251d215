// Copyright (c) 2026 The txprobe-sim developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#ifndef TXPROBE_GRAPHGEN_HPP
#define TXPROBE_GRAPHGEN_HPP

#include <txprobe/graph.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace txprobe {

/** Erdős–Rényi G(n, m): exactly m edges sampled uniformly without
 * replacement. Throws for infeasible m. */
GraphSnapshot gen_er(size_t n, size_t m, uint64_t seed);

/** Configuration model realized as a simple graph whose degree sequence
 * equals the input exactly: stub matching with retries, then local edge-swap
 * repair of any leftover self-loops/duplicates. Throws for odd-sum or
 * non-graphical sequences (Erdős–Gallai). */
GraphSnapshot gen_cm(const std::vector<size_t>& degree_sequence, uint64_t seed);

/** Barabási–Albert preferential attachment. Per-arrival attachment counts mix
 * k and k+1 so the final edge count lands on target_m exactly when feasible.
 * Throws when target_m cannot be realized for n vertices. */
GraphSnapshot gen_ba(size_t n, size_t target_m, uint64_t seed);

bool is_graphical(std::vector<size_t> degree_sequence);

struct RegionDist {
    std::vector<std::string> names{"us", "europe", "east-asia", "latam", "other"};
    std::vector<double> weights{0.35, 0.25, 0.2, 0.1, 0.1};
};

/** Seeded categorical region labels, so attribute assortativity has something
 * to measure on synthetic graphs. */
void assign_regions(GraphSnapshot& g, uint64_t seed, const RegionDist& dist = {});

} // namespace txprobe

#endif // TXPROBE_GRAPHGEN_HPP
