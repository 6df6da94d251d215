// Copyright (c) 2026 The txprobe-sim developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#ifndef TXPROBE_METRICS_HPP
#define TXPROBE_METRICS_HPP

#include <txprobe/graph.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace txprobe {

/** Eccentricity-based metrics. Computed on the largest component when the
 * graph is disconnected (flagged via `connected`/`component_size`). */
struct DistanceMetrics {
    size_t diameter{0};
    size_t radius{0};
    size_t center_size{0};    // nodes with eccentricity == radius
    size_t periphery_size{0}; // nodes with eccentricity == diameter
    double mean_eccentricity{0.0};
    bool connected{true};
    size_t component_size{0};
};

struct ClusteringMetrics {
    double avg_clustering{0.0};
    double transitivity{0.0};
};

struct CliqueResult {
    size_t size{0};
    bool exact{true};
};

struct CommunityResult {
    std::vector<uint32_t> community; // per-vertex community id, 0-based dense
    size_t count{0};
    double modularity{0.0};
};

struct DegreeDistribution {
    std::map<size_t, size_t> histogram;
    size_t mode{0}; // smallest degree on ties
    size_t max{0};
    double mean{0.0};
};

struct MetricsOptions {
    uint64_t seed{0};
    int64_t clique_budget_ms{60'000};
};

struct MetricsReport {
    DistanceMetrics distance;
    ClusteringMetrics clustering;
    std::optional<double> degree_assortativity;    // undefined when variance is zero
    std::optional<double> attribute_assortativity; // undefined without mixed labels
    CliqueResult clique;
    CommunityResult communities;
    DegreeDistribution degrees;
};

std::vector<std::vector<NodeId>> connected_components(const GraphSnapshot& g);

DistanceMetrics distance_metrics(const GraphSnapshot& g);
ClusteringMetrics clustering_metrics(const GraphSnapshot& g);

/** Pearson correlation of degrees across edge endpoints. */
std::optional<double> degree_assortativity(const GraphSnapshot& g);

/** Categorical mixing assortativity over the vertex region labels. */
std::optional<double> attribute_assortativity(const GraphSnapshot& g);

/** Exact maximum clique via branch-and-bound with greedy coloring bounds;
 * falls back to the best clique found when the time budget runs out. */
CliqueResult clique_number(const GraphSnapshot& g, int64_t budget_ms = 60'000);

/** Louvain: seeded visit order, gain ties broken by smallest community id,
 * aggregation until no further modularity gain. */
CommunityResult communities(const GraphSnapshot& g, uint64_t seed);

/** Newman modularity of an arbitrary partition of g. */
double modularity(const GraphSnapshot& g, const std::vector<uint32_t>& community);

DegreeDistribution degree_distribution(const GraphSnapshot& g);

MetricsReport compute_metrics(const GraphSnapshot& g, const MetricsOptions& options = {});

/** The eleven comparison rows in report order. Undefined values surface as
 * quiet NaN. */
std::vector<std::pair<std::string, double>> metric_rows(const MetricsReport& report);

enum class GraphModel : uint8_t { ER, CM, BA };

const char* graph_model_name(GraphModel model);
GraphModel graph_model_from_name(const std::string& name);

struct EnsembleEntry {
    std::string metric;
    double observed{0.0};
    double mean{0.0};
    double percent_higher{0.0}; // % of runs where the random value is strictly higher
    size_t defined_runs{0};
};

struct EnsembleComparison {
    size_t runs{0};
    std::map<GraphModel, std::vector<EnsembleEntry>> per_model;
};

/** Generate `runs` random graphs resembling g per model (ER: same n and m;
 * CM: same degree sequence; BA: same n, edge count matched), compute every
 * metric, and report the ensemble mean and the share of runs exceeding the
 * observed value. */
EnsembleComparison ensemble_compare(const GraphSnapshot& g, const std::vector<GraphModel>& models,
                                    size_t runs, uint64_t seed, const MetricsOptions& options = {});

/** Text table with one metric per row and "mean (pct%)" ensemble cells. */
std::string format_ensemble_table(const MetricsReport& observed, const EnsembleComparison& cmp);

} // namespace txprobe

#endif // TXPROBE_METRICS_HPP
