// Copyright (c) 2026 The txprobe-sim developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#ifndef TXPROBE_SCENARIO_HPP
#define TXPROBE_SCENARIO_HPP

#include <txprobe/graph.hpp>
#include <txprobe/graphio.hpp>
#include <txprobe/prober.hpp>
#include <txprobe/sim.hpp>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace txprobe {

inline constexpr const char* TXPROBE_VERSION = "1.0.0";
inline constexpr int OUTPUT_SCHEMA_VERSION = 1;

/** Raised for malformed or unknown configuration; maps to exit code 2. */
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct TopologySpec {
    enum class Model : uint8_t { ER, CM, BA, File };
    Model model{Model::ER};
    size_t n{0};
    size_t m{0};
    std::vector<size_t> degrees; // CM
    std::string path;            // File
};

struct OutputSpec {
    std::string dir{"out"};
    std::vector<GraphFormat> formats{GraphFormat::EdgeList, GraphFormat::GraphML};
};

struct ScenarioConfig {
    TopologySpec topology;
    SimConfig sim;
    ProbeConfig probe;
    OutputSpec output;
};

/** Parse and validate a scenario config; unknown keys are errors. */
ScenarioConfig parse_scenario_json(const std::string& text);
ScenarioConfig load_scenario(const std::string& path);

/** Canonical JSON rendering of the effective config (stable key order). */
std::string scenario_to_json(const ScenarioConfig& config);

GraphSnapshot build_topology(const TopologySpec& spec, uint64_t seed);

struct ScanOutcome {
    GraphSnapshot truth;
    GraphSnapshot inferred;
    InferenceResult result;
    double precision{0.0};
    double recall{0.0};
};

/** Build the topology and simulation, run the full protocol, and evaluate the
 * inferred edges against ground truth over the retained nodes. When
 * trace_path is set the full simulator trace is streamed there. */
ScanOutcome run_scan(const ScenarioConfig& config,
                     const std::optional<std::string>& trace_path = std::nullopt);

/** Write ground truth, inferred graph, summary.json, audit.log and
 * manifest.json into `dir` (created if needed). Outputs are byte-stable for
 * equal configs and seeds. */
void write_scan_outputs(const ScanOutcome& outcome, const ScenarioConfig& config,
                        const std::string& dir);

std::string sha256_hex(const std::string& data);

} // namespace txprobe

#endif // TXPROBE_SCENARIO_HPP
