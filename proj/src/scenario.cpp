// Copyright (c) 2026 The txprobe-sim developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <txprobe/scenario.hpp>

#include <txprobe/graphgen.hpp>

#include <json.hpp>
#include <openssl/sha.h>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace txprobe {

using nlohmann::json;

namespace {

void require_keys(const json& obj, const std::string& where,
                  std::initializer_list<const char*> allowed)
{
    for (const auto& [key, value] : obj.items()) {
        bool ok = false;
        for (const char* a : allowed) {
            if (key == a) {
                ok = true;
                break;
            }
        }
        if (!ok) throw ConfigError("unknown key '" + key + "' in " + where);
    }
}

TopologySpec parse_topology(const json& obj)
{
    if (!obj.is_object()) throw ConfigError("topology must be an object");
    require_keys(obj, "topology", {"model", "n", "m", "degrees", "path"});
    if (!obj.contains("model")) throw ConfigError("topology.model is required");
    const std::string model = obj.at("model").get<std::string>();
    TopologySpec spec;
    if (model == "er") spec.model = TopologySpec::Model::ER;
    else if (model == "cm") spec.model = TopologySpec::Model::CM;
    else if (model == "ba") spec.model = TopologySpec::Model::BA;
    else if (model == "file") spec.model = TopologySpec::Model::File;
    else throw ConfigError("unknown topology model '" + model + "'");

    switch (spec.model) {
    case TopologySpec::Model::ER:
    case TopologySpec::Model::BA:
        if (!obj.contains("n") || !obj.contains("m")) {
            throw ConfigError("topology model '" + model + "' needs n and m");
        }
        spec.n = obj.at("n").get<size_t>();
        spec.m = obj.at("m").get<size_t>();
        break;
    case TopologySpec::Model::CM:
        if (!obj.contains("degrees")) throw ConfigError("topology model 'cm' needs degrees");
        spec.degrees = obj.at("degrees").get<std::vector<size_t>>();
        break;
    case TopologySpec::Model::File:
        if (!obj.contains("path")) throw ConfigError("topology model 'file' needs path");
        spec.path = obj.at("path").get<std::string>();
        break;
    }
    return spec;
}

LatencyModel parse_latency(const json& obj)
{
    require_keys(obj, "sim.latency", {"model", "ms", "lo_ms", "hi_ms"});
    const std::string model = obj.value("model", "uniform");
    if (model == "fixed") {
        if (!obj.contains("ms")) throw ConfigError("sim.latency fixed model needs ms");
        return LatencyModel::fixed(obj.at("ms").get<TimeMs>());
    }
    if (model == "uniform") {
        return LatencyModel::uniform(obj.value("lo_ms", TimeMs{50}), obj.value("hi_ms", TimeMs{150}));
    }
    throw ConfigError("unknown latency model '" + model + "'");
}

SimConfig parse_sim(const json& obj)
{
    require_keys(obj, "sim",
                 {"seed", "latency", "unblockable_fraction", "inv_trickle_max_ms",
                  "measurement_latency_ms", "orphan_pool_capacity", "churn"});
    SimConfig cfg;
    cfg.seed = obj.value("seed", uint64_t{0});
    if (obj.contains("latency")) cfg.latency = parse_latency(obj.at("latency"));
    cfg.unblockable_fraction = obj.value("unblockable_fraction", 0.0);
    cfg.inv_trickle_max_ms = obj.value("inv_trickle_max_ms", TimeMs{0});
    cfg.measurement_latency_ms = obj.value("measurement_latency_ms", TimeMs{0});
    cfg.orphan_pool_capacity = obj.value("orphan_pool_capacity", DEFAULT_ORPHAN_POOL_CAPACITY);
    if (cfg.unblockable_fraction < 0.0 || cfg.unblockable_fraction > 1.0) {
        throw ConfigError("sim.unblockable_fraction must be in [0, 1]");
    }
    if (obj.contains("churn")) {
        for (const auto& entry : obj.at("churn")) {
            require_keys(entry, "sim.churn[]", {"time_ms", "node"});
            cfg.churn.emplace_back(entry.at("time_ms").get<TimeMs>(),
                                   entry.at("node").get<NodeId>());
        }
    }
    return cfg;
}

ProbeConfig parse_probe(const json& obj, uint64_t seed)
{
    require_keys(obj, "probe",
                 {"cleanse_wait_ms", "invblock_wait_ms", "flood_wait_ms", "parent_wait_ms",
                  "marker_wait_ms", "probe_settle_ms", "invblock_refresh_ms", "round_budget_ms",
                  "transitory_threshold", "squatter_grind_fraction", "marker_grind_fraction",
                  "max_cleanse_passes"});
    ProbeConfig cfg;
    cfg.seed = seed;
    cfg.cleanse_wait_ms = obj.value("cleanse_wait_ms", cfg.cleanse_wait_ms);
    cfg.invblock_wait_ms = obj.value("invblock_wait_ms", cfg.invblock_wait_ms);
    cfg.flood_wait_ms = obj.value("flood_wait_ms", cfg.flood_wait_ms);
    cfg.parent_wait_ms = obj.value("parent_wait_ms", cfg.parent_wait_ms);
    cfg.marker_wait_ms = obj.value("marker_wait_ms", cfg.marker_wait_ms);
    cfg.probe_settle_ms = obj.value("probe_settle_ms", cfg.probe_settle_ms);
    cfg.invblock_refresh_ms = obj.value("invblock_refresh_ms", cfg.invblock_refresh_ms);
    cfg.round_budget_ms = obj.value("round_budget_ms", cfg.round_budget_ms);
    cfg.transitory_threshold = obj.value("transitory_threshold", cfg.transitory_threshold);
    cfg.squatter_grind_fraction = obj.value("squatter_grind_fraction", cfg.squatter_grind_fraction);
    cfg.marker_grind_fraction = obj.value("marker_grind_fraction", cfg.marker_grind_fraction);
    cfg.max_cleanse_passes = obj.value("max_cleanse_passes", cfg.max_cleanse_passes);
    if (cfg.invblock_refresh_ms >= REQUEST_TIMEOUT_MS) {
        throw ConfigError("probe.invblock_refresh_ms must stay under the 120s request timeout");
    }
    const TimeMs sends = cfg.cleanse_wait_ms + 2 * cfg.invblock_wait_ms + cfg.flood_wait_ms +
                         cfg.parent_wait_ms + cfg.marker_wait_ms + cfg.probe_settle_ms;
    if (sends >= cfg.round_budget_ms) {
        throw ConfigError("probe phase waits exceed the round budget");
    }
    return cfg;
}

OutputSpec parse_output(const json& obj)
{
    require_keys(obj, "output", {"dir", "formats"});
    OutputSpec spec;
    spec.dir = obj.value("dir", spec.dir);
    if (obj.contains("formats")) {
        spec.formats.clear();
        for (const auto& f : obj.at("formats")) {
            spec.formats.push_back(graph_format_from_name(f.get<std::string>()));
        }
    }
    return spec;
}

} // namespace

ScenarioConfig parse_scenario_json(const std::string& text)
{
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!root.is_object()) throw ConfigError("config root must be an object");
    require_keys(root, "config", {"schema_version", "topology", "sim", "probe", "output"});
    if (root.contains("schema_version") && root.at("schema_version").get<int>() != OUTPUT_SCHEMA_VERSION) {
        throw ConfigError("unsupported schema_version");
    }
    if (!root.contains("topology")) throw ConfigError("config.topology is required");

    ScenarioConfig cfg;
    cfg.topology = parse_topology(root.at("topology"));
    if (root.contains("sim")) cfg.sim = parse_sim(root.at("sim"));
    cfg.probe = parse_probe(root.contains("probe") ? root.at("probe") : json::object(), cfg.sim.seed);
    if (root.contains("output")) cfg.output = parse_output(root.at("output"));
    return cfg;
}

ScenarioConfig load_scenario(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario_json(buf.str());
}

std::string scenario_to_json(const ScenarioConfig& cfg)
{
    json topology;
    switch (cfg.topology.model) {
    case TopologySpec::Model::ER:
        topology = {{"model", "er"}, {"n", cfg.topology.n}, {"m", cfg.topology.m}};
        break;
    case TopologySpec::Model::BA:
        topology = {{"model", "ba"}, {"n", cfg.topology.n}, {"m", cfg.topology.m}};
        break;
    case TopologySpec::Model::CM:
        topology = {{"model", "cm"}, {"degrees", cfg.topology.degrees}};
        break;
    case TopologySpec::Model::File:
        topology = {{"model", "file"}, {"path", cfg.topology.path}};
        break;
    }
    json latency;
    if (cfg.sim.latency.kind == LatencyModel::Kind::Fixed) {
        latency = {{"model", "fixed"}, {"ms", cfg.sim.latency.lo}};
    } else {
        latency = {{"model", "uniform"}, {"lo_ms", cfg.sim.latency.lo}, {"hi_ms", cfg.sim.latency.hi}};
    }
    json churn = json::array();
    for (const auto& [at, node] : cfg.sim.churn) {
        churn.push_back({{"time_ms", at}, {"node", node}});
    }
    json root = {
        {"schema_version", OUTPUT_SCHEMA_VERSION},
        {"topology", topology},
        {"sim",
         {{"seed", cfg.sim.seed},
          {"latency", latency},
          {"unblockable_fraction", cfg.sim.unblockable_fraction},
          {"inv_trickle_max_ms", cfg.sim.inv_trickle_max_ms},
          {"measurement_latency_ms", cfg.sim.measurement_latency_ms},
          {"orphan_pool_capacity", cfg.sim.orphan_pool_capacity},
          {"churn", churn}}},
        {"probe",
         {{"cleanse_wait_ms", cfg.probe.cleanse_wait_ms},
          {"invblock_wait_ms", cfg.probe.invblock_wait_ms},
          {"flood_wait_ms", cfg.probe.flood_wait_ms},
          {"parent_wait_ms", cfg.probe.parent_wait_ms},
          {"marker_wait_ms", cfg.probe.marker_wait_ms},
          {"probe_settle_ms", cfg.probe.probe_settle_ms},
          {"invblock_refresh_ms", cfg.probe.invblock_refresh_ms},
          {"round_budget_ms", cfg.probe.round_budget_ms},
          {"transitory_threshold", cfg.probe.transitory_threshold},
          {"squatter_grind_fraction", cfg.probe.squatter_grind_fraction},
          {"marker_grind_fraction", cfg.probe.marker_grind_fraction},
          {"max_cleanse_passes", cfg.probe.max_cleanse_passes}}},
        {"output", {{"dir", cfg.output.dir}}},
    };
    json formats = json::array();
    for (GraphFormat f : cfg.output.formats) formats.push_back(graph_format_name(f));
    root["output"]["formats"] = formats;
    return root.dump(2) + "\n";
}

GraphSnapshot build_topology(const TopologySpec& spec, uint64_t seed)
{
    const uint64_t topo_seed = Rng::substream(seed, "topology").next();
    GraphSnapshot g;
    switch (spec.model) {
    case TopologySpec::Model::ER:
        g = gen_er(spec.n, spec.m, topo_seed);
        break;
    case TopologySpec::Model::CM:
        g = gen_cm(spec.degrees, topo_seed);
        break;
    case TopologySpec::Model::BA:
        g = gen_ba(spec.n, spec.m, topo_seed);
        break;
    case TopologySpec::Model::File:
        g = load_graph(spec.path);
        break;
    }
    bool has_labels = false;
    for (NodeId u = 0; u < g.num_vertices() && !has_labels; ++u) {
        has_labels = !g.attrs(u).region.empty();
    }
    if (!has_labels) assign_regions(g, Rng::substream(seed, "regions").next());
    return g;
}

ScanOutcome run_scan(const ScenarioConfig& config, const std::optional<std::string>& trace_path)
{
    ScanOutcome outcome;
    outcome.truth = build_topology(config.topology, config.sim.seed);

    Simulation sim(outcome.truth, config.sim);
    std::ofstream trace_file;
    if (trace_path) {
        trace_file.open(*trace_path, std::ios::binary);
        if (!trace_file) throw std::runtime_error("cannot open trace file " + *trace_path);
        sim.set_trace_sink(&trace_file);
    }

    Prober prober(sim, config.probe);
    outcome.result = prober.full_scan();

    outcome.inferred = GraphSnapshot(outcome.truth.num_vertices());
    for (NodeId u = 0; u < outcome.truth.num_vertices(); ++u) {
        outcome.inferred.attrs(u).region = outcome.truth.attrs(u).region;
        if (outcome.result.excluded_nodes.count(u) > 0) outcome.inferred.attrs(u).flags |= 1;
    }
    for (const Edge& e : outcome.result.edges) outcome.inferred.add_edge(e.first, e.second);

    std::tie(outcome.precision, outcome.recall) =
        evaluate_pr(outcome.result.edges, outcome.truth.edges(), outcome.result.retained);
    return outcome;
}

std::string sha256_hex(const std::string& data)
{
    unsigned char digest[SHA256_DIGEST_LENGTH];
    SHA256(reinterpret_cast<const unsigned char*>(data.data()), data.size(), digest);
    static const char* hexd = "0123456789abcdef";
    std::string out(64, '0');
    for (int i = 0; i < SHA256_DIGEST_LENGTH; ++i) {
        out[2 * i] = hexd[digest[i] >> 4];
        out[2 * i + 1] = hexd[digest[i] & 0xf];
    }
    return out;
}

void write_scan_outputs(const ScanOutcome& outcome, const ScenarioConfig& config,
                        const std::string& dir)
{
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    const auto path = [&](const std::string& name) { return (fs::path(dir) / name).string(); };

    for (GraphFormat format : config.output.formats) {
        const std::string ext = format == GraphFormat::EdgeList ? ".edgelist" : ".graphml";
        save_graph(outcome.truth, path("ground_truth" + ext), format);
        save_graph(outcome.inferred, path("inferred" + ext), format);
    }

    json excluded = json::object();
    for (const auto& [node, reason] : outcome.result.excluded_nodes) {
        excluded[std::to_string(node)] = exclude_reason_name(reason);
    }
    json summary = {
        {"schema_version", OUTPUT_SCHEMA_VERSION},
        {"seed", config.sim.seed},
        {"nodes", outcome.truth.num_vertices()},
        {"truth_edges", outcome.truth.num_edges()},
        {"inferred_edges", outcome.result.edges.size()},
        {"retained_nodes", outcome.result.retained.size()},
        {"excluded", excluded},
        {"rounds", outcome.result.per_round_log.size()},
        {"precision", outcome.precision},
        {"recall", outcome.recall},
    };
    std::ofstream(path("summary.json"), std::ios::binary) << summary.dump(2) << '\n';

    std::ofstream audit(path("audit.log"), std::ios::binary);
    for (const auto& rec : outcome.result.per_round_log) {
        audit << "round=" << rec.round_index << " source=" << rec.source_size
              << " sink=" << rec.sink_size << " skipped=" << (rec.skipped ? 1 : 0)
              << " flood_at_source=" << rec.flood_at_source.size()
              << " missed_parent=" << rec.missed_parent.size()
              << " missed_marker=" << rec.missed_marker.size()
              << " parent_leaks=" << rec.parent_leaks.size()
              << " disconnected=" << rec.disconnected.size() << '\n';
    }

    const std::string config_json = scenario_to_json(config);
    json manifest = {
        {"schema_version", OUTPUT_SCHEMA_VERSION},
        {"tool", "txprobe"},
        {"version", TXPROBE_VERSION},
        {"seed", config.sim.seed},
        {"config_sha256", sha256_hex(config_json)},
    };
    std::ofstream(path("manifest.json"), std::ios::binary) << manifest.dump(2) << '\n';
    std::ofstream(path("config.json"), std::ios::binary) << config_json;
}

} // namespace txprobe
