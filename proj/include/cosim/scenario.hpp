#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "cosim/phy.hpp"

namespace cosim {

struct PhyConfig {
    int rate_mbps = 54;
    int control_rate_mbps = kAckRateMbps;
    double tx_power_dbm = 16.0;
    double noise_floor_dbm = -95.0;

    enum class LinkQuality { FixedSnr, SnrTrace };
    LinkQuality link_mode = LinkQuality::FixedSnr;
    double fixed_snr_db = 75.0;
    // per directed link, one SNR sample per second
    std::map<std::pair<int, int>, std::vector<double>> snr_traces;

    bool friis_enabled = false;
    double friis_distance_m = 10.0;
    double friis_frequency_hz = 5.18e9;

    int64_t propagation_delay_us = 0;
};

struct MacConfig {
    int cw_min = kCwMin;
    int cw_max = kCwMax;
    int retry_limit = kRetryLimit;

    enum class BlockedPolicy { Defer, Drop };
    BlockedPolicy blocked_policy = BlockedPolicy::Defer;

    // When the ACK is missing because the occupancy gate swallowed the frame,
    // the default is to keep the contention window where it is: the loss is
    // replayed external traffic, not contention among the simulated nodes, so
    // exponential backoff has nothing to resolve. Collisions and SNR failures
    // always double. Set this to also double on gated losses.
    bool cw_double_on_gated_loss = false;
};

struct FlowConfig {
    int src = 0;
    int dst = 1;

    enum class Type { Saturated, Cbr };
    Type type = Type::Saturated;

    int payload_bytes = 1470;
    int rate_mbps = 0;  // 0 = phy default
    bool acked = true;
    double start_s = 0.0;
    double stop_s = -1.0;  // -1 = run end

    struct CbrPhase {
        double start_s = 0.0;
        double stop_s = 0.0;
        double frames_per_s = 0.0;
    };
    std::vector<CbrPhase> schedule;  // cbr only

    std::string label() const;  // "src->dst"
};

struct OccupancyModelConfig {
    bool interference_loss = false;  // receiver-side gate in the loss chain
    bool sender_gate = false;        // sender-side gate at backoff expiry
    std::map<int, std::string> receiver_traces;  // node -> busy-trace csv
    std::map<int, std::string> sender_traces;
};

struct OutputConfig {
    bool decisions = false;
    bool survey = false;
};

struct ScenarioConfig {
    int64_t duration_s = 10;
    uint64_t seed = 1;
    int num_nodes = 2;
    std::vector<int> membership;              // defaults to all nodes
    std::vector<std::pair<int, int>> deaf;    // (listener, talker)
    PhyConfig phy;
    MacConfig mac;
    std::vector<FlowConfig> flows;
    OccupancyModelConfig occupancy;
    OutputConfig output;
};

// Parses and validates a config document. Relative trace paths are resolved
// against base_dir ("" = leave untouched).
ScenarioConfig parse_scenario(const std::string& json_text,
                              const std::string& base_dir = "");
ScenarioConfig parse_scenario_file(const std::string& path);

// Canonical JSON for the config, suitable for re-parsing.
std::string scenario_to_json(const ScenarioConfig& config);

void validate_scenario(const ScenarioConfig& config);

struct SimResult;

// Runs the scenario and writes its outputs under out_dir: the materialized
// config, throughput.csv and summary.csv, plus survey.csv / decisions.csv
// when the output flags ask for them.
SimResult run_scenario(const ScenarioConfig& config, const std::string& out_dir);

}  // namespace cosim
