#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "cosim/meter.hpp"
#include "cosim/occupancy.hpp"
#include "cosim/scenario.hpp"
#include "cosim/survey.hpp"

namespace cosim {

enum class Mechanism { Receiver, Sender };

struct GateLogEntry {
    int64_t time_us = 0;
    int node = -1;
    Mechanism mechanism = Mechanism::Receiver;
    double draw = 0.0;
    double co = 0.0;
    GateOutcome outcome = GateOutcome::Forward;
};

struct FlowStats {
    int64_t enqueued = 0;           // frames the application created
    int64_t acked = 0;              // sender saw the ACK (acked flows)
    int64_t completed_unacked = 0;  // fire-and-forget frames fully sent
    int64_t dropped = 0;            // retry exhaustion or blocked-drop policy
    int64_t pending = 0;            // queued or in flight when the run ended
    int64_t delivered = 0;          // first-time decodes at the receiver
    int64_t duplicates = 0;         // retransmissions the receiver had already seen
};

struct SimResult {
    std::map<std::string, ThroughputSeries> throughput;  // by flow label
    std::map<std::string, FlowStats> stats;
    std::vector<GateLogEntry> decisions;
    std::vector<SurveySample> survey;
    int64_t meter_ticks = 0;
};

// One deterministic discrete-event run: CSMA/CA contention with ACK/retry
// over a shared sensing medium, the configured loss chain between each
// sender and its receiver, and per-interval throughput metering.
class Simulator {
public:
    explicit Simulator(const ScenarioConfig& config);
    ~Simulator();

    Simulator(const Simulator&) = delete;
    Simulator& operator=(const Simulator&) = delete;

    // Single use: runs to the configured duration and returns the outputs.
    SimResult run();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace cosim
