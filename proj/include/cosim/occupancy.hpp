#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "cosim/busy_trace.hpp"

namespace cosim {

/// Receive power assigned to a frame that lost the occupancy draw. Far below
/// any decode threshold, so the frame is guaranteed undecodable.
inline constexpr double kBlockedRxPowerDbm = -1000.0;

/// Per-node occupancy traces, immutable once built. Lookup treats each trace
/// as a step function over its windows; nodes without a trace, windows
/// without a sample and times outside the covered range all read as 0.
class OccupancyRegistry {
public:
    OccupancyRegistry() = default;
    explicit OccupancyRegistry(std::map<int, BusyTrace> traces,
                               std::int64_t window_ms = 1000);

    /// CO for `node` at simulation time `t_us` (microseconds).
    double occupancy_at(int node, std::int64_t t_us) const;

    bool has_trace(int node) const { return traces_.count(node) != 0; }
    std::int64_t window_ms() const { return window_ms_; }

private:
    std::map<int, BusyTrace> traces_;
    std::int64_t window_ms_ = 1000;
};

/// Reads one busy-trace file per node. Errors carry the node id and path.
OccupancyRegistry load_registry(const std::map<int, std::string>& trace_files,
                                std::int64_t window_ms = 1000);

enum class GateOutcome { Forward, Blocked };

/// One occupancy decision, kept for decision logs.
struct GateDecision {
    double draw = 0.0;
    double co = 0.0;
    GateOutcome outcome = GateOutcome::Forward;
};

/// Receiver-side interference gate: with probability `co` the frame arrives
/// at kBlockedRxPowerDbm instead of its real power. Blocked iff draw < co
/// (strict), so co 0 is the identity and co 1 blocks every draw.
double receiver_rx_power(double rx_power_dbm, double co, double draw);

/// Sender-side occupancy gate consulted when backoff reaches zero.
GateDecision sender_gate(double co, double draw);

} // namespace cosim
