#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "cosim/survey.hpp"

namespace cosim {

struct BusyTraceSample {
    std::uint64_t window = 0; // window index, window * window_ms = start time
    double co = 0.0;          // channel occupancy in [0, 1]

    bool operator==(const BusyTraceSample&) const = default;
};

/// Per-window channel occupancy for one node. Window indices are strictly
/// increasing; gaps are allowed and read as CO 0 by consumers.
struct BusyTrace {
    std::vector<BusyTraceSample> samples;

    bool operator==(const BusyTrace&) const = default;
};

/// Derives a per-window occupancy trace for `target` from a full survey log.
/// The log must cover a contiguous window range and contain a sample for
/// every member node in every window; a hole is reported with the window
/// index and node id. Samples from non-member nodes are ignored.
BusyTrace derive_busy_trace(const std::vector<SurveySample>& log,
                            int target,
                            const NetworkMembership& members,
                            std::int64_t window_ms = 1000);

/// Parameters for a synthetic staircase trace: hold `start` for
/// `plateau_windows` windows, step up by `step` after each plateau until
/// `max`, then optionally append one plateau at zero.
struct StaircaseSpec {
    double start = 0.0;
    double step = 0.1;
    std::uint64_t plateau_windows = 5;
    double max = 0.5;
    bool reset = false;
};

BusyTrace synth_staircase(const StaircaseSpec& spec);

/// Writes `window,co` CSV, co with exactly six decimals.
void write_busy_trace(const BusyTrace& trace, std::ostream& out);

/// Parses a `window,co` CSV. Rejects co outside [0, 1] and window indices
/// that do not strictly increase, naming the line. Values written by
/// write_busy_trace read back bit-exact.
BusyTrace read_busy_trace(std::istream& in);

BusyTrace read_busy_trace_file(const std::string& path);
void write_busy_trace_file(const BusyTrace& trace, const std::string& path);

} // namespace cosim
