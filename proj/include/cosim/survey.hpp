#pragma once

#include <cstdint>
#include <iosfwd>
#include <set>
#include <vector>

#include "cosim/errors.hpp"

namespace cosim {

/// One airtime-survey window as a wireless driver reports it: how long the
/// radio was operating on the channel, how long the medium was sensed busy
/// (the node's own transmissions count as busy, as real cycle counters do),
/// and how long the node itself spent transmitting. All fields are
/// milliseconds within one measurement window.
struct SurveySample {
    int node = 0;
    std::int64_t window_start_ms = 0;
    std::int64_t active_ms = 0;
    std::int64_t busy_total_ms = 0;
    std::int64_t tx_ms = 0;
};

/// The node ids belonging to the network under our control. Busy time caused
/// by these nodes is "ours"; whatever remains in a busy counter after
/// removing their transmissions is attributed to everyone else.
struct NetworkMembership {
    std::set<int> nodes;

    bool contains(int node) const { return nodes.count(node) != 0; }
};

/// Parses a survey CSV with header
///   node,window_start_ms,active_ms,busy_total_ms,tx_ms
/// into samples. Validates per row that
///   0 <= tx_ms <= busy_total_ms <= active_ms <= window_ms,
/// that window_start_ms is a multiple of window_ms, and that each node's
/// windows appear in strictly increasing order. Throws ValidationError with
/// the offending line number otherwise.
std::vector<SurveySample> parse_survey_log(std::istream& in,
                                           std::int64_t window_ms = 1000);

/// Writes samples in the same CSV shape parse_survey_log reads.
void write_survey_log(std::ostream& out, const std::vector<SurveySample>& samples);

/// Busy time at `target` not explained by the network's own transmissions,
/// for one window: busy_total(target) minus the tx time of every member node
/// (the target's own tx included -- busy counters contain it). Clamped at 0;
/// desynchronized counters can drive the subtraction negative.
///
/// `window_samples` must hold one sample per member node, all for the same
/// window. Extra samples from non-member nodes are ignored.
std::int64_t derive_busy_other(const std::vector<SurveySample>& window_samples,
                               int target,
                               const NetworkMembership& members,
                               std::int64_t window_ms = 1000);

/// Fraction of the window occupied by foreign traffic, in [0, 1].
double compute_channel_occupancy(std::int64_t busy_other_ms,
                                 std::int64_t window_ms = 1000);

} // namespace cosim
