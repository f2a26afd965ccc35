#include "cosim/occupancy.hpp"

#include <algorithm>

namespace cosim {

OccupancyRegistry::OccupancyRegistry(std::map<int, BusyTrace> traces,
                                     std::int64_t window_ms)
    : traces_(std::move(traces)), window_ms_(window_ms) {
    if (window_ms_ <= 0)
        throw ValidationError("window_ms must be positive");
    for (const auto& [node, trace] : traces_) {
        std::uint64_t last = 0;
        bool first = true;
        for (const auto& s : trace.samples) {
            if (s.co < 0.0 || s.co > 1.0)
                throw ValidationError("node " + std::to_string(node) +
                                      ": trace co outside [0, 1]");
            if (!first && s.window <= last)
                throw ValidationError("node " + std::to_string(node) +
                                      ": trace windows must strictly increase");
            last = s.window;
            first = false;
        }
    }
}

double OccupancyRegistry::occupancy_at(int node, std::int64_t t_us) const {
    if (t_us < 0)
        return 0.0;
    auto it = traces_.find(node);
    if (it == traces_.end())
        return 0.0;
    std::uint64_t window =
        static_cast<std::uint64_t>(t_us / (window_ms_ * 1000));
    const auto& samples = it->second.samples;
    auto pos = std::lower_bound(samples.begin(), samples.end(), window,
                                [](const BusyTraceSample& s, std::uint64_t w) {
                                    return s.window < w;
                                });
    if (pos == samples.end() || pos->window != window)
        return 0.0;
    return pos->co;
}

OccupancyRegistry load_registry(const std::map<int, std::string>& trace_files,
                                std::int64_t window_ms) {
    std::map<int, BusyTrace> traces;
    for (const auto& [node, path] : trace_files) {
        try {
            traces.emplace(node, read_busy_trace_file(path));
        } catch (const std::runtime_error& e) {
            throw ValidationError("node " + std::to_string(node) + ": " + e.what());
        }
    }
    return OccupancyRegistry(std::move(traces), window_ms);
}

double receiver_rx_power(double rx_power_dbm, double co, double draw) {
    return draw < co ? kBlockedRxPowerDbm : rx_power_dbm;
}

GateDecision sender_gate(double co, double draw) {
    return GateDecision{draw, co,
                        draw < co ? GateOutcome::Blocked : GateOutcome::Forward};
}

} // namespace cosim
