#include "cosim/meter.hpp"

#include <string>

#include "cosim/errors.hpp"

namespace cosim {

std::map<std::string, ThroughputSeries> meter(const std::vector<DeliveryEvent>& deliveries,
                                              const std::vector<std::string>& flow_labels,
                                              int64_t duration_ms, int64_t interval_ms) {
    if (interval_ms <= 0)
        throw ValidationError("meter interval must be positive");
    if (duration_ms < 0)
        throw ValidationError("meter duration must be non-negative");
    size_t intervals = static_cast<size_t>((duration_ms + interval_ms - 1) / interval_ms);

    std::map<std::string, ThroughputSeries> out;
    for (const std::string& label : flow_labels) {
        ThroughputSeries s;
        s.flow = label;
        s.interval_ms = interval_ms;
        s.mbps.assign(intervals, 0.0);
        out[label] = std::move(s);
    }

    int64_t interval_us = interval_ms * 1000;
    int64_t last_t = -1;
    for (const DeliveryEvent& d : deliveries) {
        if (d.t_us < last_t)
            throw ValidationError("deliveries out of order");
        last_t = d.t_us;
        if (d.flow < 0 || static_cast<size_t>(d.flow) >= flow_labels.size())
            throw ValidationError("delivery names an unknown flow");
        size_t idx = static_cast<size_t>(d.t_us / interval_us);
        if (idx >= intervals)
            throw ValidationError("delivery past the metering horizon");
        out[flow_labels[d.flow]].mbps[idx] += d.payload_bytes * 8.0;
    }

    double per_interval_seconds = interval_ms / 1000.0;
    for (auto& [label, series] : out)
        for (double& v : series.mbps)
            v = v / 1e6 / per_interval_seconds;
    return out;
}

double mean_mbps(const ThroughputSeries& series) {
    if (series.mbps.empty())
        return 0.0;
    return mean_mbps(series, 0, series.mbps.size() - 1);
}

double mean_mbps(const ThroughputSeries& series, size_t first, size_t last) {
    if (first > last || last >= series.mbps.size())
        throw ValidationError("mean over an interval range outside the series");
    double sum = 0.0;
    for (size_t i = first; i <= last; ++i)
        sum += series.mbps[i];
    return sum / static_cast<double>(last - first + 1);
}

}  // namespace cosim
