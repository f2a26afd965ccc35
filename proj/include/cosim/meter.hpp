#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace cosim {

struct DeliveryEvent {
    int64_t t_us = 0;
    int flow = 0;  // index into the flow list
    int payload_bytes = 0;
};

struct ThroughputSeries {
    std::string flow;
    int64_t interval_ms = 1000;
    std::vector<double> mbps;  // index = interval, contiguous from 0
};

// Bins application-payload deliveries into fixed intervals. Every flow gets a
// series covering the whole run, zero-filled where nothing arrived.
std::map<std::string, ThroughputSeries> meter(const std::vector<DeliveryEvent>& deliveries,
                                              const std::vector<std::string>& flow_labels,
                                              int64_t duration_ms,
                                              int64_t interval_ms = 1000);

// Mean over the whole series, or over the inclusive [first, last] slice.
double mean_mbps(const ThroughputSeries& series);
double mean_mbps(const ThroughputSeries& series, size_t first, size_t last);

}  // namespace cosim
