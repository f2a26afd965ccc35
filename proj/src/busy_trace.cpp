#include "cosim/busy_trace.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace cosim {

namespace {

const char* kTraceHeader = "window,co";

double round6(double v) {
    return std::round(v * 1e6) / 1e6;
}

std::string strip_cr(std::string s) {
    if (!s.empty() && s.back() == '\r')
        s.pop_back();
    return s;
}

} // namespace

BusyTrace derive_busy_trace(const std::vector<SurveySample>& log,
                            int target,
                            const NetworkMembership& members,
                            std::int64_t window_ms) {
    if (window_ms <= 0)
        throw ValidationError("window_ms must be positive");
    if (log.empty())
        throw ValidationError("empty survey log");

    std::map<std::int64_t, std::vector<SurveySample>> by_window;
    for (const auto& s : log)
        by_window[s.window_start_ms].push_back(s);

    // Coverage must be contiguous; holes make the step-function trace lie.
    std::int64_t expect = by_window.begin()->first;
    for (const auto& [start, _] : by_window) {
        if (start != expect)
            throw ValidationError("window " + std::to_string(expect / window_ms) +
                                  ": no samples");
        expect += window_ms;
    }

    BusyTrace trace;
    trace.samples.reserve(by_window.size());
    for (const auto& [start, samples] : by_window) {
        std::int64_t busy_other = derive_busy_other(samples, target, members, window_ms);
        trace.samples.push_back({static_cast<std::uint64_t>(start / window_ms),
                                 compute_channel_occupancy(busy_other, window_ms)});
    }
    return trace;
}

BusyTrace synth_staircase(const StaircaseSpec& spec) {
    if (spec.start < 0.0 || spec.start > 1.0)
        throw ValidationError("staircase start outside [0, 1]");
    if (spec.max < 0.0 || spec.max > 1.0)
        throw ValidationError("staircase max outside [0, 1]");
    if (spec.step < 0.0 || spec.step > 1.0)
        throw ValidationError("staircase step outside [0, 1]");
    if (spec.max < spec.start)
        throw ValidationError("staircase max below start");
    if (spec.plateau_windows == 0)
        throw ValidationError("staircase plateau must be at least one window");

    std::uint64_t levels = 1;
    if (spec.max > spec.start) {
        if (spec.step == 0.0)
            throw ValidationError("staircase with zero step cannot reach max");
        if (spec.step > spec.max - spec.start + 1e-9)
            throw ValidationError("staircase step exceeds max - start");
        levels += static_cast<std::uint64_t>(
            std::floor((spec.max - spec.start) / spec.step + 1e-9));
    }

    BusyTrace trace;
    std::uint64_t window = 0;
    for (std::uint64_t k = 0; k < levels; ++k) {
        double co = round6(spec.start + static_cast<double>(k) * spec.step);
        for (std::uint64_t i = 0; i < spec.plateau_windows; ++i)
            trace.samples.push_back({window++, co});
    }
    if (spec.reset)
        for (std::uint64_t i = 0; i < spec.plateau_windows; ++i)
            trace.samples.push_back({window++, 0.0});
    return trace;
}

void write_busy_trace(const BusyTrace& trace, std::ostream& out) {
    out << kTraceHeader << '\n';
    char buf[64];
    std::uint64_t last = 0;
    bool first = true;
    for (const auto& s : trace.samples) {
        if (!first && s.window <= last)
            throw ValidationError("busy trace windows must strictly increase");
        if (s.co < 0.0 || s.co > 1.0)
            throw ValidationError("busy trace co outside [0, 1]");
        std::snprintf(buf, sizeof buf, "%llu,%.6f\n",
                      static_cast<unsigned long long>(s.window), s.co);
        out << buf;
        last = s.window;
        first = false;
    }
}

BusyTrace read_busy_trace(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || strip_cr(line) != kTraceHeader)
        throw ValidationError(std::string("busy trace: expected header '") +
                              kTraceHeader + "'");

    BusyTrace trace;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        line = strip_cr(line);
        if (line.empty())
            continue;
        auto comma = line.find(',');
        if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos)
            throw ValidationError("line " + std::to_string(line_no) +
                                  ": expected 'window,co'");
        std::uint64_t window = 0;
        const char* begin = line.data();
        auto [ptr, ec] = std::from_chars(begin, begin + comma, window);
        if (ec != std::errc() || ptr != begin + comma)
            throw ValidationError("line " + std::to_string(line_no) +
                                  ": bad window index");
        std::string co_str = line.substr(comma + 1);
        char* end = nullptr;
        double co = std::strtod(co_str.c_str(), &end);
        if (end != co_str.c_str() + co_str.size() || co_str.empty())
            throw ValidationError("line " + std::to_string(line_no) + ": bad co value");
        if (co < 0.0 || co > 1.0)
            throw ValidationError("line " + std::to_string(line_no) +
                                  ": co outside [0, 1]");
        if (!trace.samples.empty() && window <= trace.samples.back().window)
            throw ValidationError("line " + std::to_string(line_no) +
                                  ": window indices must strictly increase");
        trace.samples.push_back({window, co});
    }
    return trace;
}

BusyTrace read_busy_trace_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw RuntimeError("cannot open busy trace '" + path + "'");
    try {
        return read_busy_trace(in);
    } catch (const ValidationError& e) {
        throw ValidationError(path + ": " + e.what());
    }
}

void write_busy_trace_file(const BusyTrace& trace, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw RuntimeError("cannot write busy trace '" + path + "'");
    write_busy_trace(trace, out);
}

} // namespace cosim
