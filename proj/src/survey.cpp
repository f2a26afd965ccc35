#include "cosim/survey.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>

namespace cosim {

namespace {

const char* kSurveyHeader = "node,window_start_ms,active_ms,busy_total_ms,tx_ms";

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ','))
        out.push_back(field);
    if (!line.empty() && line.back() == ',')
        out.emplace_back();
    return out;
}

std::int64_t parse_int_field(const std::string& s, int line_no, const char* name) {
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw ValidationError("line " + std::to_string(line_no) + ": bad " +
                              name + " value '" + s + "'");
    return v;
}

std::string strip_cr(std::string s) {
    if (!s.empty() && s.back() == '\r')
        s.pop_back();
    return s;
}

} // namespace

std::vector<SurveySample> parse_survey_log(std::istream& in, std::int64_t window_ms) {
    if (window_ms <= 0)
        throw ValidationError("window_ms must be positive");

    std::string line;
    if (!std::getline(in, line) || strip_cr(line) != kSurveyHeader)
        throw ValidationError(std::string("survey log: expected header '") +
                              kSurveyHeader + "'");

    std::vector<SurveySample> samples;
    std::map<int, std::int64_t> last_window; // per-node ordering check
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        line = strip_cr(line);
        if (line.empty())
            continue;
        auto fields = split_csv(line);
        if (fields.size() != 5)
            throw ValidationError("line " + std::to_string(line_no) +
                                  ": expected 5 fields, got " +
                                  std::to_string(fields.size()));
        SurveySample s;
        s.node = static_cast<int>(parse_int_field(fields[0], line_no, "node"));
        s.window_start_ms = parse_int_field(fields[1], line_no, "window_start_ms");
        s.active_ms = parse_int_field(fields[2], line_no, "active_ms");
        s.busy_total_ms = parse_int_field(fields[3], line_no, "busy_total_ms");
        s.tx_ms = parse_int_field(fields[4], line_no, "tx_ms");

        if (s.node < 0)
            throw ValidationError("line " + std::to_string(line_no) +
                                  ": negative node id");
        if (s.window_start_ms < 0 || s.window_start_ms % window_ms != 0)
            throw ValidationError("line " + std::to_string(line_no) +
                                  ": window_start_ms must be a non-negative multiple of " +
                                  std::to_string(window_ms));
        if (s.tx_ms < 0 || s.tx_ms > s.busy_total_ms || s.busy_total_ms > s.active_ms ||
            s.active_ms > window_ms)
            throw ValidationError("line " + std::to_string(line_no) +
                                  ": requires 0 <= tx_ms <= busy_total_ms <= active_ms <= " +
                                  std::to_string(window_ms));

        auto it = last_window.find(s.node);
        if (it != last_window.end() && s.window_start_ms <= it->second)
            throw ValidationError("line " + std::to_string(line_no) + ": node " +
                                  std::to_string(s.node) +
                                  " windows must strictly increase");
        last_window[s.node] = s.window_start_ms;
        samples.push_back(s);
    }
    return samples;
}

void write_survey_log(std::ostream& out, const std::vector<SurveySample>& samples) {
    out << kSurveyHeader << '\n';
    for (const SurveySample& s : samples)
        out << s.node << ',' << s.window_start_ms << ',' << s.active_ms << ','
            << s.busy_total_ms << ',' << s.tx_ms << '\n';
}

std::int64_t derive_busy_other(const std::vector<SurveySample>& window_samples,
                               int target,
                               const NetworkMembership& members,
                               std::int64_t window_ms) {
    if (window_ms <= 0)
        throw ValidationError("window_ms must be positive");
    if (members.nodes.empty())
        throw ValidationError("membership is empty");
    if (!members.contains(target))
        throw ValidationError("target node " + std::to_string(target) +
                              " is not a member");

    std::int64_t window_start = window_samples.empty() ? 0 : window_samples.front().window_start_ms;
    std::map<int, const SurveySample*> by_node;
    for (const auto& s : window_samples) {
        if (s.window_start_ms != window_start)
            throw ValidationError("derive_busy_other: samples span multiple windows");
        if (!by_node.emplace(s.node, &s).second)
            throw ValidationError("derive_busy_other: duplicate sample for node " +
                                  std::to_string(s.node));
    }

    const std::string window_name = std::to_string(window_start / window_ms);
    auto sample_of = [&](int node) -> const SurveySample& {
        auto it = by_node.find(node);
        if (it == by_node.end())
            throw ValidationError("window " + window_name +
                                  ": missing sample for node " + std::to_string(node));
        return *it->second;
    };

    // Busy counters include the node's own transmit time, so every member's
    // tx comes off, the target's own included.
    std::int64_t busy = sample_of(target).busy_total_ms;
    for (int member : members.nodes)
        busy -= sample_of(member).tx_ms;
    return std::max<std::int64_t>(busy, 0);
}

double compute_channel_occupancy(std::int64_t busy_other_ms, std::int64_t window_ms) {
    if (window_ms <= 0)
        throw ValidationError("window_ms must be positive");
    if (busy_other_ms <= 0)
        return 0.0;
    return std::min(1.0, static_cast<double>(busy_other_ms) /
                             static_cast<double>(window_ms));
}

} // namespace cosim
