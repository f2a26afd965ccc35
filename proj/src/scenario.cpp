#include "cosim/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "cosim/errors.hpp"
#include "cosim/mac.hpp"
#include "cosim/survey.hpp"

namespace cosim {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

[[noreturn]] void fail(const std::string& msg) {
    throw ValidationError("config: " + msg);
}

void check_keys(const json& j, const std::string& where,
                std::initializer_list<const char*> allowed) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool known = false;
        for (const char* k : allowed)
            if (it.key() == k) {
                known = true;
                break;
            }
        if (!known)
            fail("unknown key '" + it.key() + "' in " + where);
    }
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
    auto it = j.find(key);
    if (it == j.end())
        return fallback;
    try {
        return it->get<T>();
    } catch (const json::exception&) {
        fail(std::string("bad value for '") + key + "'");
    }
}

std::pair<int, int> parse_link_key(const std::string& key) {
    size_t arrow = key.find("->");
    if (arrow == std::string::npos)
        fail("link key '" + key + "' must look like 'src->dst'");
    try {
        int src = std::stoi(key.substr(0, arrow));
        int dst = std::stoi(key.substr(arrow + 2));
        return {src, dst};
    } catch (const std::exception&) {
        fail("link key '" + key + "' must name two node ids");
    }
}

int parse_node_key(const std::string& key, const char* where) {
    try {
        size_t pos = 0;
        int node = std::stoi(key, &pos);
        if (pos != key.size())
            throw std::invalid_argument(key);
        return node;
    } catch (const std::exception&) {
        fail(std::string(where) + " key '" + key + "' is not a node id");
    }
}

std::string resolve_path(const std::string& path, const std::string& base_dir) {
    if (base_dir.empty() || path.empty() || fs::path(path).is_absolute())
        return path;
    return (fs::path(base_dir) / path).string();
}

std::map<int, std::string> parse_trace_map(const json& j, const char* key,
                                           const std::string& base_dir) {
    std::map<int, std::string> out;
    auto it = j.find(key);
    if (it == j.end())
        return out;
    if (!it->is_object())
        fail(std::string("'") + key + "' must map node ids to file paths");
    for (auto entry = it->begin(); entry != it->end(); ++entry) {
        if (!entry.value().is_string())
            fail(std::string("'") + key + "' values must be file paths");
        out[parse_node_key(entry.key(), key)] =
            resolve_path(entry.value().get<std::string>(), base_dir);
    }
    return out;
}

PhyConfig parse_phy(const json& j) {
    PhyConfig phy;
    check_keys(j, "phy",
               {"rate_mbps", "control_rate_mbps", "tx_power_dbm", "noise_floor_dbm",
                "link_quality", "friis", "propagation_delay_us"});
    phy.rate_mbps = get_or(j, "rate_mbps", phy.rate_mbps);
    phy.control_rate_mbps = get_or(j, "control_rate_mbps", phy.control_rate_mbps);
    phy.tx_power_dbm = get_or(j, "tx_power_dbm", phy.tx_power_dbm);
    phy.noise_floor_dbm = get_or(j, "noise_floor_dbm", phy.noise_floor_dbm);

    if (auto lq = j.find("link_quality"); lq != j.end()) {
        check_keys(*lq, "link_quality", {"mode", "snr_db", "traces"});
        std::string mode = get_or<std::string>(*lq, "mode", "fixed_snr");
        if (mode == "fixed_snr") {
            phy.link_mode = PhyConfig::LinkQuality::FixedSnr;
            phy.fixed_snr_db = get_or(*lq, "snr_db", phy.fixed_snr_db);
        } else if (mode == "snr_trace") {
            phy.link_mode = PhyConfig::LinkQuality::SnrTrace;
            auto traces = lq->find("traces");
            if (traces == lq->end() || !traces->is_object())
                fail("snr_trace mode needs a 'traces' object");
            for (auto t = traces->begin(); t != traces->end(); ++t) {
                if (!t.value().is_array())
                    fail("SNR trace for '" + t.key() + "' must be an array");
                phy.snr_traces[parse_link_key(t.key())] =
                    t.value().get<std::vector<double>>();
            }
        } else {
            fail("link_quality.mode must be 'fixed_snr' or 'snr_trace'");
        }
    }

    if (auto fr = j.find("friis"); fr != j.end()) {
        check_keys(*fr, "friis", {"enabled", "distance_m", "frequency_hz"});
        phy.friis_enabled = get_or(*fr, "enabled", false);
        phy.friis_distance_m = get_or(*fr, "distance_m", phy.friis_distance_m);
        phy.friis_frequency_hz = get_or(*fr, "frequency_hz", phy.friis_frequency_hz);
    }

    phy.propagation_delay_us = get_or(j, "propagation_delay_us", int64_t{0});
    return phy;
}

MacConfig parse_mac(const json& j) {
    MacConfig mac;
    check_keys(j, "mac",
               {"cw_min", "cw_max", "retry_limit", "blocked_policy",
                "cw_double_on_gated_loss"});
    mac.cw_min = get_or(j, "cw_min", mac.cw_min);
    mac.cw_max = get_or(j, "cw_max", mac.cw_max);
    mac.retry_limit = get_or(j, "retry_limit", mac.retry_limit);
    std::string policy = get_or<std::string>(j, "blocked_policy", "defer");
    if (policy == "defer")
        mac.blocked_policy = MacConfig::BlockedPolicy::Defer;
    else if (policy == "drop")
        mac.blocked_policy = MacConfig::BlockedPolicy::Drop;
    else
        fail("blocked_policy must be 'defer' or 'drop'");
    mac.cw_double_on_gated_loss = get_or(j, "cw_double_on_gated_loss", false);
    return mac;
}

FlowConfig parse_flow(const json& j, size_t index) {
    FlowConfig flow;
    std::string where = "flows[" + std::to_string(index) + "]";
    check_keys(j, where,
               {"src", "dst", "type", "payload_bytes", "rate_mbps", "acked",
                "start_s", "stop_s", "schedule"});
    flow.src = get_or(j, "src", flow.src);
    flow.dst = get_or(j, "dst", flow.dst);
    std::string type = get_or<std::string>(j, "type", "saturated");
    if (type == "saturated")
        flow.type = FlowConfig::Type::Saturated;
    else if (type == "cbr")
        flow.type = FlowConfig::Type::Cbr;
    else
        fail(where + ": type must be 'saturated' or 'cbr'");
    flow.payload_bytes = get_or(j, "payload_bytes", flow.payload_bytes);
    flow.rate_mbps = get_or(j, "rate_mbps", flow.rate_mbps);
    flow.acked = get_or(j, "acked", flow.acked);
    flow.start_s = get_or(j, "start_s", flow.start_s);
    flow.stop_s = get_or(j, "stop_s", flow.stop_s);
    if (auto sched = j.find("schedule"); sched != j.end()) {
        if (!sched->is_array())
            fail(where + ": schedule must be an array");
        for (const json& p : *sched) {
            check_keys(p, where + ".schedule", {"start_s", "stop_s", "frames_per_s"});
            FlowConfig::CbrPhase phase;
            phase.start_s = get_or(p, "start_s", 0.0);
            phase.stop_s = get_or(p, "stop_s", 0.0);
            phase.frames_per_s = get_or(p, "frames_per_s", 0.0);
            flow.schedule.push_back(phase);
        }
    }
    return flow;
}

std::string link_key(const std::pair<int, int>& link) {
    return std::to_string(link.first) + "->" + std::to_string(link.second);
}

}  // namespace

std::string FlowConfig::label() const {
    return std::to_string(src) + "->" + std::to_string(dst);
}

ScenarioConfig parse_scenario(const std::string& json_text,
                              const std::string& base_dir) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        fail(std::string("not valid JSON: ") + e.what());
    }
    if (!j.is_object())
        fail("top level must be an object");
    check_keys(j, "top level",
               {"duration_s", "seed", "nodes", "membership", "sensing", "phy", "mac",
                "flows", "occupancy", "output"});

    ScenarioConfig cfg;
    cfg.duration_s = get_or(j, "duration_s", cfg.duration_s);
    cfg.seed = get_or(j, "seed", cfg.seed);

    if (auto nodes = j.find("nodes"); nodes != j.end()) {
        if (!nodes->is_array())
            fail("'nodes' must be an array of node ids");
        std::vector<int> ids = nodes->get<std::vector<int>>();
        cfg.num_nodes = static_cast<int>(ids.size());
        for (int i = 0; i < cfg.num_nodes; ++i)
            if (ids[i] != i)
                fail("'nodes' must be exactly 0..N-1 in order");
    }

    if (auto members = j.find("membership"); members != j.end())
        cfg.membership = members->get<std::vector<int>>();

    if (auto sensing = j.find("sensing"); sensing != j.end()) {
        check_keys(*sensing, "sensing", {"deaf"});
        if (auto deaf = sensing->find("deaf"); deaf != sensing->end()) {
            if (!deaf->is_array())
                fail("'sensing.deaf' must be an array of [listener, talker] pairs");
            for (const json& pair : *deaf) {
                if (!pair.is_array() || pair.size() != 2)
                    fail("'sensing.deaf' entries must be [listener, talker] pairs");
                cfg.deaf.emplace_back(pair[0].get<int>(), pair[1].get<int>());
            }
        }
    }

    if (auto phy = j.find("phy"); phy != j.end())
        cfg.phy = parse_phy(*phy);
    if (auto mac = j.find("mac"); mac != j.end())
        cfg.mac = parse_mac(*mac);

    if (auto flows = j.find("flows"); flows != j.end()) {
        if (!flows->is_array())
            fail("'flows' must be an array");
        for (size_t i = 0; i < flows->size(); ++i)
            cfg.flows.push_back(parse_flow((*flows)[i], i));
    }

    if (auto occ = j.find("occupancy"); occ != j.end()) {
        check_keys(*occ, "occupancy",
                   {"interference_loss", "sender_gate", "receiver_traces",
                    "sender_traces"});
        cfg.occupancy.interference_loss = get_or(*occ, "interference_loss", false);
        cfg.occupancy.sender_gate = get_or(*occ, "sender_gate", false);
        cfg.occupancy.receiver_traces =
            parse_trace_map(*occ, "receiver_traces", base_dir);
        cfg.occupancy.sender_traces = parse_trace_map(*occ, "sender_traces", base_dir);
    }

    if (auto out = j.find("output"); out != j.end()) {
        check_keys(*out, "output", {"decisions", "survey"});
        cfg.output.decisions = get_or(*out, "decisions", false);
        cfg.output.survey = get_or(*out, "survey", false);
    }

    validate_scenario(cfg);
    return cfg;
}

ScenarioConfig parse_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw RuntimeError("cannot open config file: " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_scenario(buffer.str(), fs::path(path).parent_path().string());
}

void validate_scenario(const ScenarioConfig& cfg) {
    if (cfg.duration_s < 1)
        fail("duration_s must be at least 1");
    if (cfg.num_nodes < 1)
        fail("at least one node is required");

    for (int m : cfg.membership)
        if (m < 0 || m >= cfg.num_nodes)
            fail("membership names unknown node " + std::to_string(m));

    for (const auto& [listener, talker] : cfg.deaf) {
        if (listener < 0 || listener >= cfg.num_nodes || talker < 0 ||
            talker >= cfg.num_nodes)
            fail("sensing.deaf names an unknown node");
        if (listener == talker)
            fail("a node cannot be deaf to itself");
    }

    if (!is_supported_rate(cfg.phy.rate_mbps))
        fail("phy.rate_mbps " + std::to_string(cfg.phy.rate_mbps) +
             " is not an 802.11a rate");
    if (!is_supported_rate(cfg.phy.control_rate_mbps))
        fail("phy.control_rate_mbps " + std::to_string(cfg.phy.control_rate_mbps) +
             " is not an 802.11a rate");
    if (cfg.phy.link_mode == PhyConfig::LinkQuality::FixedSnr &&
        cfg.phy.fixed_snr_db < 0)
        fail("link_quality.snr_db must be non-negative");
    if (cfg.phy.propagation_delay_us < 0 || cfg.phy.propagation_delay_us > 1000)
        fail("propagation_delay_us must be in [0, 1000]");
    if (cfg.phy.friis_enabled &&
        (cfg.phy.friis_distance_m <= 0 || cfg.phy.friis_frequency_hz <= 0))
        fail("friis needs positive distance and frequency");

    if (cfg.mac.cw_min < 0 || cfg.mac.cw_max < cfg.mac.cw_min)
        fail("mac window bounds need 0 <= cw_min <= cw_max");
    if (cfg.mac.cw_max > 65535)
        fail("mac.cw_max is implausibly large");
    if (cfg.mac.retry_limit < 0 || cfg.mac.retry_limit > 100)
        fail("mac.retry_limit must be in [0, 100]");

    std::set<int> sources;
    for (size_t i = 0; i < cfg.flows.size(); ++i) {
        const FlowConfig& f = cfg.flows[i];
        std::string where = "flows[" + std::to_string(i) + "]";
        if (f.src < 0 || f.src >= cfg.num_nodes || f.dst < 0 || f.dst >= cfg.num_nodes)
            fail(where + " names an unknown node");
        if (f.src == f.dst)
            fail(where + ": src and dst must differ");
        if (!sources.insert(f.src).second)
            fail("node " + std::to_string(f.src) + " sources more than one flow");
        if (f.payload_bytes < 0 || f.payload_bytes > 2304)
            fail(where + ": payload_bytes must be in [0, 2304]");
        if (f.rate_mbps != 0 && !is_supported_rate(f.rate_mbps))
            fail(where + ": rate_mbps " + std::to_string(f.rate_mbps) +
                 " is not an 802.11a rate");
        if (f.start_s < 0)
            fail(where + ": start_s must be non-negative");
        if (f.stop_s >= 0 && f.stop_s <= f.start_s)
            fail(where + ": stop_s must exceed start_s");
        if (f.type == FlowConfig::Type::Saturated && !f.schedule.empty())
            fail(where + ": saturated flows take no schedule");
        if (f.type == FlowConfig::Type::Cbr) {
            if (f.schedule.empty())
                fail(where + ": cbr flows need a schedule");
            double prev_stop = -1.0;
            for (const auto& p : f.schedule) {
                if (p.frames_per_s <= 0)
                    fail(where + ": schedule rates must be positive");
                if (p.stop_s <= p.start_s)
                    fail(where + ": schedule phases need start_s < stop_s");
                if (p.start_s < prev_stop)
                    fail(where + ": schedule phases must not overlap");
                prev_stop = p.stop_s;
            }
        }
        if (cfg.phy.link_mode == PhyConfig::LinkQuality::SnrTrace) {
            if (!cfg.phy.snr_traces.count({f.src, f.dst}))
                fail(where + ": no SNR trace for link " +
                     link_key({f.src, f.dst}));
            if (f.acked && !cfg.phy.snr_traces.count({f.dst, f.src}))
                fail(where + ": acked flow needs an SNR trace for link " +
                     link_key({f.dst, f.src}));
        }
    }

    auto check_traces = [&](const std::map<int, std::string>& traces, bool enabled,
                            const char* traces_name, const char* toggle_name) {
        for (const auto& [node, path] : traces) {
            if (node < 0 || node >= cfg.num_nodes)
                fail(std::string(traces_name) + " names unknown node " +
                     std::to_string(node));
            if (path.empty())
                fail(std::string(traces_name) + " has an empty path for node " +
                     std::to_string(node));
        }
        if (!traces.empty() && !enabled)
            fail(std::string(traces_name) + " bound but " + toggle_name +
                 " is disabled");
    };
    check_traces(cfg.occupancy.receiver_traces, cfg.occupancy.interference_loss,
                 "receiver_traces", "interference_loss");
    check_traces(cfg.occupancy.sender_traces, cfg.occupancy.sender_gate,
                 "sender_traces", "sender_gate");
}

std::string scenario_to_json(const ScenarioConfig& cfg) {
    json j;
    j["duration_s"] = cfg.duration_s;
    j["seed"] = cfg.seed;
    std::vector<int> nodes(cfg.num_nodes);
    for (int i = 0; i < cfg.num_nodes; ++i)
        nodes[i] = i;
    j["nodes"] = nodes;
    if (!cfg.membership.empty())
        j["membership"] = cfg.membership;
    if (!cfg.deaf.empty()) {
        json deaf = json::array();
        for (const auto& [l, t] : cfg.deaf)
            deaf.push_back({l, t});
        j["sensing"]["deaf"] = deaf;
    }

    json& phy = j["phy"];
    phy["rate_mbps"] = cfg.phy.rate_mbps;
    phy["control_rate_mbps"] = cfg.phy.control_rate_mbps;
    phy["tx_power_dbm"] = cfg.phy.tx_power_dbm;
    phy["noise_floor_dbm"] = cfg.phy.noise_floor_dbm;
    if (cfg.phy.link_mode == PhyConfig::LinkQuality::FixedSnr) {
        phy["link_quality"] = {{"mode", "fixed_snr"}, {"snr_db", cfg.phy.fixed_snr_db}};
    } else {
        json traces;
        for (const auto& [link, samples] : cfg.phy.snr_traces)
            traces[link_key(link)] = samples;
        phy["link_quality"] = {{"mode", "snr_trace"}, {"traces", traces}};
    }
    if (cfg.phy.friis_enabled)
        phy["friis"] = {{"enabled", true},
                        {"distance_m", cfg.phy.friis_distance_m},
                        {"frequency_hz", cfg.phy.friis_frequency_hz}};
    phy["propagation_delay_us"] = cfg.phy.propagation_delay_us;

    json& mac = j["mac"];
    mac["cw_min"] = cfg.mac.cw_min;
    mac["cw_max"] = cfg.mac.cw_max;
    mac["retry_limit"] = cfg.mac.retry_limit;
    mac["blocked_policy"] =
        cfg.mac.blocked_policy == MacConfig::BlockedPolicy::Defer ? "defer" : "drop";
    mac["cw_double_on_gated_loss"] = cfg.mac.cw_double_on_gated_loss;

    json flows = json::array();
    for (const FlowConfig& f : cfg.flows) {
        json fj;
        fj["src"] = f.src;
        fj["dst"] = f.dst;
        fj["type"] = f.type == FlowConfig::Type::Saturated ? "saturated" : "cbr";
        fj["payload_bytes"] = f.payload_bytes;
        if (f.rate_mbps != 0)
            fj["rate_mbps"] = f.rate_mbps;
        fj["acked"] = f.acked;
        fj["start_s"] = f.start_s;
        if (f.stop_s >= 0)
            fj["stop_s"] = f.stop_s;
        if (!f.schedule.empty()) {
            json sched = json::array();
            for (const auto& p : f.schedule)
                sched.push_back({{"start_s", p.start_s},
                                 {"stop_s", p.stop_s},
                                 {"frames_per_s", p.frames_per_s}});
            fj["schedule"] = sched;
        }
        flows.push_back(fj);
    }
    j["flows"] = flows;

    json& occ = j["occupancy"];
    occ["interference_loss"] = cfg.occupancy.interference_loss;
    occ["sender_gate"] = cfg.occupancy.sender_gate;
    json rx_traces, tx_traces;
    for (const auto& [node, path] : cfg.occupancy.receiver_traces)
        rx_traces[std::to_string(node)] = path;
    for (const auto& [node, path] : cfg.occupancy.sender_traces)
        tx_traces[std::to_string(node)] = path;
    occ["receiver_traces"] = rx_traces.is_null() ? json::object() : rx_traces;
    occ["sender_traces"] = tx_traces.is_null() ? json::object() : tx_traces;

    j["output"] = {{"decisions", cfg.output.decisions},
                   {"survey", cfg.output.survey}};

    return j.dump(2) + "\n";
}

namespace {

std::string format_mbps(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path);
    if (!out)
        throw RuntimeError("cannot write " + path.string());
    out << content;
    if (!out)
        throw RuntimeError("write failed for " + path.string());
}

}  // namespace

SimResult run_scenario(const ScenarioConfig& config, const std::string& out_dir) {
    Simulator sim(config);  // validates before any directory is created
    fs::create_directories(out_dir);
    SimResult result = sim.run();

    write_file(fs::path(out_dir) / "config.json", scenario_to_json(config));

    std::string throughput = "flow,interval,mbps\n";
    for (const auto& [label, series] : result.throughput)
        for (size_t i = 0; i < series.mbps.size(); ++i)
            throughput +=
                label + "," + std::to_string(i) + "," + format_mbps(series.mbps[i]) + "\n";
    write_file(fs::path(out_dir) / "throughput.csv", throughput);

    std::string summary = "flow,mean_mbps\n";
    for (const auto& [label, series] : result.throughput)
        summary += label + "," + format_mbps(mean_mbps(series)) + "\n";
    write_file(fs::path(out_dir) / "summary.csv", summary);

    if (config.output.survey) {
        std::ostringstream survey;
        write_survey_log(survey, result.survey);
        write_file(fs::path(out_dir) / "survey.csv", survey.str());
    }

    if (config.output.decisions) {
        std::string decisions = "time_us,node,mechanism,draw,co,outcome\n";
        char buf[64];
        for (const GateLogEntry& d : result.decisions) {
            std::snprintf(buf, sizeof(buf), "%.9f,%.9f", d.draw, d.co);
            decisions += std::to_string(d.time_us) + "," + std::to_string(d.node) +
                         "," +
                         (d.mechanism == Mechanism::Receiver ? "receiver" : "sender") +
                         "," + buf + "," +
                         (d.outcome == GateOutcome::Blocked ? "blocked" : "forward") +
                         "\n";
        }
        write_file(fs::path(out_dir) / "decisions.csv", decisions);
    }

    return result;
}

}  // namespace cosim
