#include "cosim/preset.hpp"

#include <filesystem>
#include <fstream>

#include "cosim/busy_trace.hpp"
#include "cosim/errors.hpp"
#include "cosim/mac.hpp"
#include "cosim/survey.hpp"

namespace cosim {

namespace {

namespace fs = std::filesystem;

std::vector<FlowConfig> pair_flows(PresetFlow flow) {
    FlowConfig forward;
    forward.src = 0;
    forward.dst = 1;
    FlowConfig back;
    back.src = 1;
    back.dst = 0;
    switch (flow) {
        case PresetFlow::AToB:
            return {forward};
        case PresetFlow::BToA:
            return {back};
        case PresetFlow::Bidir:
            return {forward, back};
    }
    throw ValidationError("unknown preset flow");
}

void bind_traces(ScenarioConfig& cfg, PresetVariant variant,
                 const std::map<int, std::string>& receiver_traces,
                 const std::map<int, std::string>& sender_traces) {
    switch (variant) {
        case PresetVariant::ReceiverOnly:
            cfg.occupancy.interference_loss = true;
            cfg.occupancy.receiver_traces = receiver_traces;
            break;
        case PresetVariant::SenderOnly:
            cfg.occupancy.sender_gate = true;
            cfg.occupancy.sender_traces = sender_traces;
            break;
        case PresetVariant::Both:
            cfg.occupancy.interference_loss = true;
            cfg.occupancy.receiver_traces = receiver_traces;
            cfg.occupancy.sender_gate = true;
            cfg.occupancy.sender_traces = sender_traces;
            break;
        case PresetVariant::Baseline:
            break;
    }
}

}  // namespace

PresetVariant parse_variant(const std::string& name) {
    if (name == "receiver-only")
        return PresetVariant::ReceiverOnly;
    if (name == "sender-only")
        return PresetVariant::SenderOnly;
    if (name == "both")
        return PresetVariant::Both;
    if (name == "baseline")
        return PresetVariant::Baseline;
    throw ValidationError("unknown variant '" + name +
                          "' (expected receiver-only, sender-only, both or baseline)");
}

PresetFlow parse_preset_flow(const std::string& name) {
    if (name == "a-to-b")
        return PresetFlow::AToB;
    if (name == "b-to-a")
        return PresetFlow::BToA;
    if (name == "bidir")
        return PresetFlow::Bidir;
    throw ValidationError("unknown flow '" + name +
                          "' (expected a-to-b, b-to-a or bidir)");
}

std::string variant_name(PresetVariant variant) {
    switch (variant) {
        case PresetVariant::ReceiverOnly: return "receiver-only";
        case PresetVariant::SenderOnly: return "sender-only";
        case PresetVariant::Both: return "both";
        case PresetVariant::Baseline: return "baseline";
    }
    throw ValidationError("unknown variant");
}

std::string preset_flow_name(PresetFlow flow) {
    switch (flow) {
        case PresetFlow::AToB: return "a-to-b";
        case PresetFlow::BToA: return "b-to-a";
        case PresetFlow::Bidir: return "bidir";
    }
    throw ValidationError("unknown preset flow");
}

const std::vector<PresetVariant>& all_variants() {
    static const std::vector<PresetVariant> variants = {
        PresetVariant::ReceiverOnly, PresetVariant::SenderOnly, PresetVariant::Both,
        PresetVariant::Baseline};
    return variants;
}

const std::vector<PresetFlow>& all_preset_flows() {
    static const std::vector<PresetFlow> flows = {PresetFlow::AToB, PresetFlow::BToA,
                                                  PresetFlow::Bidir};
    return flows;
}

int64_t receiver_plateau_start(int step) {
    if (step < 0 || step > kStaircaseSteps)
        throw ValidationError("receiver plateau step outside 0..5");
    return step * kStaircasePlateauWindows;
}

int64_t sender_plateau_start(int step) {
    if (step < 1 || step > kStaircaseSteps)
        throw ValidationError("sender plateau step outside 1..5");
    // the sender ramp begins right after the receiver ramp, sharing the
    // receiver's reset plateau with its own first step
    return (kStaircaseSteps + step) * kStaircasePlateauWindows;
}

std::string run_staircase_variant(PresetVariant variant, PresetFlow flow,
                                  uint64_t seed, const std::string& out_dir) {
    fs::path traces_dir = fs::path(out_dir) / "traces";
    fs::create_directories(traces_dir);

    StaircaseSpec receiver_spec;
    receiver_spec.start = 0.0;
    receiver_spec.step = 0.1;
    receiver_spec.plateau_windows = kStaircasePlateauWindows;
    receiver_spec.max = 0.5;
    receiver_spec.reset = true;
    BusyTrace receiver_trace = synth_staircase(receiver_spec);

    StaircaseSpec sender_spec = receiver_spec;
    sender_spec.start = 0.1;
    sender_spec.reset = false;
    BusyTrace sender_trace = synth_staircase(sender_spec);
    for (BusyTraceSample& s : sender_trace.samples)
        s.window += static_cast<uint64_t>(sender_plateau_start(1));

    std::string receiver_path = (traces_dir / "receiver.csv").string();
    std::string sender_path = (traces_dir / "sender.csv").string();
    write_busy_trace_file(receiver_trace, receiver_path);
    write_busy_trace_file(sender_trace, sender_path);

    ScenarioConfig cfg;
    cfg.duration_s = kStaircaseDurationS;
    cfg.seed = seed;
    cfg.num_nodes = 2;
    cfg.membership = {0, 1};
    cfg.flows = pair_flows(flow);

    std::map<int, std::string> receiver_traces, sender_traces;
    for (const FlowConfig& f : cfg.flows) {
        receiver_traces[f.dst] = receiver_path;
        sender_traces[f.src] = sender_path;
    }
    bind_traces(cfg, variant, receiver_traces, sender_traces);

    std::string run_dir = (fs::path(out_dir) / variant_name(variant)).string();
    run_scenario(cfg, run_dir);
    return run_dir;
}

void run_staircase_preset(PresetFlow flow, uint64_t seed, const std::string& out_dir) {
    for (PresetVariant variant : all_variants())
        run_staircase_variant(variant, flow, seed, out_dir);
}

ScenarioConfig interference_reference_config(PresetFlow flow, uint64_t seed) {
    ScenarioConfig cfg;
    cfg.duration_s = kInterferenceDurationS;
    cfg.seed = seed;
    cfg.num_nodes = 4;
    cfg.membership = {0, 1};
    // the foreign pair never defers to the reproduced pair; the reproduced
    // pair senses the foreign traffic, which is what its busy counters record
    cfg.deaf = {{2, 0}, {2, 1}, {3, 0}, {3, 1}};
    cfg.flows = pair_flows(flow);

    FlowConfig interferer;
    interferer.src = 2;
    interferer.dst = 3;
    interferer.type = FlowConfig::Type::Cbr;
    interferer.acked = false;
    // bulk frames, 372 us on the air each; 268.8 of them per second hold the
    // channel 10% of the time, so plateau p imposes p*10% occupancy
    interferer.payload_bytes = 2304;
    interferer.rate_mbps = 54;
    for (int step = 1; step <= 5; ++step) {
        FlowConfig::CbrPhase phase;
        phase.start_s = 5.0 * step;
        phase.stop_s = 5.0 * step + 5.0;
        phase.frames_per_s = 100000.0 / 372.0 * step;
        interferer.schedule.push_back(phase);
    }
    cfg.flows.push_back(interferer);

    cfg.output.survey = true;
    return cfg;
}

std::string run_interference_flow(PresetFlow flow, PresetVariant candidate_variant,
                                  uint64_t seed, const std::string& out_dir) {
    fs::path base = fs::path(out_dir) / preset_flow_name(flow);

    ScenarioConfig reference = interference_reference_config(flow, seed);
    run_scenario(reference, (base / "reference").string());

    std::ifstream survey_in(base / "reference" / "survey.csv");
    if (!survey_in)
        throw RuntimeError("reference run left no survey at " +
                           (base / "reference" / "survey.csv").string());
    std::vector<SurveySample> log = parse_survey_log(survey_in);

    NetworkMembership members;
    members.nodes = {0, 1};
    fs::path traces_dir = base / "traces";
    fs::create_directories(traces_dir);
    std::map<int, std::string> trace_files;
    for (int node : {0, 1}) {
        BusyTrace trace = derive_busy_trace(log, node, members);
        std::string path = (traces_dir / ("node" + std::to_string(node) + ".csv")).string();
        write_busy_trace_file(trace, path);
        trace_files[node] = path;
    }

    ScenarioConfig candidate;
    candidate.duration_s = kInterferenceDurationS;
    candidate.seed = seed;
    candidate.num_nodes = 2;
    candidate.membership = {0, 1};
    candidate.flows = pair_flows(flow);
    bind_traces(candidate, candidate_variant, trace_files, trace_files);
    run_scenario(candidate, (base / "candidate").string());

    ScenarioConfig baseline = candidate;
    baseline.occupancy = OccupancyModelConfig{};
    run_scenario(baseline, (base / "baseline").string());

    return base.string();
}

void run_interference_preset(PresetVariant candidate_variant, uint64_t seed,
                             const std::string& out_dir) {
    for (PresetFlow flow : all_preset_flows())
        run_interference_flow(flow, candidate_variant, seed, out_dir);
}

}  // namespace cosim
