#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cosim/busy_trace.hpp"
#include "cosim/errors.hpp"
#include "cosim/meter.hpp"
#include "cosim/phy.hpp"
#include "cosim/preset.hpp"
#include "cosim/scenario.hpp"

using namespace cosim;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

struct TempDir {
    fs::path path;
    explicit TempDir(const char* name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

std::vector<double> read_mbps(const fs::path& run_dir, const std::string& flow) {
    std::ifstream in(run_dir / "throughput.csv");
    REQUIRE(in.good());
    std::string line;
    std::getline(in, line);
    std::vector<double> out;
    while (std::getline(in, line)) {
        auto c1 = line.find(',');
        auto c2 = line.find(',', c1 + 1);
        if (line.substr(0, c1) == flow)
            out.push_back(std::stod(line.substr(c2 + 1)));
    }
    return out;
}

double mean_slice(const std::vector<double>& v, size_t first, size_t count) {
    double sum = 0;
    for (size_t i = first; i < first + count; ++i) sum += v.at(i);
    return sum / count;
}

}  // namespace

TEST_CASE("variant and flow names round-trip") {
    for (PresetVariant v : all_variants())
        CHECK(parse_variant(variant_name(v)) == v);
    for (PresetFlow f : all_preset_flows())
        CHECK(parse_preset_flow(preset_flow_name(f)) == f);
    CHECK(variant_name(PresetVariant::ReceiverOnly) == "receiver-only");
    CHECK(variant_name(PresetVariant::Baseline) == "baseline");
    CHECK(preset_flow_name(PresetFlow::AToB) == "a-to-b");
    CHECK(preset_flow_name(PresetFlow::Bidir) == "bidir");
    CHECK_THROWS_AS(parse_variant("receiver"), ValidationError);
    CHECK_THROWS_AS(parse_preset_flow("a->b"), ValidationError);
}

TEST_CASE("plateau start windows") {
    CHECK(receiver_plateau_start(0) == 0);
    CHECK(receiver_plateau_start(1) == 5);
    CHECK(receiver_plateau_start(5) == 25);
    CHECK(sender_plateau_start(1) == 30);
    CHECK(sender_plateau_start(5) == 50);
    CHECK_THROWS_AS(receiver_plateau_start(-1), ValidationError);
    CHECK_THROWS_AS(receiver_plateau_start(6), ValidationError);
    CHECK_THROWS_AS(sender_plateau_start(0), ValidationError);
    CHECK_THROWS_AS(sender_plateau_start(6), ValidationError);
}

TEST_CASE("staircase run materializes the two ramp traces") {
    TempDir tmp("cosim_preset_traces");
    run_staircase_variant(PresetVariant::Baseline, PresetFlow::AToB, 5,
                          tmp.path.string());

    BusyTrace receiver = read_busy_trace_file((tmp.path / "traces" / "receiver.csv").string());
    REQUIRE(receiver.samples.size() == 35);
    for (size_t i = 0; i < receiver.samples.size(); ++i)
        CHECK(receiver.samples[i].window == i);
    for (int step = 0; step <= 5; ++step)
        for (int w = 0; w < 5; ++w)
            CHECK(receiver.samples[receiver_plateau_start(step) + w].co ==
                  doctest::Approx(0.1 * step));
    for (size_t i = 30; i < 35; ++i)
        CHECK(receiver.samples[i].co == 0.0);

    BusyTrace sender = read_busy_trace_file((tmp.path / "traces" / "sender.csv").string());
    REQUIRE(sender.samples.size() == 25);
    CHECK(sender.samples.front().window == 30);
    CHECK(sender.samples.back().window == 54);
    for (int step = 1; step <= 5; ++step)
        for (int w = 0; w < 5; ++w)
            CHECK(sender.samples[(step - 1) * 5 + w].co == doctest::Approx(0.1 * step));
}

TEST_CASE("staircase variants bind traces to the matching roles") {
    TempDir tmp("cosim_preset_binding");
    std::string out = tmp.path.string();
    for (PresetVariant v : all_variants())
        run_staircase_variant(v, PresetFlow::AToB, 5, out);

    ScenarioConfig rx = parse_scenario_file(tmp.path / "receiver-only" / "config.json");
    CHECK(rx.occupancy.interference_loss);
    CHECK_FALSE(rx.occupancy.sender_gate);
    REQUIRE(rx.occupancy.receiver_traces.count(1) == 1);
    CHECK(rx.occupancy.receiver_traces.size() == 1);
    CHECK(rx.occupancy.sender_traces.empty());

    ScenarioConfig tx = parse_scenario_file(tmp.path / "sender-only" / "config.json");
    CHECK_FALSE(tx.occupancy.interference_loss);
    CHECK(tx.occupancy.sender_gate);
    REQUIRE(tx.occupancy.sender_traces.count(0) == 1);
    CHECK(tx.occupancy.receiver_traces.empty());

    ScenarioConfig both = parse_scenario_file(tmp.path / "both" / "config.json");
    CHECK(both.occupancy.interference_loss);
    CHECK(both.occupancy.sender_gate);
    CHECK(both.occupancy.receiver_traces.count(1) == 1);
    CHECK(both.occupancy.sender_traces.count(0) == 1);

    ScenarioConfig base = parse_scenario_file(tmp.path / "baseline" / "config.json");
    CHECK_FALSE(base.occupancy.interference_loss);
    CHECK_FALSE(base.occupancy.sender_gate);
    CHECK(base.occupancy.receiver_traces.empty());
    CHECK(base.occupancy.sender_traces.empty());

    for (ScenarioConfig* cfg : {&rx, &tx, &both, &base}) {
        CHECK(cfg->duration_s == kStaircaseDurationS);
        CHECK(cfg->num_nodes == 2);
        REQUIRE(cfg->flows.size() == 1);
        CHECK(cfg->flows[0].src == 0);
        CHECK(cfg->flows[0].dst == 1);
        CHECK(cfg->flows[0].type == FlowConfig::Type::Saturated);
        CHECK(cfg->flows[0].acked);
    }
}

TEST_CASE("bidirectional staircase binds both nodes") {
    TempDir tmp("cosim_preset_bidir_bind");
    run_staircase_variant(PresetVariant::Both, PresetFlow::Bidir, 5, tmp.path.string());
    ScenarioConfig cfg = parse_scenario_file(tmp.path / "both" / "config.json");
    REQUIRE(cfg.flows.size() == 2);
    CHECK(cfg.occupancy.receiver_traces.count(0) == 1);
    CHECK(cfg.occupancy.receiver_traces.count(1) == 1);
    CHECK(cfg.occupancy.sender_traces.count(0) == 1);
    CHECK(cfg.occupancy.sender_traces.count(1) == 1);
}

TEST_CASE("receiver-only staircase descends and recovers") {
    TempDir tmp("cosim_preset_rx_run");
    std::string run =
        run_staircase_variant(PresetVariant::ReceiverOnly, PresetFlow::AToB, 11,
                              tmp.path.string());
    std::vector<double> mbps = read_mbps(run, "0->1");
    REQUIRE(mbps.size() == 55);
    double t_max = mean_slice(mbps, 0, 5);
    CHECK(t_max > 28.0);
    // the 30% plateau sits in windows [15,20)
    CHECK(mean_slice(mbps, 15, 5) == doctest::Approx(0.7 * t_max).epsilon(0.10));
    // no sender trace bound: after the receiver ramp the flow runs clean
    CHECK(mean_slice(mbps, 30, 25) == doctest::Approx(t_max).epsilon(0.03));
}

TEST_CASE("sender-only staircase is clean until its ramp begins") {
    TempDir tmp("cosim_preset_tx_run");
    std::string run =
        run_staircase_variant(PresetVariant::SenderOnly, PresetFlow::AToB, 11,
                              tmp.path.string());
    std::vector<double> mbps = read_mbps(run, "0->1");
    REQUIRE(mbps.size() == 55);
    double t_max = mean_slice(mbps, 0, 5);
    CHECK(mean_slice(mbps, 0, 30) == doctest::Approx(t_max).epsilon(0.03));
    CHECK(mean_slice(mbps, 40, 5) == doctest::Approx(0.7 * t_max).epsilon(0.10));
}

TEST_CASE("staircase runs are deterministic per seed") {
    TempDir a("cosim_preset_det_a");
    TempDir b("cosim_preset_det_b");
    TempDir c("cosim_preset_det_c");
    std::string ra = run_staircase_variant(PresetVariant::Both, PresetFlow::AToB, 9,
                                           a.path.string());
    std::string rb = run_staircase_variant(PresetVariant::Both, PresetFlow::AToB, 9,
                                           b.path.string());
    std::string rc = run_staircase_variant(PresetVariant::Both, PresetFlow::AToB, 10,
                                           c.path.string());
    CHECK(slurp(fs::path(ra) / "throughput.csv") == slurp(fs::path(rb) / "throughput.csv"));
    CHECK(slurp(fs::path(ra) / "summary.csv") == slurp(fs::path(rb) / "summary.csv"));
    CHECK(slurp(a.path / "traces" / "receiver.csv") ==
          slurp(b.path / "traces" / "receiver.csv"));
    CHECK(slurp(fs::path(ra) / "throughput.csv") != slurp(fs::path(rc) / "throughput.csv"));
}

TEST_CASE("interference reference scenario shape") {
    ScenarioConfig cfg = interference_reference_config(PresetFlow::BToA, 3);
    CHECK(cfg.duration_s == kInterferenceDurationS);
    CHECK(cfg.seed == 3);
    CHECK(cfg.num_nodes == 4);
    CHECK(cfg.membership == std::vector<int>{0, 1});
    REQUIRE(cfg.deaf.size() == 4);
    for (auto [from, to] : {std::pair{2, 0}, {2, 1}, {3, 0}, {3, 1}})
        CHECK(std::count(cfg.deaf.begin(), cfg.deaf.end(), std::pair<int, int>{from, to}) == 1);
    CHECK(cfg.output.survey);
    CHECK_FALSE(cfg.occupancy.interference_loss);
    CHECK_FALSE(cfg.occupancy.sender_gate);

    REQUIRE(cfg.flows.size() == 2);
    CHECK(cfg.flows[0].src == 1);
    CHECK(cfg.flows[0].dst == 0);
    CHECK(cfg.flows[0].type == FlowConfig::Type::Saturated);

    const FlowConfig& noise = cfg.flows[1];
    CHECK(noise.src == 2);
    CHECK(noise.dst == 3);
    CHECK(noise.type == FlowConfig::Type::Cbr);
    CHECK_FALSE(noise.acked);
    int64_t air = data_airtime_us(noise.payload_bytes, noise.rate_mbps);
    REQUIRE(noise.schedule.size() == 5);
    for (int p = 1; p <= 5; ++p) {
        const auto& phase = noise.schedule[p - 1];
        CHECK(phase.start_s == doctest::Approx(5.0 * p));
        CHECK(phase.stop_s == doctest::Approx(5.0 * p + 5.0));
        // each phase holds the channel 10% longer than the one before
        CHECK(phase.frames_per_s * air * 1e-6 == doctest::Approx(0.1 * p).epsilon(1e-9));
    }
}

TEST_CASE("interference pipeline derives traces and runs all three legs") {
    TempDir tmp("cosim_preset_pipeline");
    std::string base =
        run_interference_flow(PresetFlow::AToB, PresetVariant::Both, 7, tmp.path.string());
    CHECK(fs::path(base) == tmp.path / "a-to-b");

    for (const char* leg : {"reference", "candidate", "baseline"}) {
        CHECK(fs::exists(fs::path(base) / leg / "throughput.csv"));
        CHECK(fs::exists(fs::path(base) / leg / "summary.csv"));
    }
    CHECK(fs::exists(fs::path(base) / "reference" / "survey.csv"));

    for (const char* name : {"node0.csv", "node1.csv"}) {
        BusyTrace trace = read_busy_trace_file((fs::path(base) / "traces" / name).string());
        REQUIRE(trace.samples.size() == 30);
        // quiet lead-in (up to 1 ms of counter rounding), then occupancy
        // climbing plateau over plateau
        for (int w = 0; w < 5; ++w) CHECK(trace.samples[w].co <= 0.001);
        for (int p = 1; p <= 5; ++p) {
            double plateau = 0;
            for (int w = 0; w < 5; ++w) plateau += trace.samples[5 * p + w].co / 5;
            double prev = 0;
            for (int w = 0; w < 5; ++w) prev += trace.samples[5 * (p - 1) + w].co / 5;
            CHECK(plateau > prev + 0.02);
        }
        CHECK(trace.samples.back().co > 0.25);
    }

    ScenarioConfig cand = parse_scenario_file(fs::path(base) / "candidate" / "config.json");
    CHECK(cand.num_nodes == 2);
    CHECK(cand.occupancy.interference_loss);
    CHECK(cand.occupancy.sender_gate);
    CHECK(cand.occupancy.receiver_traces == cand.occupancy.sender_traces);
    CHECK(cand.occupancy.receiver_traces.count(0) == 1);
    CHECK(cand.occupancy.receiver_traces.count(1) == 1);

    ScenarioConfig base_cfg = parse_scenario_file(fs::path(base) / "baseline" / "config.json");
    CHECK_FALSE(base_cfg.occupancy.interference_loss);
    CHECK_FALSE(base_cfg.occupancy.sender_gate);

    std::vector<double> ref = read_mbps(fs::path(base) / "reference", "0->1");
    std::vector<double> cnd = read_mbps(fs::path(base) / "candidate", "0->1");
    std::vector<double> bas = read_mbps(fs::path(base) / "baseline", "0->1");
    REQUIRE(ref.size() == 30);
    REQUIRE(cnd.size() == 30);
    REQUIRE(bas.size() == 30);
    // the baseline ignores the foreign traffic; reference and candidate lose
    // throughput to it, and track each other far better than the baseline does
    double ref_mean = mean_slice(ref, 0, 30);
    double cnd_mean = mean_slice(cnd, 0, 30);
    double bas_mean = mean_slice(bas, 0, 30);
    CHECK(bas_mean > 28.0);
    CHECK(ref_mean < 0.75 * bas_mean);
    CHECK(std::abs(cnd_mean - ref_mean) / ref_mean < 0.10);
    // quiet lead-in runs at full speed everywhere
    CHECK(mean_slice(ref, 0, 5) > 28.0);
    CHECK(mean_slice(cnd, 0, 5) > 28.0);
}

TEST_CASE("candidate variant selects the reproduction mechanisms") {
    TempDir tmp("cosim_preset_variant");
    std::string base = run_interference_flow(PresetFlow::AToB, PresetVariant::ReceiverOnly,
                                             7, tmp.path.string());
    ScenarioConfig cand = parse_scenario_file(fs::path(base) / "candidate" / "config.json");
    CHECK(cand.occupancy.interference_loss);
    CHECK_FALSE(cand.occupancy.sender_gate);
    CHECK(cand.occupancy.receiver_traces.size() == 2);
    CHECK(cand.occupancy.sender_traces.empty());
}
