#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "cosim/busy_trace.hpp"
#include "cosim/errors.hpp"
#include "cosim/mac.hpp"
#include "cosim/preset.hpp"
#include "cosim/report.hpp"
#include "cosim/scenario.hpp"
#include "cosim/survey.hpp"

namespace {

namespace fs = std::filesystem;
using namespace cosim;

void write_trace_output(const BusyTrace& trace, const std::string& out_path) {
    if (out_path.empty()) {
        write_busy_trace(trace, std::cout);
        return;
    }
    write_busy_trace_file(trace, out_path);
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw RuntimeError("cannot write " + path);
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Shared wireless medium simulator driven by channel occupancy traces"};
    app.require_subcommand(1);

    // sim run / sim preset
    CLI::App* sim = app.add_subcommand("sim", "Run simulations");
    sim->require_subcommand(1);

    std::string run_config, run_out = "out";
    uint64_t run_seed = 0;
    CLI::App* run = sim->add_subcommand("run", "Simulate one scenario config");
    run->add_option("--config", run_config, "Scenario JSON file")->required();
    CLI::Option* run_seed_opt =
        run->add_option("--seed", run_seed, "Override the seed in the config");
    run->add_option("--out", run_out, "Output directory (default: out)");
    run->callback([&] {
        ScenarioConfig cfg = parse_scenario_file(run_config);
        if (run_seed_opt->count() > 0)
            cfg.seed = run_seed;
        run_scenario(cfg, run_out);
    });

    std::string preset_name, preset_variant, preset_flow, preset_out = "out";
    uint64_t preset_seed = 1;
    CLI::App* preset = sim->add_subcommand("preset", "Run a packaged experiment");
    preset->add_option("name", preset_name, "Experiment name")
        ->required()
        ->check(CLI::IsMember({"synthetic-staircase", "controlled-interference"}));
    preset->add_option("--variant", preset_variant,
                       "receiver-only, sender-only, both or baseline "
                       "(staircase default: all four; interference default: both)");
    preset->add_option("--flow", preset_flow,
                       "a-to-b, b-to-a or bidir "
                       "(staircase default: a-to-b; interference default: all three)");
    preset->add_option("--seed", preset_seed, "Run seed (default: 1)");
    preset->add_option("--out", preset_out, "Output directory (default: out)");
    preset->callback([&] {
        if (preset_name == "synthetic-staircase") {
            PresetFlow flow =
                preset_flow.empty() ? PresetFlow::AToB : parse_preset_flow(preset_flow);
            if (preset_variant.empty())
                run_staircase_preset(flow, preset_seed, preset_out);
            else
                run_staircase_variant(parse_variant(preset_variant), flow, preset_seed,
                                      preset_out);
        } else {
            PresetVariant variant =
                preset_variant.empty() ? PresetVariant::Both : parse_variant(preset_variant);
            if (preset_flow.empty())
                run_interference_preset(variant, preset_seed, preset_out);
            else
                run_interference_flow(parse_preset_flow(preset_flow), variant, preset_seed,
                                      preset_out);
        }
    });

    // trace derive / trace synth
    CLI::App* trace = app.add_subcommand("trace", "Occupancy trace utilities");
    trace->require_subcommand(1);

    std::string derive_survey, derive_out;
    int derive_node = 0;
    std::vector<int> derive_members;
    CLI::App* derive = trace->add_subcommand(
        "derive", "Derive a node's occupancy trace from a survey counter log");
    derive->add_option("--survey", derive_survey, "survey.csv from a run")->required();
    derive->add_option("--node", derive_node, "Node whose occupancy to derive")->required();
    derive->add_option("--members", derive_members, "Nodes of the node's own network")
        ->required()
        ->delimiter(',');
    derive->add_option("--out", derive_out, "Output file (default: stdout)");
    derive->callback([&] {
        std::ifstream in(derive_survey);
        if (!in)
            throw RuntimeError("cannot read " + derive_survey);
        std::vector<SurveySample> log = parse_survey_log(in);
        NetworkMembership members;
        members.nodes.insert(derive_members.begin(), derive_members.end());
        write_trace_output(derive_busy_trace(log, derive_node, members), derive_out);
    });

    std::string synth_out;
    StaircaseSpec synth_spec;
    CLI::App* synth = trace->add_subcommand("synth", "Synthesize a staircase trace");
    synth->add_option("--start", synth_spec.start, "First plateau occupancy (default: 0)");
    synth->add_option("--step", synth_spec.step, "Increment per plateau (default: 0.1)");
    synth->add_option("--plateau", synth_spec.plateau_windows,
                      "Windows per plateau (default: 5)");
    synth->add_option("--max", synth_spec.max, "Last plateau occupancy (default: 0.5)");
    synth->add_flag("--reset", synth_spec.reset, "Append a zero plateau at the end");
    synth->add_option("--out", synth_out, "Output file (default: stdout)");
    synth->callback([&] { write_trace_output(synth_staircase(synth_spec), synth_out); });

    // report table1 / report plotdata
    CLI::App* report = app.add_subcommand("report", "Summarize experiment outputs");
    report->require_subcommand(1);

    std::string table_in, table_out = "summary.csv";
    CLI::App* table1 = report->add_subcommand(
        "table1", "Reference/candidate/baseline comparison over the interference flows");
    table1->add_option("--in", table_in, "controlled-interference output directory")
        ->required();
    table1->add_option("--out", table_out, "Output CSV (default: summary.csv)");
    table1->callback([&] {
        std::vector<std::string> flows = {"a-to-b", "b-to-a", "bidir"};
        std::vector<ComparisonRow> rows = collect_comparison_rows(table_in, flows);
        std::ofstream out = open_output(table_out);
        write_comparison_table(out, rows);
    });

    std::string plot_in, plot_out = "plotdata.csv";
    CLI::App* plotdata = report->add_subcommand(
        "plotdata", "Merge staircase variant series into one long-format CSV");
    plotdata->add_option("--in", plot_in, "synthetic-staircase output directory")->required();
    plotdata->add_option("--out", plot_out, "Output CSV (default: plotdata.csv)");
    plotdata->callback([&] {
        std::vector<std::string> variants;
        for (PresetVariant v : all_variants()) {
            if (fs::exists(fs::path(plot_in) / variant_name(v) / "throughput.csv"))
                variants.push_back(variant_name(v));
        }
        if (variants.empty())
            throw ValidationError("no variant runs under " + plot_in);
        std::ofstream out = open_output(plot_out);
        write_plotdata(out, plot_in, variants);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const RuntimeError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
