#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cosim/scenario.hpp"

namespace cosim {

/// Which reproduction mechanisms a preset run enables.
enum class PresetVariant { ReceiverOnly, SenderOnly, Both, Baseline };

/// Traffic direction between the two reproduced nodes (0 = a, 1 = b).
enum class PresetFlow { AToB, BToA, Bidir };

PresetVariant parse_variant(const std::string& name);
PresetFlow parse_preset_flow(const std::string& name);
std::string variant_name(PresetVariant variant);
std::string preset_flow_name(PresetFlow flow);
const std::vector<PresetVariant>& all_variants();
const std::vector<PresetFlow>& all_preset_flows();

/// Staircase test timeline, in 1 s windows: the occupancy at the receiving
/// node climbs 0 -> 50% in 10% plateaus of 5 windows over [0,30), resets to
/// zero for [30,35), and the sending node's occupancy then climbs the same
/// plateaus over [30,55). One plateau is always zero at any instant, so each
/// mechanism is observed alone.
inline constexpr int64_t kStaircaseDurationS = 55;
inline constexpr int64_t kStaircasePlateauWindows = 5;
inline constexpr int kStaircaseSteps = 5;  // plateaus above zero, 10% apart

/// First window of the plateau where the receiving node sees co = 0.1*step
/// (step 0 is the leading zero plateau).
int64_t receiver_plateau_start(int step);
/// First window of the plateau where the sending node sees co = 0.1*step
/// (step >= 1; the sender's zero plateau is the whole receiver phase).
int64_t sender_plateau_start(int step);

/// Materializes the staircase traces under out_dir/traces and runs one
/// variant into out_dir/<variant>. Returns that run directory.
std::string run_staircase_variant(PresetVariant variant, PresetFlow flow,
                                  uint64_t seed, const std::string& out_dir);

/// All four variants side by side (shared traces).
void run_staircase_preset(PresetFlow flow, uint64_t seed, const std::string& out_dir);

/// Interference experiment timeline: 30 s, with a foreign node pair whose
/// traffic steps through 0%, 10%, ..., 50% occupancy in 5 s plateaus.
inline constexpr int64_t kInterferenceDurationS = 30;
inline constexpr int64_t kInterferencePlateauWindows = 5;

/// Builds the 4-node reference scenario for one flow configuration: the
/// reproduced pair (0, 1) plus a foreign pair (2, 3) that never defers to
/// them, with survey collection on.
ScenarioConfig interference_reference_config(PresetFlow flow, uint64_t seed);

/// Full pipeline for one flow configuration under out_dir/<flow>: run the
/// reference, derive per-node occupancy traces from its survey, run the
/// trace-driven candidate with the variant's mechanisms, and run the
/// occupancy-free baseline. Returns the flow directory.
std::string run_interference_flow(PresetFlow flow, PresetVariant candidate_variant,
                                  uint64_t seed, const std::string& out_dir);

/// All three flow configurations.
void run_interference_preset(PresetVariant candidate_variant, uint64_t seed,
                             const std::string& out_dir);

}  // namespace cosim
