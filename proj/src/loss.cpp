#include "cosim/loss.hpp"

#include <cmath>
#include <string>

#include "cosim/errors.hpp"

namespace cosim {

FixedSnrElement::FixedSnrElement(double snr_db, double noise_floor_dbm,
                                 double tx_power_dbm)
    : attenuation_db_(tx_power_dbm - (noise_floor_dbm + snr_db)) {
    if (snr_db < 0.0)
        throw ValidationError("fixed SNR must be non-negative");
}

double FixedSnrElement::apply(double power_dbm, const LinkContext&) {
    return power_dbm - attenuation_db_;
}

FriisElement::FriisElement(double distance_m, double frequency_hz) {
    if (distance_m <= 0.0 || frequency_hz <= 0.0)
        throw ValidationError("Friis element needs positive distance and frequency");
    constexpr double kSpeedOfLight = 299792458.0;
    constexpr double kPi = 3.14159265358979323846;
    attenuation_db_ = 20.0 * std::log10(distance_m) + 20.0 * std::log10(frequency_hz) +
                      20.0 * std::log10(4.0 * kPi / kSpeedOfLight);
}

double FriisElement::apply(double power_dbm, const LinkContext&) {
    return power_dbm - attenuation_db_;
}

SnrTraceElement::SnrTraceElement(
    std::map<std::pair<int, int>, std::vector<double>> snr_by_link,
    double noise_floor_dbm, double tx_power_dbm)
    : snr_by_link_(std::move(snr_by_link)),
      noise_floor_dbm_(noise_floor_dbm),
      tx_power_dbm_(tx_power_dbm) {
    for (const auto& [link, samples] : snr_by_link_)
        if (samples.empty())
            throw ValidationError("empty SNR trace for link " +
                                  std::to_string(link.first) + "->" +
                                  std::to_string(link.second));
}

double SnrTraceElement::apply(double power_dbm, const LinkContext& ctx) {
    auto it = snr_by_link_.find({ctx.src, ctx.dst});
    if (it == snr_by_link_.end())
        throw RuntimeError("no SNR trace for link " + std::to_string(ctx.src) + "->" +
                           std::to_string(ctx.dst));
    const std::vector<double>& samples = it->second;
    size_t idx = ctx.t_us < 0 ? 0 : static_cast<size_t>(ctx.t_us / 1'000'000);
    if (idx >= samples.size())
        idx = samples.size() - 1;
    double attenuation = tx_power_dbm_ - (noise_floor_dbm_ + samples[idx]);
    return power_dbm - attenuation;
}

InterferenceElement::InterferenceElement(const OccupancyRegistry* registry,
                                         std::map<int, RandomStream>* streams,
                                         DecisionSink on_decision)
    : registry_(registry), streams_(streams), on_decision_(std::move(on_decision)) {
    if (!registry_ || !streams_)
        throw ValidationError("interference element needs a registry and streams");
}

double InterferenceElement::apply(double power_dbm, const LinkContext& ctx) {
    double co = registry_->occupancy_at(ctx.dst, ctx.t_us);
    auto it = streams_->find(ctx.dst);
    if (it == streams_->end())
        throw RuntimeError("no receiver gate stream for node " +
                           std::to_string(ctx.dst));
    double draw = it->second.draw();
    GateDecision decision{draw, co,
                          draw < co ? GateOutcome::Blocked : GateOutcome::Forward};
    if (on_decision_)
        on_decision_(ctx, decision);
    return receiver_rx_power(power_dbm, co, draw);
}

void LossChain::add(std::unique_ptr<LossElement> element) {
    elements_.push_back(std::move(element));
}

double LossChain::propagate(double tx_power_dbm, const LinkContext& ctx) {
    double power = tx_power_dbm;
    for (auto& element : elements_)
        power = element->apply(power, ctx);
    return power;
}

}  // namespace cosim
