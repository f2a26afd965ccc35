#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <utility>
#include <vector>

#include "cosim/occupancy.hpp"
#include "cosim/random_stream.hpp"

namespace cosim {

struct LinkContext {
    int src = 0;
    int dst = 0;
    int64_t t_us = 0;
};

// One stage of the propagation chain. Elements see the power produced by the
// previous stage and return what the next one (or the receiver) sees.
class LossElement {
public:
    virtual ~LossElement() = default;
    virtual double apply(double power_dbm, const LinkContext& ctx) = 0;
};

// Attenuates every link by a fixed amount, chosen so a frame sent at the
// configured transmit power arrives at noise_floor + snr. Expressing the
// link quality as an attenuation keeps the element transparent to whatever
// power adjustments the rest of the chain makes.
class FixedSnrElement : public LossElement {
public:
    FixedSnrElement(double snr_db, double noise_floor_dbm, double tx_power_dbm);
    double apply(double power_dbm, const LinkContext& ctx) override;

private:
    double attenuation_db_;
};

// Free-space path loss for a fixed node spacing and carrier frequency.
class FriisElement : public LossElement {
public:
    FriisElement(double distance_m, double frequency_hz);
    double apply(double power_dbm, const LinkContext& ctx) override;

    double attenuation_db() const { return attenuation_db_; }

private:
    double attenuation_db_;
};

// Replays recorded link quality: per directed link, one SNR sample per
// second, held flat within the second and past the end of the trace.
class SnrTraceElement : public LossElement {
public:
    SnrTraceElement(std::map<std::pair<int, int>, std::vector<double>> snr_by_link,
                    double noise_floor_dbm, double tx_power_dbm);
    double apply(double power_dbm, const LinkContext& ctx) override;

private:
    std::map<std::pair<int, int>, std::vector<double>> snr_by_link_;
    double noise_floor_dbm_;
    double tx_power_dbm_;
};

// The occupancy gate at the receiving node: with probability co(dst, t) the
// frame arrives at a power nothing can decode, otherwise it passes through
// untouched. Draws come from the destination node's receiver-gate stream so
// runs replay exactly under the same seed.
class InterferenceElement : public LossElement {
public:
    using DecisionSink = std::function<void(const LinkContext&, const GateDecision&)>;

    InterferenceElement(const OccupancyRegistry* registry,
                        std::map<int, RandomStream>* streams,
                        DecisionSink on_decision = {});
    double apply(double power_dbm, const LinkContext& ctx) override;

private:
    const OccupancyRegistry* registry_;
    std::map<int, RandomStream>* streams_;
    DecisionSink on_decision_;
};

class LossChain {
public:
    void add(std::unique_ptr<LossElement> element);
    size_t size() const { return elements_.size(); }

    // Left-to-right fold of the chain over the transmit power.
    double propagate(double tx_power_dbm, const LinkContext& ctx);

private:
    std::vector<std::unique_ptr<LossElement>> elements_;
};

}  // namespace cosim
