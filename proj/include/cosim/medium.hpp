#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <vector>

#include "cosim/survey.hpp"

namespace cosim {

// One transmission's life on the air. end_us stays at -1 while in flight.
struct TxRecord {
    uint64_t id = 0;
    int src = -1;
    int64_t start_us = 0;
    int64_t end_us = -1;
    std::vector<int> overlap_srcs;  // sources whose transmissions overlapped this one
};

// The shared channel: who hears whom, which transmissions are up right now,
// and the full transmission history for occupancy accounting.
//
// Sensing is directional: a (listener, talker) pair can be marked deaf, in
// which case the talker's transmissions neither show up in the listener's
// carrier sense nor interfere with receptions at the listener. Every node
// always senses itself.
class Medium {
public:
    explicit Medium(int num_nodes);

    void set_deaf(int listener, int talker);
    bool senses(int listener, int talker) const;

    // Opens a transmission. Returns the listeners whose sensed medium went
    // from idle to busy (the source included, nodes deaf to it excluded).
    std::vector<int> tx_begin(uint64_t id, int src, int64_t now_us);

    // Closes it. Returns the listeners whose sensed medium went idle.
    std::vector<int> tx_end(uint64_t id, int64_t now_us);

    bool busy_for(int node) const;
    // When the node's sensed medium last went idle. Valid while !busy_for.
    int64_t idle_since(int node) const;
    // When it last went busy. Valid while busy_for.
    int64_t busy_since(int node) const;

    // True if any transmission the destination senses (or one of its own)
    // overlapped this one in time. No capture: any overlap ruins reception.
    bool interfered_at(int dst, uint64_t id) const;

    const std::vector<TxRecord>& history() const { return records_; }

    // Per-node busy accounting over fixed windows, shaped like the counters a
    // wireless card reports: for every node and every whole window,
    // busy_total_ms is the union of all sensed transmissions (own included)
    // clipped to the window, tx_ms the node's own share.
    std::vector<SurveySample> survey(int64_t duration_us, int64_t window_ms = 1000) const;

private:
    const TxRecord& record_of(uint64_t id) const;

    int num_nodes_;
    std::set<std::pair<int, int>> deaf_;      // (listener, talker)
    std::vector<TxRecord> records_;
    std::map<uint64_t, size_t> in_flight_;    // id -> index into records_
    std::map<uint64_t, size_t> index_by_id_;  // all records
    std::vector<int> busy_count_;
    std::vector<int64_t> idle_since_;
    std::vector<int64_t> busy_since_;
};

}  // namespace cosim
