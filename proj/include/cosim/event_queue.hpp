#pragma once

#include <cstdint>
#include <queue>
#include <vector>

namespace cosim {

enum class EventKind {
    TxStart,
    TxEnd,
    RxDecide,
    AckTimeout,
    BackoffExpire,
    AppEnqueue,
    MeterTick,
    ContendStart,
};

struct Event {
    int64_t time_us = 0;
    uint64_t seq = 0;  // stamped by the queue at push time
    EventKind kind = EventKind::MeterTick;
    int node = -1;         // acting node, where the kind needs one
    uint64_t frame_id = 0; // in-flight transmission, for Tx*/RxDecide
    uint64_t epoch = 0;    // staleness guard for cancellable timers
    int flow = -1;         // for AppEnqueue
};

// Min-heap on (time, seq): equal-time events pop in push order, which is what
// makes runs replayable and same-instant MAC decisions well defined.
class EventQueue {
public:
    void push(Event e);
    Event pop();
    bool empty() const { return heap_.empty(); }
    size_t size() const { return heap_.size(); }

private:
    struct Later {
        bool operator()(const Event& a, const Event& b) const {
            if (a.time_us != b.time_us)
                return a.time_us > b.time_us;
            return a.seq > b.seq;
        }
    };

    std::priority_queue<Event, std::vector<Event>, Later> heap_;
    uint64_t next_seq_ = 0;
    int64_t last_popped_us_ = 0;
};

}  // namespace cosim
