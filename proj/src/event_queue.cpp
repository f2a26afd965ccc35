#include "cosim/event_queue.hpp"

#include <string>

#include "cosim/errors.hpp"

namespace cosim {

void EventQueue::push(Event e) {
    if (e.time_us < last_popped_us_)
        throw RuntimeError("event scheduled in the past: " + std::to_string(e.time_us) +
                           " us before " + std::to_string(last_popped_us_) + " us");
    e.seq = next_seq_++;
    heap_.push(e);
}

Event EventQueue::pop() {
    if (heap_.empty())
        throw RuntimeError("pop from an empty event queue");
    Event e = heap_.top();
    heap_.pop();
    last_popped_us_ = e.time_us;
    return e;
}

}  // namespace cosim
