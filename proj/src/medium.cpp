#include "cosim/medium.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cosim/errors.hpp"

namespace cosim {

Medium::Medium(int num_nodes)
    : num_nodes_(num_nodes),
      busy_count_(num_nodes, 0),
      idle_since_(num_nodes, 0),
      busy_since_(num_nodes, 0) {
    if (num_nodes <= 0)
        throw ValidationError("medium needs at least one node");
}

void Medium::set_deaf(int listener, int talker) {
    if (listener < 0 || listener >= num_nodes_ || talker < 0 || talker >= num_nodes_)
        throw ValidationError("deaf pair names an unknown node");
    if (listener == talker)
        throw ValidationError("a node cannot be deaf to itself");
    deaf_.insert({listener, talker});
}

bool Medium::senses(int listener, int talker) const {
    if (listener == talker)
        return true;
    return !deaf_.count({listener, talker});
}

std::vector<int> Medium::tx_begin(uint64_t id, int src, int64_t now_us) {
    if (src < 0 || src >= num_nodes_)
        throw RuntimeError("transmission from unknown node " + std::to_string(src));
    if (index_by_id_.count(id))
        throw RuntimeError("duplicate transmission id");

    TxRecord rec;
    rec.id = id;
    rec.src = src;
    rec.start_us = now_us;

    // Anything already up overlaps the newcomer, and vice versa.
    for (auto& [other_id, idx] : in_flight_) {
        records_[idx].overlap_srcs.push_back(src);
        rec.overlap_srcs.push_back(records_[idx].src);
    }

    records_.push_back(std::move(rec));
    size_t idx = records_.size() - 1;
    in_flight_[id] = idx;
    index_by_id_[id] = idx;

    std::vector<int> went_busy;
    for (int n = 0; n < num_nodes_; ++n) {
        if (!senses(n, src))
            continue;
        if (busy_count_[n]++ == 0) {
            busy_since_[n] = now_us;
            went_busy.push_back(n);
        }
    }
    return went_busy;
}

std::vector<int> Medium::tx_end(uint64_t id, int64_t now_us) {
    auto it = in_flight_.find(id);
    if (it == in_flight_.end())
        throw RuntimeError("ending a transmission that is not in flight");
    TxRecord& rec = records_[it->second];
    rec.end_us = now_us;
    int src = rec.src;
    in_flight_.erase(it);

    std::vector<int> went_idle;
    for (int n = 0; n < num_nodes_; ++n) {
        if (!senses(n, src))
            continue;
        if (--busy_count_[n] == 0) {
            idle_since_[n] = now_us;
            went_idle.push_back(n);
        }
        if (busy_count_[n] < 0)
            throw RuntimeError("busy count underflow");
    }
    return went_idle;
}

bool Medium::busy_for(int node) const { return busy_count_.at(node) > 0; }

int64_t Medium::idle_since(int node) const { return idle_since_.at(node); }

int64_t Medium::busy_since(int node) const { return busy_since_.at(node); }

const TxRecord& Medium::record_of(uint64_t id) const {
    auto it = index_by_id_.find(id);
    if (it == index_by_id_.end())
        throw RuntimeError("unknown transmission id");
    return records_[it->second];
}

bool Medium::interfered_at(int dst, uint64_t id) const {
    const TxRecord& rec = record_of(id);
    for (int src : rec.overlap_srcs)
        if (senses(dst, src))
            return true;
    return false;
}

std::vector<SurveySample> Medium::survey(int64_t duration_us, int64_t window_ms) const {
    if (duration_us < 0 || window_ms <= 0)
        throw ValidationError("survey needs a non-negative duration and positive window");
    int64_t window_us = window_ms * 1000;
    int64_t windows = duration_us / window_us;  // whole windows only

    std::vector<SurveySample> out;
    for (int node = 0; node < num_nodes_; ++node) {
        // Gather the intervals this node senses, clipped to the run.
        std::vector<std::pair<int64_t, int64_t>> sensed, own;
        for (const TxRecord& rec : records_) {
            int64_t end = rec.end_us < 0 ? duration_us : std::min(rec.end_us, duration_us);
            if (end <= rec.start_us)
                continue;
            if (senses(node, rec.src))
                sensed.emplace_back(rec.start_us, end);
            if (rec.src == node)
                own.emplace_back(rec.start_us, end);
        }
        auto merge = [](std::vector<std::pair<int64_t, int64_t>>& ivals) {
            std::sort(ivals.begin(), ivals.end());
            std::vector<std::pair<int64_t, int64_t>> merged;
            for (auto& iv : ivals) {
                if (!merged.empty() && iv.first <= merged.back().second)
                    merged.back().second = std::max(merged.back().second, iv.second);
                else
                    merged.push_back(iv);
            }
            ivals = std::move(merged);
        };
        merge(sensed);
        merge(own);  // a node never overlaps itself, but keep the code uniform

        auto clipped_sum = [](const std::vector<std::pair<int64_t, int64_t>>& ivals,
                              int64_t lo, int64_t hi) {
            int64_t total = 0;
            for (const auto& [s, e] : ivals) {
                int64_t a = std::max(s, lo), b = std::min(e, hi);
                if (b > a)
                    total += b - a;
            }
            return total;
        };

        for (int64_t w = 0; w < windows; ++w) {
            int64_t lo = w * window_us, hi = lo + window_us;
            SurveySample s;
            s.node = node;
            s.window_start_ms = w * window_ms;
            s.active_ms = window_ms;
            s.busy_total_ms = llround(clipped_sum(sensed, lo, hi) / 1000.0);
            s.tx_ms = llround(clipped_sum(own, lo, hi) / 1000.0);
            out.push_back(s);
        }
    }
    return out;
}

}  // namespace cosim
