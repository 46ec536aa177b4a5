#pragma once

#include <cstdint>
#include <optional>
#include <queue>
#include <stdexcept>
#include <variant>
#include <vector>

#include "wsnsim/bitstring.hpp"

namespace wsnsim {

// ============================================================================
// Event queue
// ============================================================================
//
// Deterministic discrete-event core. Events are ordered by (timestamp,
// insertion sequence): the sequence number breaks timestamp ties in FIFO
// order, so two events scheduled for the same instant dispatch in the order
// they were scheduled, on every platform, every run.

using NodeId = int;

struct AppSend {
    std::vector<std::uint8_t> payload;
};

struct FrameArrival {
    Bitstring bits;
    NodeId from;
};

enum class TimerKind { TxAirDone, AckTimeout };

struct TimerExpiry {
    TimerKind kind;
    std::uint64_t id; // matched against the node's live timer; stale ids are ignored
};

struct TransitionComplete {};

using EventAction = std::variant<AppSend, FrameArrival, TimerExpiry, TransitionComplete>;

struct SimEvent {
    double time_s;
    std::uint64_t seq;
    NodeId node;
    EventAction action;
};

class EventQueue {
public:
    void schedule(double time_s, NodeId node, EventAction action) {
        if (time_s < last_popped_)
            throw std::logic_error("EventQueue: scheduling into the past");
        heap_.push(SimEvent{time_s, next_seq_++, node, std::move(action)});
    }

    std::optional<SimEvent> pop() {
        if (heap_.empty()) return std::nullopt;
        SimEvent e = heap_.top();
        heap_.pop();
        last_popped_ = e.time_s;
        return e;
    }

    bool empty() const { return heap_.empty(); }
    std::size_t size() const { return heap_.size(); }
    double now() const { return last_popped_; }

private:
    struct Later {
        bool operator()(const SimEvent& a, const SimEvent& b) const {
            if (a.time_s != b.time_s) return a.time_s > b.time_s;
            return a.seq > b.seq;
        }
    };

    std::priority_queue<SimEvent, std::vector<SimEvent>, Later> heap_;
    std::uint64_t next_seq_ = 0;
    double last_popped_ = 0.0;
};

} // namespace wsnsim
