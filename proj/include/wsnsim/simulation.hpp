#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "wsnsim/channel.hpp"
#include "wsnsim/energy.hpp"
#include "wsnsim/events.hpp"
#include "wsnsim/packet.hpp"
#include "wsnsim/radio.hpp"
#include "wsnsim/rng.hpp"
#include "wsnsim/shockburst.hpp"

namespace wsnsim {

// ============================================================================
// Event-driven network simulation
// ============================================================================
//
// One receiver-role node (node 0, all six pipes open, receiver always on)
// and up to six transmitter-role nodes (nodes 1..n, one per pipe). Each PTX
// sleeps in PowerDown between application sends and walks the full radio
// timeline for every frame: crystal start-up, PLL lock, burst, PLL lock the
// other way, acknowledgement window, back to sleep.
//
// Modeling notes, in decreasing order of likely surprise:
//   - No medium contention: each PTX-PRX link is its own channel, and
//     overlapping frames do not collide. Corruption comes only from the
//     per-link BER model.
//   - Bit errors apply to both legs; outright frame loss is expressed as a
//     BER high enough to trip the CRC, not as a separate drop process.
//   - The PRX is treated as an always-powered hub: its acknowledgement
//     turnaround takes one PLL-lock time, but its charge ledger bills the
//     receive current throughout.
//   - A transaction that exhausts its retransmissions is flushed so the
//     queue keeps moving (the synchronous ptx_transaction instead leaves the
//     frame parked, matching a halted transmitter awaiting its MCU).
//   - Every charge segment is recorded, so tests can re-add the ledger and
//     compare against the closed-form duty-cycle model.

struct SimulationConfig {
    PacketConfig packet;
    RetransmitPolicy policy;
    ChannelParams channel; // link budget; range comes from ranges_m below, TX power from tx_level
    BerModel ber = BerModel::fixed(0.0);
    CurrentProfile currents = CurrentProfile::system_default();
    TimingProfile timings;
    TxPowerLevel tx_level = TxPowerLevel::Dbm0;

    int num_ptx = 1;                        // 1..6, one pipe each
    int packets_per_node = 1;
    std::size_t payload_bytes = 1;          // 1..32
    bool auto_ack = true;                   // false => frames fly NO_ACK
    double first_send_s = 0.01;
    double send_interval_s = 0.01;
    std::vector<double> ranges_m;           // per PTX; empty = channel.range_m for all
    double min_duration_s = 0.0;            // extend the charge ledger at least this far
    bool record_trace = true;

    std::uint64_t seed = 0;                 // must be set explicitly

    void validate() const {
        packet.validate();
        policy.validate();
        channel.validate();
        timings.validate();
        currents.validate();
        if (num_ptx < 1 || num_ptx > PipeId::kCount)
            throw std::invalid_argument("SimulationConfig: num_ptx must be 1..6");
        if (packets_per_node < 0)
            throw std::invalid_argument("SimulationConfig: negative packets_per_node");
        if (payload_bytes < 1 || payload_bytes > kMaxPayloadBytes)
            throw std::invalid_argument("SimulationConfig: payload must be 1..32 bytes");
        if (!(first_send_s >= 0) || !(send_interval_s > 0))
            throw std::invalid_argument("SimulationConfig: send schedule must move forward");
        if (!ranges_m.empty() && ranges_m.size() != static_cast<std::size_t>(num_ptx))
            throw std::invalid_argument("SimulationConfig: ranges_m must be empty or one per PTX");
        if (min_duration_s < 0)
            throw std::invalid_argument("SimulationConfig: negative min_duration");
    }
};

struct TraceRecord {
    double time_s;
    NodeId node;
    std::string kind;
    std::string detail;
};

// One closed interval of constant current draw on one node.
struct ChargeSegment {
    NodeId node;
    double start_s;
    double duration_s;
    double current_mA;
    std::string label;
};

struct NodeResult {
    NodeId node;
    LinkRole role;
    LinkStats stats;
    double charge_mAs = 0;
    double average_current_mA = 0;
};

// A payload reaching the receiving application.
struct RxLogEntry {
    double time_s;
    int pipe;
    std::vector<std::uint8_t> payload;
};

struct SimulationResult {
    double end_time_s = 0;
    std::vector<NodeResult> nodes; // index 0 = PRX, then PTX 1..n
    std::vector<RxLogEntry> rx_log;
    std::vector<TraceRecord> trace;
    std::vector<ChargeSegment> segments;
};

namespace detail {

// Timeout margin after the expected acknowledgement instant; covers the PRX
// turnaround model exactly, with slack so "on time" never races the timer.
constexpr double kAckGuard_s = 25e-6;

enum class PtxPhase { Idle, PoweringUp, LockingTx, Transmitting, LockingRx, Listening, RetransmitWait };
enum class PrxPhase { PoweringUp, LockingRx, Listening };

struct SimNode {
    std::optional<LinkEndpoint> endpoint;
    std::optional<RadioStateMachine> radio;
    SplitMix64 link_rng{0}; // corruption stream for this node's link to the hub
    double ber = 0.0;

    PtxPhase ptx_phase = PtxPhase::Idle;
    PrxPhase prx_phase = PrxPhase::PoweringUp;
    int attempt = 0;
    std::uint64_t live_timer = 0;

    // Open charge segment.
    double seg_start_s = 0.0;
    double seg_current_mA = 0.0;
    std::string seg_label;
};

class Simulation {
public:
    explicit Simulation(const SimulationConfig& cfg) : cfg_(cfg) {
        cfg_.validate();
        if (cfg_.seed == 0)
            throw std::invalid_argument("SimulationConfig: an explicit nonzero seed is required");
    }

    SimulationResult run() {
        setup();
        while (auto e = queue_.pop()) {
            // A cancelled timer is a husk: it must neither act nor advance the
            // clock, or an ACK that already arrived would still stretch the
            // run (and the final sleep ledger) out to its dead timeout.
            if (is_cancelled(*e)) continue;
            now_ = e->time_s;
            dispatch(*e);
        }
        const double end = std::max(now_, cfg_.min_duration_s);
        for (NodeId id = 0; id <= num_ptx(); ++id) close_segment(id, end);
        finish(end);
        return std::move(result_);
    }

private:
    int num_ptx() const { return cfg_.num_ptx; }
    SimNode& node(NodeId id) { return nodes_[static_cast<std::size_t>(id)]; }

    // --- setup ---------------------------------------------------------------

    void setup() {
        SplitMix64 root(cfg_.seed);
        nodes_.resize(static_cast<std::size_t>(num_ptx()) + 1);
        const PipeAddressSet pipes = PipeAddressSet::defaults(cfg_.packet.address_width);

        // Node 0: the hub. Receiver comes up at t = 0.
        SimNode& prx = node(0);
        prx.endpoint = LinkEndpoint::make_prx(pipes, cfg_.packet);
        prx.radio.emplace(cfg_.currents, cfg_.timings, cfg_.tx_level);
        const Transition up = prx.radio->apply_command(RadioCommand::SetPwrUp);
        open_segment(0, 0.0, up.transit_current_mA, "power-up");
        queue_.schedule(up.duration_s, 0, TransitionComplete{});

        // Nodes 1..n: one transmitter per pipe, asleep until the first send.
        for (NodeId id = 1; id <= num_ptx(); ++id) {
            SimNode& n = node(id);
            n.endpoint = LinkEndpoint::make_ptx(pipes.address(PipeId(id - 1)), cfg_.packet);
            n.radio.emplace(cfg_.currents, cfg_.timings, cfg_.tx_level);
            n.link_rng = root.split();
            ChannelParams link = cfg_.channel;
            if (!cfg_.ranges_m.empty()) link.range_m = cfg_.ranges_m[static_cast<std::size_t>(id - 1)];
            link.tx_power_dbm = tx_power_dbm(cfg_.tx_level);
            n.ber = cfg_.ber.ber_at_margin(link_margin_db(link));
            open_segment(id, 0.0, n.radio->current_mA(), "power-down");

            for (int k = 0; k < cfg_.packets_per_node; ++k) {
                std::vector<std::uint8_t> payload(cfg_.payload_bytes);
                for (std::size_t j = 0; j < payload.size(); ++j)
                    payload[j] = static_cast<std::uint8_t>(id * 31 + k * 7 + j);
                queue_.schedule(cfg_.first_send_s + k * cfg_.send_interval_s, id,
                                AppSend{std::move(payload)});
            }
        }
    }

    // --- event dispatch --------------------------------------------------------

    bool is_cancelled(const SimEvent& e) {
        const auto* timer = std::get_if<TimerExpiry>(&e.action);
        return timer && timer->id != node(e.node).live_timer;
    }

    void dispatch(const SimEvent& e) {
        if (const auto* send = std::get_if<AppSend>(&e.action)) {
            on_app_send(e.node, *send);
        } else if (const auto* arrival = std::get_if<FrameArrival>(&e.action)) {
            if (e.node == 0)
                on_prx_frame(*arrival);
            else
                on_ptx_frame(e.node, *arrival);
        } else if (const auto* timer = std::get_if<TimerExpiry>(&e.action)) {
            on_timer(e.node, *timer);
        } else {
            on_transition_complete(e.node);
        }
    }

    void on_app_send(NodeId id, const AppSend& send) {
        SimNode& n = node(id);
        const auto queued = n.endpoint->enqueue_tx(send.payload, !cfg_.auto_ack);
        if (queued == LinkEndpoint::EnqueueResult::FifoFull) {
            trace(id, "fifo-reject", "");
            return;
        }
        trace(id, "app-send", std::to_string(send.payload.size()) + "B");
        if (n.ptx_phase != PtxPhase::Idle) return; // picked up when the queue drains
        const Transition up = n.radio->apply_command(RadioCommand::SetPwrUp);
        switch_segment(id, up.transit_current_mA, "power-up");
        queue_.schedule(now_ + up.duration_s, id, TransitionComplete{});
        n.ptx_phase = PtxPhase::PoweringUp;
    }

    void on_transition_complete(NodeId id) {
        SimNode& n = node(id);
        if (id == 0) {
            switch (n.prx_phase) {
                case PrxPhase::PoweringUp: {
                    const Transition t = n.radio->apply_command(RadioCommand::CeHighRx);
                    switch_segment(0, t.transit_current_mA, "pll-lock-rx");
                    queue_.schedule(now_ + t.duration_s, 0, TransitionComplete{});
                    n.prx_phase = PrxPhase::LockingRx;
                    break;
                }
                case PrxPhase::LockingRx:
                    n.radio->complete_transition();
                    switch_segment(0, n.radio->current_mA(), "rx-active");
                    n.prx_phase = PrxPhase::Listening;
                    trace(0, "prx-ready", "");
                    break;
                case PrxPhase::Listening:
                    break; // nothing pends in this phase
            }
            return;
        }
        switch (n.ptx_phase) {
            case PtxPhase::PoweringUp:
            case PtxPhase::RetransmitWait:
                start_tx_attempt(id);
                break;
            case PtxPhase::LockingTx: {
                n.radio->complete_transition();
                switch_segment(id, n.radio->current_mA(), "tx-active");
                transmit(id);
                break;
            }
            case PtxPhase::LockingRx:
                n.radio->complete_transition();
                switch_segment(id, n.radio->current_mA(), "rx-active");
                n.ptx_phase = PtxPhase::Listening;
                arm_timer(id, TimerKind::AckTimeout,
                          cfg_.timings.pll_lock_s + ack_air_time() + kAckGuard_s);
                break;
            default:
                break;
        }
    }

    // StandbyI holds for zero time in this schedule: CE is raised in the same
    // instant the standby mode is entered.
    void start_tx_attempt(NodeId id) {
        SimNode& n = node(id);
        const Transition t = n.radio->apply_command(RadioCommand::CeHighTx);
        switch_segment(id, t.transit_current_mA, "pll-lock-tx");
        queue_.schedule(now_ + t.duration_s, id, TransitionComplete{});
        n.ptx_phase = PtxPhase::LockingTx;
    }

    void transmit(NodeId id) {
        SimNode& n = node(id);
        const Packet& pkt = n.endpoint->tx_front();
        if (n.attempt == 0)
            ++n.endpoint->stats().sent;
        else
            ++n.endpoint->stats().retransmissions;
        trace(id, "tx-start",
              "pid=" + std::to_string(pkt.pid) + " attempt=" + std::to_string(n.attempt));
        Bitstring bits = serialize(pkt, cfg_.packet);
        corrupt_in_place(n, bits);
        const double air = air_time_s(bits.size(), cfg_.packet);
        queue_.schedule(now_ + air, 0, FrameArrival{std::move(bits), id});
        arm_timer(id, TimerKind::TxAirDone, air);
        n.ptx_phase = PtxPhase::Transmitting;
    }

    void on_timer(NodeId id, const TimerExpiry& timer) {
        SimNode& n = node(id);
        if (timer.id != n.live_timer) return; // cancelled
        switch (timer.kind) {
            case TimerKind::TxAirDone: {
                n.radio->apply_command(RadioCommand::TxDone);
                if (!cfg_.auto_ack) {
                    // Fire and forget: transaction over at the end of the burst.
                    n.endpoint->pop_tx_front();
                    trace(id, "tx-done", "no-ack");
                    next_or_sleep(id);
                    return;
                }
                const Transition t = n.radio->apply_command(RadioCommand::CeHighRx);
                switch_segment(id, t.transit_current_mA, "pll-lock-rx");
                queue_.schedule(now_ + t.duration_s, id, TransitionComplete{});
                n.ptx_phase = PtxPhase::LockingRx;
                return;
            }
            case TimerKind::AckTimeout: {
                n.radio->apply_command(RadioCommand::RxDone);
                trace(id, "ack-timeout", "attempt=" + std::to_string(n.attempt));
                ++n.attempt;
                if (n.attempt > cfg_.policy.max_retransmits) {
                    ++n.endpoint->stats().max_rt_failures;
                    trace(id, "max-rt", "pid=" + std::to_string(n.endpoint->tx_front().pid));
                    n.endpoint->pop_tx_front(); // flushed so the queue keeps moving
                    next_or_sleep(id);
                    return;
                }
                if (cfg_.policy.retransmit_delay_s > 0) {
                    switch_segment(id, cfg_.currents.standby_mA, "standby");
                    queue_.schedule(now_ + cfg_.policy.retransmit_delay_s, id, TransitionComplete{});
                    n.ptx_phase = PtxPhase::RetransmitWait;
                } else {
                    start_tx_attempt(id);
                }
                return;
            }
        }
    }

    void on_prx_frame(const FrameArrival& arrival) {
        SimNode& prx = node(0);
        if (prx.prx_phase != PrxPhase::Listening) {
            trace(0, "prx-not-ready", "");
            return;
        }
        const PrxResult res = prx.endpoint->on_frame(arrival.bits);
        trace(0, "frame-arrival",
              std::string(to_string(res.outcome)) + " from=" + std::to_string(arrival.from));
        while (auto rec = prx.endpoint->poll_rx())
            result_.rx_log.push_back(RxLogEntry{now_, rec->pipe.value(), std::move(rec->payload)});
        if (!res.ack) return;

        // Acknowledge after one PLL-lock turnaround, through the same link.
        Bitstring ack_bits = serialize(*res.ack, cfg_.packet);
        corrupt_in_place(node(arrival.from), ack_bits);
        const double air = air_time_s(ack_bits.size(), cfg_.packet);
        queue_.schedule(now_ + cfg_.timings.pll_lock_s + air, arrival.from,
                        FrameArrival{std::move(ack_bits), 0});
        trace(0, "ack-sent", "to=" + std::to_string(arrival.from));
    }

    void on_ptx_frame(NodeId id, const FrameArrival& arrival) {
        SimNode& n = node(id);
        if (n.ptx_phase != PtxPhase::Listening) {
            trace(id, "stray-frame", "");
            return;
        }
        if (!n.endpoint->ack_matches(arrival.bits, n.endpoint->tx_front())) {
            trace(id, "bad-ack", "");
            return; // keep listening; the timeout is still armed
        }
        ++n.live_timer; // cancel the ack timeout
        ++n.endpoint->stats().acked;
        ++n.endpoint->stats().delivered;
        trace(id, "ack-arrival", "pid=" + std::to_string(n.endpoint->tx_front().pid));
        n.endpoint->pop_tx_front();
        n.radio->apply_command(RadioCommand::RxDone);
        next_or_sleep(id);
    }

    void next_or_sleep(NodeId id) {
        SimNode& n = node(id);
        n.attempt = 0;
        if (n.endpoint->tx_pending() > 0) {
            start_tx_attempt(id);
            return;
        }
        n.radio->apply_command(RadioCommand::ClearPwrUp);
        switch_segment(id, n.radio->current_mA(), "power-down");
        n.ptx_phase = PtxPhase::Idle;
        trace(id, "sleep", "");
    }

    // --- helpers ---------------------------------------------------------------

    double ack_air_time() const {
        return air_time_s(static_cast<std::size_t>(overhead_bits(cfg_.packet)), cfg_.packet);
    }

    void corrupt_in_place(SimNode& link_owner, Bitstring& bits) {
        if (link_owner.ber <= 0.0) return;
        for (std::size_t pos : sample_corruption(link_owner.link_rng, bits.size(), link_owner.ber))
            bits.flip(pos);
    }

    void arm_timer(NodeId id, TimerKind kind, double delay_s) {
        SimNode& n = node(id);
        queue_.schedule(now_ + delay_s, id, TimerExpiry{kind, ++n.live_timer});
    }

    void open_segment(NodeId id, double t, double current_mA, std::string label) {
        SimNode& n = node(id);
        n.seg_start_s = t;
        n.seg_current_mA = current_mA;
        n.seg_label = std::move(label);
    }

    void close_segment(NodeId id, double t) {
        SimNode& n = node(id);
        const double dur = t - n.seg_start_s;
        if (dur > 0)
            result_.segments.push_back(ChargeSegment{id, n.seg_start_s, dur, n.seg_current_mA, n.seg_label});
    }

    void switch_segment(NodeId id, double current_mA, std::string label) {
        close_segment(id, now_);
        open_segment(id, now_, current_mA, std::move(label));
    }

    void trace(NodeId id, std::string kind, std::string detail) {
        if (cfg_.record_trace)
            result_.trace.push_back(TraceRecord{now_, id, std::move(kind), std::move(detail)});
    }

    void finish(double end) {
        result_.end_time_s = end;
        for (NodeId id = 0; id <= num_ptx(); ++id) {
            NodeResult r;
            r.node = id;
            r.role = (id == 0) ? LinkRole::Prx : LinkRole::Ptx;
            r.stats = node(id).endpoint->stats();
            for (const ChargeSegment& s : result_.segments)
                if (s.node == id) r.charge_mAs += s.current_mA * s.duration_s;
            r.average_current_mA = (end > 0) ? r.charge_mAs / end : 0.0;
            result_.nodes.push_back(std::move(r));
        }
    }

    SimulationConfig cfg_;
    EventQueue queue_;
    std::vector<SimNode> nodes_;
    SimulationResult result_;
    double now_ = 0.0;
};

} // namespace detail

inline SimulationResult run_simulation(const SimulationConfig& cfg) {
    return detail::Simulation(cfg).run();
}

} // namespace wsnsim
