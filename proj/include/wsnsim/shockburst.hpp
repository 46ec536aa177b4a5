#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "wsnsim/channel.hpp"
#include "wsnsim/packet.hpp"
#include "wsnsim/rng.hpp"

namespace wsnsim {

// ============================================================================
// Link layer: automatic acknowledgement and retransmission
// ============================================================================
//
// A link has a transmitter-role endpoint (PTX) and a receiver-role endpoint
// (PRX). The PTX assembles frames from queued payloads, fires them, and —
// unless the frame opts out via NO_ACK — expects an empty acknowledgement
// frame back. A missing or corrupted ACK triggers retransmission of the same
// frame (same PID, same CRC) up to a configured limit. The PRX recognizes a
// retransmitted copy of a frame it already accepted by the (PID, CRC) pair
// and suppresses the duplicate while still acknowledging it.
//
// The PRX listens on up to six logical "pipes": six receive addresses that
// let one receiver serve a star of six transmitters. Pipe 0 and pipe 1 carry
// full addresses; pipes 2-5 reuse pipe 1's leading bytes and differ only in
// the final byte.

constexpr std::size_t kTxFifoDepth = 3;
constexpr std::size_t kRxFifoDepth = 3;

// Index of a receive pipe, 0..5.
class PipeId {
public:
    static constexpr int kCount = 6;

    explicit PipeId(int v) : v_(v) {
        if (v < 0 || v >= kCount) throw std::invalid_argument("PipeId: pipe index must be 0..5");
    }

    int value() const { return v_; }
    auto operator<=>(const PipeId&) const = default;

private:
    int v_;
};

// The six receive addresses of a PRX. All must share one width and be
// pairwise distinct, or reception would be ambiguous.
class PipeAddressSet {
public:
    PipeAddressSet(std::vector<std::uint8_t> pipe0, std::vector<std::uint8_t> pipe1,
                   std::array<std::uint8_t, 4> pipe_2_to_5_low_byte) {
        if (pipe0.size() != pipe1.size())
            throw std::invalid_argument("PipeAddressSet: pipe 0 and pipe 1 widths differ");
        if (pipe0.size() < 3 || pipe0.size() > 5)
            throw std::invalid_argument("PipeAddressSet: address width must be 3..5 bytes");
        addresses_[0] = std::move(pipe0);
        addresses_[1] = std::move(pipe1);
        for (std::size_t i = 0; i < 4; ++i) {
            addresses_[2 + i] = addresses_[1];
            addresses_[2 + i].back() = pipe_2_to_5_low_byte[i];
        }
        for (std::size_t a = 0; a < addresses_.size(); ++a)
            for (std::size_t b = a + 1; b < addresses_.size(); ++b)
                if (addresses_[a] == addresses_[b])
                    throw std::invalid_argument("PipeAddressSet: pipe addresses must be distinct");
    }

    // Conventional power-on defaults: pipe 0 all 0xe7, pipe 1 all 0xc2,
    // pipes 2-5 ending 0xc3..0xc6.
    static PipeAddressSet defaults(int address_width = 5) {
        if (address_width < 3 || address_width > 5)
            throw std::invalid_argument("PipeAddressSet: address width must be 3..5 bytes");
        const auto w = static_cast<std::size_t>(address_width);
        return PipeAddressSet(std::vector<std::uint8_t>(w, 0xe7), std::vector<std::uint8_t>(w, 0xc2),
                              {0xc3, 0xc4, 0xc5, 0xc6});
    }

    int address_width() const { return static_cast<int>(addresses_[0].size()); }
    const std::vector<std::uint8_t>& address(PipeId pipe) const {
        return addresses_[static_cast<std::size_t>(pipe.value())];
    }

    std::optional<PipeId> match(const std::vector<std::uint8_t>& address) const {
        for (int i = 0; i < PipeId::kCount; ++i)
            if (addresses_[static_cast<std::size_t>(i)] == address) return PipeId(i);
        return std::nullopt;
    }

private:
    std::array<std::vector<std::uint8_t>, 6> addresses_;
};

struct RetransmitPolicy {
    int max_retransmits = 3;           // 0..15 retries after the first attempt
    double retransmit_delay_s = 250e-6; // wait between attempts

    void validate() const {
        if (max_retransmits < 0 || max_retransmits > 15)
            throw std::invalid_argument("RetransmitPolicy: max_retransmits must be 0..15");
        if (retransmit_delay_s < 0)
            throw std::invalid_argument("RetransmitPolicy: negative retransmit delay");
    }
};

// Counters kept by each endpoint. PTX-side: sent/delivered/acked/
// retransmissions/max_rt_failures/tx_fifo_rejects. PRX-side: received/
// duplicates_suppressed/crc_drops/malformed_drops/address_mismatches/
// rx_fifo_drops.
struct LinkStats {
    std::uint64_t sent = 0;                  // distinct packets first put on air
    std::uint64_t delivered = 0;             // transactions that ended acknowledged
    std::uint64_t acked = 0;                 // valid ACK frames consumed
    std::uint64_t retransmissions = 0;       // extra attempts beyond the first
    std::uint64_t max_rt_failures = 0;       // transactions abandoned at the retry limit
    std::uint64_t tx_fifo_rejects = 0;       // enqueue refused, queue full
    std::uint64_t received = 0;              // payloads handed to the application
    std::uint64_t duplicates_suppressed = 0; // retransmitted copies recognized and dropped
    std::uint64_t crc_drops = 0;             // frames failing the checksum
    std::uint64_t malformed_drops = 0;       // frames with impossible geometry
    std::uint64_t address_mismatches = 0;    // frames for somebody else
    std::uint64_t rx_fifo_drops = 0;         // accepted frames lost to a full queue
};

// ----------------------------------------------------------------------------
// Channels
// ----------------------------------------------------------------------------

// What happens to a frame between the antennas. Each leg either delivers a
// (possibly corrupted) bit sequence or loses the frame outright.
class Channel {
public:
    virtual ~Channel() = default;
    virtual std::optional<Bitstring> data_leg(const Bitstring& bits) = 0;
    virtual std::optional<Bitstring> ack_leg(const Bitstring& bits) = 0;
};

class PerfectChannel final : public Channel {
public:
    std::optional<Bitstring> data_leg(const Bitstring& bits) override { return bits; }
    std::optional<Bitstring> ack_leg(const Bitstring& bits) override { return bits; }
};

// Memoryless bit-flip channel: every bit of either leg errors independently
// with the given rate. Frames always arrive; corruption is the CRC's problem.
class BerChannel final : public Channel {
public:
    BerChannel(double ber, SplitMix64 rng) : ber_(ber), rng_(rng) {
        if (!(ber >= 0.0) || ber > 1.0) throw std::invalid_argument("BerChannel: BER outside [0, 1]");
    }

    std::optional<Bitstring> data_leg(const Bitstring& bits) override { return corrupt(bits); }
    std::optional<Bitstring> ack_leg(const Bitstring& bits) override { return corrupt(bits); }

private:
    Bitstring corrupt(const Bitstring& bits) {
        Bitstring out = bits;
        for (std::size_t pos : sample_corruption(rng_, bits.size(), ber_)) out.flip(pos);
        return out;
    }

    double ber_;
    SplitMix64 rng_;
};

// Drops each data frame independently with probability p; acknowledgements
// pass untouched. With loss confined to the data leg, delivery probability
// under max_retransmits = m is exactly 1 - p^(m+1).
class LossChannel final : public Channel {
public:
    LossChannel(double drop_probability, SplitMix64 rng) : p_(drop_probability), rng_(rng) {
        if (!(p_ >= 0.0) || p_ > 1.0)
            throw std::invalid_argument("LossChannel: drop probability outside [0, 1]");
    }

    std::optional<Bitstring> data_leg(const Bitstring& bits) override {
        if (rng_.next_double() < p_) return std::nullopt;
        return bits;
    }
    std::optional<Bitstring> ack_leg(const Bitstring& bits) override { return bits; }

private:
    double p_;
    SplitMix64 rng_;
};

// Per-call drop scripts for reproducing exact loss patterns in tests: entry k
// decides the k-th frame on that leg; off the end of the script everything
// gets through.
class ScriptedChannel final : public Channel {
public:
    ScriptedChannel(std::vector<bool> drop_data, std::vector<bool> drop_ack)
        : drop_data_(std::move(drop_data)), drop_ack_(std::move(drop_ack)) {}

    std::optional<Bitstring> data_leg(const Bitstring& bits) override {
        return step(drop_data_, data_calls_++, bits);
    }
    std::optional<Bitstring> ack_leg(const Bitstring& bits) override {
        return step(drop_ack_, ack_calls_++, bits);
    }

private:
    static std::optional<Bitstring> step(const std::vector<bool>& script, std::size_t k,
                                         const Bitstring& bits) {
        if (k < script.size() && script[k]) return std::nullopt;
        return bits;
    }

    std::vector<bool> drop_data_, drop_ack_;
    std::size_t data_calls_ = 0, ack_calls_ = 0;
};

// ----------------------------------------------------------------------------
// Endpoints
// ----------------------------------------------------------------------------

enum class LinkRole { Ptx, Prx };

// A payload delivered to the receiving application, tagged with its pipe.
struct RxRecord {
    std::vector<std::uint8_t> payload;
    PipeId pipe;
};

enum class PrxOutcome { Delivered, DuplicateSuppressed, CrcDropped, MalformedDropped,
                        AddressMismatch, RxFifoFull };

inline const char* to_string(PrxOutcome o) {
    switch (o) {
        case PrxOutcome::Delivered: return "delivered";
        case PrxOutcome::DuplicateSuppressed: return "duplicate-suppressed";
        case PrxOutcome::CrcDropped: return "crc-dropped";
        case PrxOutcome::MalformedDropped: return "malformed-dropped";
        case PrxOutcome::AddressMismatch: return "address-mismatch";
        case PrxOutcome::RxFifoFull: return "rx-fifo-full";
    }
    return "?";
}

// Receiver's reaction to one incoming frame. `ack` is filled whenever the
// frame calls for an acknowledgement — including for suppressed duplicates,
// which must be re-acknowledged or the transmitter would retry forever.
struct PrxResult {
    PrxOutcome outcome;
    std::optional<PipeId> pipe;
    std::optional<Packet> ack;
};

class LinkEndpoint {
public:
    static LinkEndpoint make_ptx(std::vector<std::uint8_t> tx_address, PacketConfig cfg) {
        cfg.validate();
        if (tx_address.size() != static_cast<std::size_t>(cfg.address_width))
            throw std::invalid_argument("LinkEndpoint: TX address width does not match config");
        return LinkEndpoint(LinkRole::Ptx, std::move(tx_address), std::nullopt, cfg);
    }

    static LinkEndpoint make_prx(PipeAddressSet addresses, PacketConfig cfg) {
        cfg.validate();
        if (addresses.address_width() != cfg.address_width)
            throw std::invalid_argument("LinkEndpoint: pipe address width does not match config");
        return LinkEndpoint(LinkRole::Prx, {}, std::move(addresses), cfg);
    }

    LinkRole role() const { return role_; }
    const PacketConfig& config() const { return cfg_; }
    LinkStats& stats() { return stats_; }
    const LinkStats& stats() const { return stats_; }

    // --- PTX side -----------------------------------------------------------

    enum class EnqueueResult { Accepted, FifoFull };

    // Queue a payload for transmission. Payloads are 1..32 bytes; the PID is
    // assigned here, advancing per accepted payload.
    EnqueueResult enqueue_tx(std::vector<std::uint8_t> payload, bool no_ack = false) {
        require_role(LinkRole::Ptx, "enqueue_tx");
        if (payload.empty() || payload.size() > kMaxPayloadBytes)
            throw std::invalid_argument("enqueue_tx: payload must be 1..32 bytes");
        if (tx_fifo_.size() >= kTxFifoDepth) {
            ++stats_.tx_fifo_rejects;
            return EnqueueResult::FifoFull;
        }
        tx_fifo_.push_back(Packet::data(tx_address_, std::move(payload), next_pid_, no_ack));
        next_pid_ = (next_pid_ + 1) & 3;
        return EnqueueResult::Accepted;
    }

    std::size_t tx_pending() const { return tx_fifo_.size(); }

    const Packet& tx_front() const {
        require_role(LinkRole::Ptx, "tx_front");
        if (tx_fifo_.empty()) throw std::logic_error("tx_front: TX queue is empty");
        return tx_fifo_.front();
    }

    // Discard the frame at the head of the TX queue (after delivery, or to
    // flush an abandoned transaction).
    void pop_tx_front() {
        require_role(LinkRole::Ptx, "pop_tx_front");
        if (tx_fifo_.empty()) throw std::logic_error("pop_tx_front: TX queue is empty");
        tx_fifo_.pop_front();
    }

    const std::vector<std::uint8_t>& tx_address() const { return tx_address_; }

    // Check an incoming acknowledgement against the frame under transmission:
    // it must decode, come back on our address, carry no payload, and echo
    // the outstanding PID.
    bool ack_matches(const Bitstring& bits, const Packet& outstanding) const {
        auto decoded = deserialize(bits, cfg_);
        return decoded.ok() && decoded.value().address == tx_address_ &&
               decoded.value().payload.empty() && decoded.value().pid == outstanding.pid;
    }

    // --- PRX side -----------------------------------------------------------

    PrxResult on_frame(const Bitstring& bits) {
        require_role(LinkRole::Prx, "on_frame");
        auto decoded = deserialize(bits, cfg_);
        if (!decoded.ok()) {
            if (decoded.error() == DecodeError::CrcMismatch) {
                ++stats_.crc_drops;
                return {PrxOutcome::CrcDropped, std::nullopt, std::nullopt};
            }
            ++stats_.malformed_drops;
            return {PrxOutcome::MalformedDropped, std::nullopt, std::nullopt};
        }
        const Packet& pkt = decoded.value();
        const auto pipe = pipes_->match(pkt.address);
        if (!pipe) {
            ++stats_.address_mismatches;
            return {PrxOutcome::AddressMismatch, std::nullopt, std::nullopt};
        }
        const auto idx = static_cast<std::size_t>(pipe->value());
        const FrameSignature sig = frame_signature(bits, cfg_);
        const std::optional<Packet> ack =
            pkt.no_ack ? std::nullopt : std::optional<Packet>(Packet::ack(pkt.address, pkt.pid));

        if (last_signature_[idx] && *last_signature_[idx] == sig) {
            // Same PID and CRC as the previous frame on this pipe: it is a
            // retransmission. Drop the copy but acknowledge again.
            ++stats_.duplicates_suppressed;
            return {PrxOutcome::DuplicateSuppressed, pipe, ack};
        }
        if (rx_fifo_.size() >= kRxFifoDepth) {
            // No room: drop without acknowledging, so the sender retries.
            ++stats_.rx_fifo_drops;
            return {PrxOutcome::RxFifoFull, pipe, std::nullopt};
        }
        rx_fifo_.push_back(RxRecord{pkt.payload, *pipe});
        last_signature_[idx] = sig;
        ++stats_.received;
        return {PrxOutcome::Delivered, pipe, ack};
    }

    std::optional<RxRecord> poll_rx() {
        require_role(LinkRole::Prx, "poll_rx");
        if (rx_fifo_.empty()) return std::nullopt;
        RxRecord r = std::move(rx_fifo_.front());
        rx_fifo_.pop_front();
        return r;
    }

    std::size_t rx_pending() const { return rx_fifo_.size(); }

private:
    LinkEndpoint(LinkRole role, std::vector<std::uint8_t> tx_address,
                 std::optional<PipeAddressSet> pipes, PacketConfig cfg)
        : role_(role), cfg_(cfg), tx_address_(std::move(tx_address)), pipes_(std::move(pipes)) {}

    void require_role(LinkRole expected, const char* op) const {
        if (role_ != expected)
            throw std::logic_error(std::string(op) + ": operation not valid for this endpoint role");
    }

    LinkRole role_;
    PacketConfig cfg_;
    LinkStats stats_;

    // PTX state
    std::vector<std::uint8_t> tx_address_;
    std::deque<Packet> tx_fifo_;
    std::uint8_t next_pid_ = 0;

    // PRX state
    std::optional<PipeAddressSet> pipes_;
    std::deque<RxRecord> rx_fifo_;
    std::array<std::optional<FrameSignature>, 6> last_signature_;
};

// ----------------------------------------------------------------------------
// Synchronous transaction
// ----------------------------------------------------------------------------

enum class TxOutcome { Delivered, MaxRtFailure };

struct TransactionResult {
    TxOutcome outcome;
    int retransmits = 0;  // attempts beyond the first
    double elapsed_s = 0; // airtime plus retransmit waits
};

// Run one frame through the full automatic-retransmission exchange, with both
// endpoints in hand. This is the zero-latency counterpart of the event-driven
// simulator: attempts happen back to back, and `elapsed_s` accounts airtime
// and retransmit delays only.
//
// On success the frame is consumed from the TX queue. At the retry limit the
// frame stays at the head of the queue — matching a transmitter that halts on
// MAX_RT until the application flushes or re-kicks it — so callers that want
// to move on must pop_tx_front().
//
// A NO_ACK frame completes after its single attempt and reports Delivered
// unconditionally: fire-and-forget gives the transmitter nothing to observe,
// so delivery accounting for unacknowledged traffic belongs to the receiver.
inline TransactionResult ptx_transaction(LinkEndpoint& ptx, LinkEndpoint& prx, Channel& channel,
                                         const RetransmitPolicy& policy) {
    policy.validate();
    if (ptx.role() != LinkRole::Ptx || prx.role() != LinkRole::Prx)
        throw std::logic_error("ptx_transaction: endpoints passed in the wrong roles");
    const Packet pkt = ptx.tx_front(); // throws if queue empty
    const Bitstring bits = serialize(pkt, ptx.config());
    const double data_air = air_time_s(bits.size(), ptx.config());

    TransactionResult result{TxOutcome::MaxRtFailure, 0, 0.0};
    ++ptx.stats().sent;
    for (int attempt = 0; attempt <= policy.max_retransmits; ++attempt) {
        if (attempt > 0) {
            ++ptx.stats().retransmissions;
            result.retransmits = attempt;
            result.elapsed_s += policy.retransmit_delay_s;
        }
        result.elapsed_s += data_air;

        std::optional<Bitstring> arrived = channel.data_leg(bits);
        std::optional<Packet> ack;
        if (arrived) ack = prx.on_frame(*arrived).ack;

        if (pkt.no_ack) {
            // Fire and forget: one attempt, no confirmation to wait for.
            ptx.pop_tx_front();
            result.outcome = TxOutcome::Delivered;
            return result;
        }
        if (ack) {
            const Bitstring ack_bits = serialize(*ack, prx.config());
            std::optional<Bitstring> ack_arrived = channel.ack_leg(ack_bits);
            if (ack_arrived && ptx.ack_matches(*ack_arrived, pkt)) {
                result.elapsed_s += air_time_s(ack_bits.size(), ptx.config());
                ++ptx.stats().acked;
                ++ptx.stats().delivered;
                ptx.pop_tx_front();
                result.outcome = TxOutcome::Delivered;
                return result;
            }
        }
    }
    ++ptx.stats().max_rt_failures;
    return result;
}

} // namespace wsnsim
