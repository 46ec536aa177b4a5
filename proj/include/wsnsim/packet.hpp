#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "wsnsim/bitstring.hpp"
#include "wsnsim/crc.hpp"
#include "wsnsim/expected.hpp"

namespace wsnsim {

// ============================================================================
// Link-layer frame codec
// ============================================================================
//
// On-air frame layout, MSB-first:
//
//   +----------+-------------+---------------+------------------+-----------+
//   | preamble |   address   | control field |     payload      |    CRC    |
//   |  8 bits  | 3..5 bytes  |    9 bits     |   0..32 bytes    | 1..2 bytes|
//   +----------+-------------+---------------+------------------+-----------+
//
// Control field: 6-bit payload length, 2-bit packet id (PID), 1-bit NO_ACK.
// The CRC covers address + control + payload; the preamble is excluded since
// the receiver consumes it during synchronization. With a 5-byte address and
// 1-byte CRC the overhead is 65 bits, so a 1-byte payload flies as 73 bits.

constexpr std::uint8_t kPreamble = 0xaa; // alternating 10101010
constexpr int kPreambleBits = 8;
constexpr int kControlFieldBits = 9;
constexpr std::size_t kMaxPayloadBytes = 32;

// Frame geometry knobs shared by both ends of a link. A PTX/PRX pair must
// agree on all three or nothing decodes.
struct PacketConfig {
    int address_width = 5;           // bytes, 3..5
    int crc_width = 1;               // bytes, 1..2
    double datarate_bps = 2'000'000; // air data rate

    void validate() const {
        if (address_width < 3 || address_width > 5)
            throw std::invalid_argument("PacketConfig: address width must be 3..5 bytes");
        if (crc_width < 1 || crc_width > 2)
            throw std::invalid_argument("PacketConfig: CRC width must be 1..2 bytes");
        if (!(datarate_bps > 0))
            throw std::invalid_argument("PacketConfig: data rate must be positive");
    }
};

// Frame bits excluding payload: preamble + address + control + CRC.
inline int overhead_bits(const PacketConfig& cfg) {
    cfg.validate();
    return kPreambleBits + 8 * cfg.address_width + kControlFieldBits + 8 * cfg.crc_width;
}

// Time on air for a frame of `frame_bits` bits at the configured rate.
inline double air_time_s(std::size_t frame_bits, const PacketConfig& cfg) {
    cfg.validate();
    return static_cast<double>(frame_bits) / cfg.datarate_bps;
}

// One link-layer packet, pre-serialization. An empty payload is legal on the
// wire (that is what an ACK is); data entry points enforce 1..32 separately.
struct Packet {
    std::vector<std::uint8_t> address;
    std::vector<std::uint8_t> payload;
    std::uint8_t pid = 0; // 2-bit sequence id, advanced per new payload
    bool no_ack = false;  // set => receiver must not auto-acknowledge

    static Packet data(std::vector<std::uint8_t> address, std::vector<std::uint8_t> payload,
                       std::uint8_t pid, bool no_ack = false) {
        return Packet{std::move(address), std::move(payload), pid, no_ack};
    }

    // Empty-payload acknowledgement carrying the PID it acknowledges.
    static Packet ack(std::vector<std::uint8_t> address, std::uint8_t pid) {
        return Packet{std::move(address), {}, pid, true};
    }

    void validate(const PacketConfig& cfg) const {
        cfg.validate();
        if (address.size() != static_cast<std::size_t>(cfg.address_width))
            throw std::invalid_argument("Packet: address length does not match configured width");
        if (payload.size() > kMaxPayloadBytes)
            throw std::invalid_argument("Packet: payload exceeds 32 bytes");
        if (pid > 3)
            throw std::invalid_argument("Packet: PID is a 2-bit field");
    }

    bool operator==(const Packet&) const = default;
};

inline Bitstring serialize(const Packet& pkt, const PacketConfig& cfg) {
    pkt.validate(cfg);
    Bitstring bits;
    bits.push_byte(kPreamble);
    bits.push_bytes(pkt.address);
    bits.push_bits(pkt.payload.size(), 6);
    bits.push_bits(pkt.pid, 2);
    bits.push_bit(pkt.no_ack);
    bits.push_bytes(pkt.payload);
    const Bitstring covered = bits.slice(kPreambleBits, bits.size() - kPreambleBits);
    bits.push_bits(compute_crc(covered, cfg.crc_width), 8 * static_cast<std::size_t>(cfg.crc_width));
    return bits;
}

enum class DecodeError {
    CrcMismatch,   // checksum failed, or the preamble never matched (no sync)
    MalformedFrame // geometry impossible: truncated, ragged, or length field lies
};

inline const char* to_string(DecodeError e) {
    switch (e) {
        case DecodeError::CrcMismatch: return "crc-mismatch";
        case DecodeError::MalformedFrame: return "malformed-frame";
    }
    return "?";
}

// Decode a received frame. Corruption is an expected outcome, hence the
// value-or-error return; a bad PacketConfig still throws.
//
// Checks run in receiver order: geometry first, then preamble sync, then CRC,
// then field consistency. A real receiver that misses the preamble simply
// never detects a frame, so a preamble mismatch reports as CrcMismatch (the
// frame is silently lost) rather than as a structural error.
inline Expected<Packet, DecodeError> deserialize(const Bitstring& bits, const PacketConfig& cfg) {
    const std::size_t overhead = static_cast<std::size_t>(overhead_bits(cfg));
    if (bits.size() < overhead) return DecodeError::MalformedFrame;
    if ((bits.size() - overhead) % 8 != 0) return DecodeError::MalformedFrame;
    const std::size_t payload_bytes = (bits.size() - overhead) / 8;
    if (payload_bytes > kMaxPayloadBytes) return DecodeError::MalformedFrame;

    if (bits.extract_u64(0, kPreambleBits) != kPreamble) return DecodeError::CrcMismatch;

    const std::size_t crc_bits = 8 * static_cast<std::size_t>(cfg.crc_width);
    const Bitstring covered = bits.slice(kPreambleBits, bits.size() - kPreambleBits - crc_bits);
    const std::uint64_t received_crc = bits.extract_u64(bits.size() - crc_bits, crc_bits);
    if (compute_crc(covered, cfg.crc_width) != received_crc) return DecodeError::CrcMismatch;

    std::size_t at = kPreambleBits;
    Packet pkt;
    pkt.address = bits.extract_bytes(at, static_cast<std::size_t>(cfg.address_width));
    at += 8 * static_cast<std::size_t>(cfg.address_width);
    const std::uint64_t length_field = bits.extract_u64(at, 6);
    pkt.pid = static_cast<std::uint8_t>(bits.extract_u64(at + 6, 2));
    pkt.no_ack = bits.get(at + 8);
    at += kControlFieldBits;
    if (length_field != payload_bytes) return DecodeError::MalformedFrame;
    pkt.payload = bits.extract_bytes(at, payload_bytes);
    return pkt;
}

// PID + received checksum, the pair the receiver uses to recognize a
// retransmitted copy of a frame it already took.
struct FrameSignature {
    std::uint8_t pid = 0;
    std::uint32_t crc = 0;

    bool operator==(const FrameSignature&) const = default;
};

inline FrameSignature frame_signature(const Bitstring& bits, const PacketConfig& cfg) {
    const std::size_t crc_bits = 8 * static_cast<std::size_t>(cfg.crc_width);
    const std::size_t pid_at = kPreambleBits + 8 * static_cast<std::size_t>(cfg.address_width) + 6;
    return FrameSignature{
        static_cast<std::uint8_t>(bits.extract_u64(pid_at, 2)),
        static_cast<std::uint32_t>(bits.extract_u64(bits.size() - crc_bits, crc_bits)),
    };
}

} // namespace wsnsim
