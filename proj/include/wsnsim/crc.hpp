#pragma once

#include <cstdint>
#include <stdexcept>

#include "wsnsim/bitstring.hpp"

namespace wsnsim {

// Frame check sequence, computed bit-serially so inputs need not be a whole
// number of bytes (the 9-bit control field is covered by the checksum).
//
//   1 byte : x^8 + x^2 + x + 1        (poly 0x07),   init 0xff
//   2 bytes: x^16 + x^12 + x^5 + 1    (poly 0x1021), init 0xffff
//
// MSB-first, no reflection, no final XOR. The 2-byte variant over the ASCII
// bytes "123456789" gives 0x29b1, the usual check value for this polynomial.
inline std::uint32_t compute_crc(const Bitstring& bits, int crc_width_bytes) {
    std::uint32_t poly, crc, top_bit, mask;
    switch (crc_width_bytes) {
        case 1:
            poly = 0x07;
            crc = 0xff;
            top_bit = 0x80;
            mask = 0xff;
            break;
        case 2:
            poly = 0x1021;
            crc = 0xffff;
            top_bit = 0x8000;
            mask = 0xffff;
            break;
        default:
            throw std::invalid_argument("compute_crc: CRC width must be 1 or 2 bytes");
    }
    for (std::size_t i = 0; i < bits.size(); ++i) {
        const bool in = bits.get(i);
        const bool msb = (crc & top_bit) != 0;
        crc = (crc << 1) & mask;
        if (in != msb) crc ^= poly;
    }
    return crc;
}

} // namespace wsnsim
