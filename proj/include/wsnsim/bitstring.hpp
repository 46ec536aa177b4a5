#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace wsnsim {

// Ordered bit sequence with an explicit length in bits. Frames on this link
// are not a whole number of bytes (the control field is 9 bits), so the byte
// views below zero-pad the tail and size() stays authoritative.
//
// Bits are stored MSB-first within each backing byte: bit 0 of the string is
// bit 7 of bytes()[0]. This matches over-the-air order, where each field is
// shifted out most-significant bit first.
class Bitstring {
public:
    Bitstring() = default;

    std::size_t size() const { return nbits_; }
    bool empty() const { return nbits_ == 0; }

    bool get(std::size_t i) const {
        check_index(i);
        return (bytes_[i >> 3] >> (7 - (i & 7))) & 1;
    }

    void set(std::size_t i, bool b) {
        check_index(i);
        const std::uint8_t mask = static_cast<std::uint8_t>(1u << (7 - (i & 7)));
        if (b)
            bytes_[i >> 3] |= mask;
        else
            bytes_[i >> 3] &= static_cast<std::uint8_t>(~mask);
    }

    void flip(std::size_t i) { set(i, !get(i)); }

    void push_bit(bool b) {
        if ((nbits_ & 7) == 0) bytes_.push_back(0);
        ++nbits_;
        set(nbits_ - 1, b);
    }

    // Append the low `count` bits of `value`, most significant first.
    void push_bits(std::uint64_t value, std::size_t count) {
        if (count > 64) throw std::invalid_argument("Bitstring::push_bits: count > 64");
        for (std::size_t i = 0; i < count; ++i)
            push_bit((value >> (count - 1 - i)) & 1);
    }

    void push_byte(std::uint8_t b) { push_bits(b, 8); }

    void push_bytes(const std::vector<std::uint8_t>& bytes) {
        for (std::uint8_t b : bytes) push_byte(b);
    }

    // Read `count` bits starting at `start`, returned right-aligned.
    std::uint64_t extract_u64(std::size_t start, std::size_t count) const {
        if (count > 64) throw std::invalid_argument("Bitstring::extract_u64: count > 64");
        if (start + count > nbits_) throw std::out_of_range("Bitstring::extract_u64: range past end");
        std::uint64_t v = 0;
        for (std::size_t i = 0; i < count; ++i)
            v = (v << 1) | static_cast<std::uint64_t>(get(start + i));
        return v;
    }

    Bitstring slice(std::size_t start, std::size_t count) const {
        if (start + count > nbits_) throw std::out_of_range("Bitstring::slice: range past end");
        Bitstring out;
        for (std::size_t i = 0; i < count; ++i) out.push_bit(get(start + i));
        return out;
    }

    // `count` whole bytes starting at an arbitrary (not necessarily aligned) bit offset.
    std::vector<std::uint8_t> extract_bytes(std::size_t start, std::size_t count) const {
        std::vector<std::uint8_t> out;
        out.reserve(count);
        for (std::size_t i = 0; i < count; ++i)
            out.push_back(static_cast<std::uint8_t>(extract_u64(start + 8 * i, 8)));
        return out;
    }

    // Packed view; bits past size() in the final byte are zero.
    const std::vector<std::uint8_t>& bytes() const { return bytes_; }

    std::string to_hex() const {
        static const char* digits = "0123456789abcdef";
        std::string s;
        s.reserve(2 * bytes_.size());
        for (std::uint8_t b : bytes_) {
            s.push_back(digits[b >> 4]);
            s.push_back(digits[b & 0x0f]);
        }
        return s;
    }

    bool operator==(const Bitstring& other) const {
        return nbits_ == other.nbits_ && bytes_ == other.bytes_;
    }

private:
    void check_index(std::size_t i) const {
        if (i >= nbits_) throw std::out_of_range("Bitstring: bit index past end");
    }

    std::vector<std::uint8_t> bytes_;
    std::size_t nbits_ = 0;
};

} // namespace wsnsim
