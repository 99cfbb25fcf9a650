#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace rtsim {

using u128 = unsigned __int128;
using i128 = __int128;

inline constexpr unsigned kMaxWidth = 128;

constexpr u128 width_mask(unsigned width) {
    return width >= 128 ? ~u128{0} : ((u128{1} << width) - 1);
}

// Sign- or zero-extends a `width`-bit raw value to the full 128 bits.
constexpr u128 extend(u128 value, unsigned width, bool is_signed) {
    if (!is_signed || width >= 128) {
        return value;
    }
    const u128 sign = u128{1} << (width - 1);
    return (value & sign) ? (value | ~width_mask(width)) : value;
}

constexpr i128 as_signed(u128 value, unsigned width) {
    return static_cast<i128>(extend(value, width, true));
}

constexpr unsigned popcount128(u128 v) {
    return static_cast<unsigned>(__builtin_popcountll(static_cast<uint64_t>(v)) +
                                 __builtin_popcountll(static_cast<uint64_t>(v >> 64)));
}

/// A two's-complement bit-vector scalar. `value` always holds exactly `width`
/// bits; everything above is zero.
struct BitVec {
    u128 value = 0;
    uint8_t width = 1;
    bool is_signed = false;

    friend bool operator==(const BitVec&, const BitVec&) = default;
};

constexpr BitVec make_bitvec(u128 value, unsigned width, bool is_signed = false) {
    return BitVec{value & width_mask(width), static_cast<uint8_t>(width), is_signed};
}

/// Number of bits needed to hold `v` as an unsigned value (0 for v == 0).
unsigned bit_length(u128 v);

std::string to_decimal(u128 v);
/// Signed decimal for signed vectors, unsigned decimal otherwise.
std::string to_decimal(const BitVec& v);
/// MSB-first binary digits, exactly `width` characters.
std::string to_binary(u128 v, unsigned width);

/// Parses an unsigned decimal or `0x`/`0b`/`0o` prefixed literal.
/// Throws std::invalid_argument on malformed input or overflow.
u128 parse_u128(std::string_view text);

}  // namespace rtsim
