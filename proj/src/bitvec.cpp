#include "rtsim/bitvec.hpp"

#include <algorithm>
#include <stdexcept>

namespace rtsim {

unsigned bit_length(u128 v) {
    unsigned n = 0;
    while (v != 0) {
        v >>= 1;
        ++n;
    }
    return n;
}

std::string to_decimal(u128 v) {
    if (v == 0) {
        return "0";
    }
    std::string out;
    while (v != 0) {
        out.push_back(static_cast<char>('0' + static_cast<int>(v % 10)));
        v /= 10;
    }
    std::reverse(out.begin(), out.end());
    return out;
}

std::string to_decimal(const BitVec& v) {
    if (v.is_signed) {
        const i128 s = as_signed(v.value, v.width);
        if (s < 0) {
            return "-" + to_decimal(static_cast<u128>(-(s + 1)) + 1);
        }
    }
    return to_decimal(v.value);
}

std::string to_binary(u128 v, unsigned width) {
    std::string out(width, '0');
    for (unsigned i = 0; i < width; ++i) {
        if ((v >> i) & 1) {
            out[width - 1 - i] = '1';
        }
    }
    return out;
}

u128 parse_u128(std::string_view text) {
    unsigned base = 10;
    if (text.size() > 2 && text[0] == '0' && (text[1] == 'x' || text[1] == 'X')) {
        base = 16;
        text.remove_prefix(2);
    } else if (text.size() > 2 && text[0] == '0' && (text[1] == 'b' || text[1] == 'B')) {
        base = 2;
        text.remove_prefix(2);
    } else if (text.size() > 2 && text[0] == '0' && (text[1] == 'o' || text[1] == 'O')) {
        base = 8;
        text.remove_prefix(2);
    }
    if (text.empty()) {
        throw std::invalid_argument("empty integer literal");
    }
    u128 value = 0;
    const u128 limit = ~u128{0};
    for (char c : text) {
        if (c == '_') {
            continue;
        }
        unsigned digit;
        if (c >= '0' && c <= '9') {
            digit = static_cast<unsigned>(c - '0');
        } else if (c >= 'a' && c <= 'f') {
            digit = static_cast<unsigned>(c - 'a' + 10);
        } else if (c >= 'A' && c <= 'F') {
            digit = static_cast<unsigned>(c - 'A' + 10);
        } else {
            throw std::invalid_argument("invalid digit in integer literal");
        }
        if (digit >= base) {
            throw std::invalid_argument("invalid digit in integer literal");
        }
        if (value > (limit - digit) / base) {
            throw std::invalid_argument("integer literal exceeds 128 bits");
        }
        value = value * base + digit;
    }
    return value;
}

}  // namespace rtsim
