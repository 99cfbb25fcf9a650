#pragma once

// Operator semantics shared by every evaluator. The kernels instantiate these
// with a compile-time opcode so the switch folds away.

#include <algorithm>
#include <span>

#include "rtsim/bitvec.hpp"
#include "rtsim/opcode.hpp"

namespace rtsim::ops {

inline u128 ext(const BitVec& v) { return extend(v.value, v.width, v.is_signed); }

/// Value of a unary operation with result width `w`.
inline u128 unary_value(Opcode op, const BitVec& a, const uint32_t* params, unsigned w) {
    switch (op) {
    case Opcode::Pad:
        return ext(a) & width_mask(w);
    case Opcode::AsUInt:
    case Opcode::AsSInt:
    case Opcode::Cvt:
    case Opcode::Copy:
    case Opcode::Tail:
        return a.value & width_mask(w);
    case Opcode::Shl:
        return (ext(a) << params[0]) & width_mask(w);
    case Opcode::Shr:
        if (a.is_signed) {
            return static_cast<u128>(as_signed(a.value, a.width) >> std::min<uint32_t>(params[0], 127)) &
                   width_mask(w);
        }
        return params[0] >= 128 ? 0 : (a.value >> params[0]) & width_mask(w);
    case Opcode::Neg:
        return (u128{0} - ext(a)) & width_mask(w);
    case Opcode::Not:
        return ~a.value & width_mask(w);
    case Opcode::Andr:
        return a.value == width_mask(a.width) ? 1 : 0;
    case Opcode::Orr:
        return a.value != 0 ? 1 : 0;
    case Opcode::Xorr:
        return popcount128(a.value) & 1u;
    case Opcode::Bits:
        return (a.value >> params[1]) & width_mask(w);
    case Opcode::Head:
        return (a.value >> (a.width - params[0])) & width_mask(w);
    default:
        return a.value & width_mask(w);
    }
}

/// Value of a two-operand reducible operation with result width `w`.
inline u128 binary_value(Opcode op, const BitVec& a, const BitVec& b, unsigned w) {
    const u128 ea = ext(a);
    const u128 eb = ext(b);
    const bool sgn = a.is_signed;
    switch (op) {
    case Opcode::Add:
        return (ea + eb) & width_mask(w);
    case Opcode::Sub:
        return (ea - eb) & width_mask(w);
    case Opcode::Mul:
        return (ea * eb) & width_mask(w);
    case Opcode::Div:
        if (b.value == 0) {
            return 0;
        }
        if (sgn) {
            return static_cast<u128>(static_cast<i128>(ea) / static_cast<i128>(eb)) & width_mask(w);
        }
        return (a.value / b.value) & width_mask(w);
    case Opcode::Rem:
        if (b.value == 0) {
            return 0;
        }
        if (sgn) {
            return static_cast<u128>(static_cast<i128>(ea) % static_cast<i128>(eb)) & width_mask(w);
        }
        return (a.value % b.value) & width_mask(w);
    case Opcode::Lt:
        return sgn ? static_cast<i128>(ea) < static_cast<i128>(eb) : ea < eb;
    case Opcode::Leq:
        return sgn ? static_cast<i128>(ea) <= static_cast<i128>(eb) : ea <= eb;
    case Opcode::Gt:
        return sgn ? static_cast<i128>(ea) > static_cast<i128>(eb) : ea > eb;
    case Opcode::Geq:
        return sgn ? static_cast<i128>(ea) >= static_cast<i128>(eb) : ea >= eb;
    case Opcode::Eq:
        return ea == eb;
    case Opcode::Neq:
        return ea != eb;
    case Opcode::And:
        return (ea & eb) & width_mask(w);
    case Opcode::Or:
        return (ea | eb) & width_mask(w);
    case Opcode::Xor:
        return (ea ^ eb) & width_mask(w);
    case Opcode::Cat:
        return ((a.value << b.width) | b.value) & width_mask(w);
    case Opcode::Dshl:
        return b.value >= 128 ? 0 : (ea << static_cast<unsigned>(b.value)) & width_mask(w);
    case Opcode::Dshr:
        if (sgn) {
            const unsigned n = b.value >= 127 ? 127 : static_cast<unsigned>(b.value);
            return static_cast<u128>(static_cast<i128>(ea) >> n) & width_mask(w);
        }
        return b.value >= 128 ? 0 : (a.value >> static_cast<unsigned>(b.value)) & width_mask(w);
    default:
        return 0;
    }
}

inline u128 mux_value(const BitVec& sel, const BitVec& high, const BitVec& low, unsigned w) {
    return ext(sel.value != 0 ? high : low) & width_mask(w);
}

/// First nonzero selector picks its value, else the default. `at(o)` returns
/// the operand at O-coordinate o.
template <class OperandAt>
inline u128 muxchain_value(uint32_t length, OperandAt&& at, unsigned w) {
    for (uint32_t k = 0; k < length; ++k) {
        if (at(2 * k).value != 0) {
            return ext(at(2 * k + 1)) & width_mask(w);
        }
    }
    return ext(at(2 * length)) & width_mask(w);
}

// Einsum-level operators. op_u acts on one map temporary, op_r folds a map
// temporary into the running reduce temporary, op_s inspects a whole O fiber.

inline BitVec op_u(Opcode op, const BitVec& x, const uint32_t* params, unsigned w, bool s) {
    if (!is_unary(op)) {
        return x;
    }
    return BitVec{unary_value(op, x, params, w), static_cast<uint8_t>(w), s};
}

inline BitVec op_r(Opcode op, const BitVec& acc, const BitVec& x, unsigned w, bool s) {
    if (!is_reducible(op)) {
        return x;
    }
    return BitVec{binary_value(op, acc, x, w), static_cast<uint8_t>(w), s};
}

inline BitVec op_s(Opcode op, std::span<const BitVec> fiber, const uint32_t* params, unsigned w, bool s) {
    u128 v;
    if (op == Opcode::Mux) {
        v = mux_value(fiber[0], fiber[1], fiber[2], w);
    } else {
        v = muxchain_value(params[0], [&](uint32_t o) -> const BitVec& { return fiber[o]; }, w);
    }
    return BitVec{v, static_cast<uint8_t>(w), s};
}

/// Reference evaluation of one operation. Throws ArityMismatch when the
/// operand count does not match the opcode.
BitVec apply_op(Opcode op, std::span<const BitVec> operands, std::span<const uint32_t> params,
                unsigned out_width, bool out_signed);

}  // namespace rtsim::ops
