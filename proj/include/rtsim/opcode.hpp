#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>

namespace rtsim {

/// Operation types of the N rank. Tag values are serialized, so the order is
/// part of the on-disk format.
enum class Opcode : uint8_t {
    // reducible (binary, folded pairwise in operand order)
    Add, Sub, Mul, Div, Rem,
    Lt, Leq, Gt, Geq, Eq, Neq,
    And, Or, Xor, Cat, Dshl, Dshr,
    // unary
    Pad, AsUInt, AsSInt, Shl, Shr, Cvt, Neg, Not,
    Andr, Orr, Xorr, Bits, Head, Tail, Copy,
    // select
    Mux, MuxChain,
};

inline constexpr unsigned kNumOpcodes = static_cast<unsigned>(Opcode::MuxChain) + 1;

enum class OpClass : uint8_t { Reducible, Unary, Select };

struct OpcodeInfo {
    std::string_view name;
    OpClass cls;
    uint8_t arity;       // 0 for variadic (MuxChain)
    uint8_t num_params;  // static integer parameters
};

inline constexpr OpcodeInfo kOpcodeTable[kNumOpcodes] = {
    {"add", OpClass::Reducible, 2, 0},   {"sub", OpClass::Reducible, 2, 0},
    {"mul", OpClass::Reducible, 2, 0},   {"div", OpClass::Reducible, 2, 0},
    {"rem", OpClass::Reducible, 2, 0},   {"lt", OpClass::Reducible, 2, 0},
    {"leq", OpClass::Reducible, 2, 0},   {"gt", OpClass::Reducible, 2, 0},
    {"geq", OpClass::Reducible, 2, 0},   {"eq", OpClass::Reducible, 2, 0},
    {"neq", OpClass::Reducible, 2, 0},   {"and", OpClass::Reducible, 2, 0},
    {"or", OpClass::Reducible, 2, 0},    {"xor", OpClass::Reducible, 2, 0},
    {"cat", OpClass::Reducible, 2, 0},   {"dshl", OpClass::Reducible, 2, 0},
    {"dshr", OpClass::Reducible, 2, 0},  {"pad", OpClass::Unary, 1, 1},
    {"asUInt", OpClass::Unary, 1, 0},    {"asSInt", OpClass::Unary, 1, 0},
    {"shl", OpClass::Unary, 1, 1},       {"shr", OpClass::Unary, 1, 1},
    {"cvt", OpClass::Unary, 1, 0},       {"neg", OpClass::Unary, 1, 0},
    {"not", OpClass::Unary, 1, 0},       {"andr", OpClass::Unary, 1, 0},
    {"orr", OpClass::Unary, 1, 0},       {"xorr", OpClass::Unary, 1, 0},
    {"bits", OpClass::Unary, 1, 2},      {"head", OpClass::Unary, 1, 1},
    {"tail", OpClass::Unary, 1, 1},      {"copy", OpClass::Unary, 1, 0},
    {"mux", OpClass::Select, 3, 0},      {"muxchain", OpClass::Select, 0, 1},
};

constexpr const OpcodeInfo& info(Opcode op) { return kOpcodeTable[static_cast<unsigned>(op)]; }
constexpr std::string_view name(Opcode op) { return info(op).name; }
constexpr bool is_select(Opcode op) { return info(op).cls == OpClass::Select; }
constexpr bool is_unary(Opcode op) { return info(op).cls == OpClass::Unary; }
constexpr bool is_reducible(Opcode op) { return info(op).cls == OpClass::Reducible; }

/// Looks up an opcode by its FIRRTL spelling (`add`, `asUInt`, ...).
std::optional<Opcode> opcode_from_name(std::string_view name);

/// Operand count. A mux chain of length k (params[0]) reads 2k+1 operands:
/// (sel0, val0, ..., sel{k-1}, val{k-1}, default).
constexpr unsigned arity(Opcode op, std::span<const uint32_t> params) {
    if (op == Opcode::MuxChain) {
        return params.empty() ? 0 : 2 * params[0] + 1;
    }
    return info(op).arity;
}

struct SignalType {
    uint8_t width = 1;
    bool is_signed = false;
    friend bool operator==(const SignalType&, const SignalType&) = default;
};

/// FIRRTL result-type rules. Throws TypeError on ill-typed operands and
/// UnsupportedConstruct when the result would exceed 128 bits.
SignalType infer_type(Opcode op, std::span<const SignalType> operands,
                      std::span<const uint32_t> params);

}  // namespace rtsim
