#pragma once

// Hierarchy-flattened single-module netlist.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rtsim/bitvec.hpp"
#include "rtsim/firrtl.hpp"
#include "rtsim/opcode.hpp"

namespace rtsim {

enum class SignalKind : uint8_t { Input, Output, Register, Wire, Node, Constant };

std::string_view to_string(SignalKind kind);

struct NetSignal {
    std::string name;  // hierarchical, e.g. "i0.x"
    uint8_t width = 1;
    bool is_signed = false;
    SignalKind kind = SignalKind::Wire;
    u128 value = 0;  // Constant only
    int line = 0;

    SignalType type() const { return SignalType{width, is_signed}; }
};

struct NetExpr {
    enum class Kind : uint8_t { Signal, Op };
    Kind kind = Kind::Signal;
    uint32_t signal = 0;
    Opcode op = Opcode::Copy;
    std::vector<NetExpr> args;
    std::vector<uint32_t> params;
    SignalType type;
};

struct Assignment {
    uint32_t target = 0;
    NetExpr expr;
    int line = 0;
};

struct RegisterInfo {
    uint32_t signal = 0;
    std::optional<uint32_t> reset;  // UInt<1> signal; register loads init while it is 1
    u128 init = 0;
};

struct Netlist {
    std::string top;
    std::vector<NetSignal> signals;  // ids are dense indices
    std::vector<Assignment> assignments;
    std::vector<RegisterInfo> registers;
    std::vector<uint32_t> inputs;   // top-level data inputs in port order
    std::vector<uint32_t> outputs;  // top-level outputs in port order

    std::optional<uint32_t> find_signal(std::string_view name) const;
};

/// Inlines every instance below the top module. Throws MultipleDrivers,
/// UndrivenSignal, ClockDomainError, TypeError or UnsupportedConstruct.
Netlist elaborate(const firrtl::CircuitAst& ast);

}  // namespace rtsim
