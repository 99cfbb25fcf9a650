#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rtsim/bitvec.hpp"
#include "rtsim/netlist.hpp"
#include "rtsim/opcode.hpp"

namespace rtsim {

enum class NodeKind : uint8_t { Input, Register, Constant, Op };

struct Node {
    NodeKind kind = NodeKind::Op;
    Opcode op = Opcode::Copy;  // Op only
    std::vector<uint32_t> operands;  // evaluation (O) order
    std::vector<uint32_t> params;
    uint8_t width = 1;
    bool is_signed = false;
    u128 value = 0;    // Constant only
    std::string name;  // netlist signal this node drives, if any
    bool keep = false; // observable; passes must not remove or alias it

    bool is_source() const { return kind != NodeKind::Op; }
    SignalType type() const { return SignalType{width, is_signed}; }
    friend bool operator==(const Node&, const Node&) = default;
};

struct RegisterSink {
    uint32_t reg = 0;   // the Register node
    uint32_t next = 0;  // node producing the next value
    std::optional<uint32_t> reset;
    u128 init = 0;
    friend bool operator==(const RegisterSink&, const RegisterSink&) = default;
};

struct NamedNode {
    std::string name;
    uint32_t node = 0;
    friend bool operator==(const NamedNode&, const NamedNode&) = default;
};

/// Next-state logic of one design. Operands always have smaller ids than
/// their users, so id order is a topological order.
struct DataflowGraph {
    std::string top;
    std::vector<Node> nodes;
    std::vector<uint32_t> inputs;       // Input nodes in port order
    std::vector<NamedNode> outputs;     // output port -> driving node
    std::vector<RegisterSink> registers;
    std::vector<NamedNode> signals;     // kept internal signals (keep_signals)

    std::size_t op_count() const;
    std::size_t count(Opcode op) const;
    friend bool operator==(const DataflowGraph&, const DataflowGraph&) = default;
};

/// One node per primitive application. With `keep_signals` every named wire
/// and node keeps its own node so it survives the passes. Throws
/// CombinationalLoop naming the signals on the cycle.
DataflowGraph build_graph(const Netlist& netlist, bool keep_signals = false);

DataflowGraph constant_propagate(DataflowGraph g);
DataflowGraph copy_propagate(DataflowGraph g);
DataflowGraph fuse_mux_chains(DataflowGraph g);
DataflowGraph dead_code_eliminate(DataflowGraph g);

using PassDump = std::function<void(std::string_view pass, const DataflowGraph&)>;

/// constant -> copy -> fuse -> copy -> dce
DataflowGraph run_pipeline(DataflowGraph g, const PassDump& dump = {});

std::string dump_graph(const DataflowGraph& g);

struct LayeredGraph {
    DataflowGraph graph;
    std::vector<std::vector<uint32_t>> layers;  // Op node ids, ordered by (opcode, id)
    std::vector<int32_t> layer_of;              // -1 for sources

    std::size_t depth() const { return layers.size(); }
};

/// ASAP levelization: layer(n) = 1 + max(layer(operand)), sources at -1.
LayeredGraph levelize(DataflowGraph g);

struct RegisterSlots {
    uint32_t current = 0;
    uint32_t next = 0;
    std::optional<uint32_t> reset;
    u128 init = 0;
};

struct ConstantSlot {
    uint32_t slot = 0;
    u128 value = 0;
};

struct PortSlot {
    std::string name;
    uint32_t slot = 0;
};

struct SlotAssignment {
    std::vector<uint32_t> node_slot;  // per graph node
    uint32_t total = 0;
    std::vector<RegisterSlots> registers;
    std::vector<ConstantSlot> constants;
    std::vector<PortSlot> inputs;
    std::vector<PortSlot> outputs;
    std::vector<PortSlot> signals;  // registers by name, then kept signals
    std::size_t identity_ops = 0;   // always 0: cross-layer reads use producer slots
};

/// Slot order: inputs, registers, constants, then ops in layer order.
SlotAssignment assign_slots(const LayeredGraph& lg);

/// Identity copies the layer-to-layer construction would insert: every value
/// must be forwarded through each layer between its producer and its last
/// reader. Sinks read at layer depth, sources are produced at layer -1.
std::size_t count_naive_identity_ops(const LayeredGraph& lg);

}  // namespace rtsim
