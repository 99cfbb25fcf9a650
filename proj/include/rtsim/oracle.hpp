#pragma once

// Direct graph evaluator. Shares nothing with the OIM path except the scalar
// operator semantics in ops.hpp.

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rtsim/bitvec.hpp"
#include "rtsim/dfg.hpp"

namespace rtsim {

struct OracleState {
    std::vector<BitVec> values;   // per node; registers hold committed values
    std::vector<BitVec> outputs;  // per output, as computed in the last cycle
    uint64_t cycle = 0;
};

using Pokes = std::vector<std::pair<std::string, u128>>;

OracleState init_oracle(const DataflowGraph& g);

/// Kahn order over operand edges, independent of node ids.
std::vector<uint32_t> topological_order(const DataflowGraph& g);

/// Applies pokes, evaluates every node, records outputs, commits registers.
void eval_graph_cycle(const DataflowGraph& g, OracleState& state, const Pokes& pokes);

class Oracle {
public:
    explicit Oracle(DataflowGraph g);

    void poke(std::string_view input, u128 value);
    void step();
    BitVec peek(std::string_view name) const;

    const DataflowGraph& graph() const { return g_; }
    const OracleState& state() const { return state_; }

private:
    DataflowGraph g_;
    std::vector<uint32_t> order_;
    OracleState state_;
    std::vector<BitVec> args_;
    std::vector<BitVec> staged_;
};

}  // namespace rtsim
