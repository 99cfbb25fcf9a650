#include "rtsim/oracle.hpp"

#include "rtsim/error.hpp"
#include "rtsim/ops.hpp"

namespace rtsim {

OracleState init_oracle(const DataflowGraph& g) {
    OracleState st;
    st.values.reserve(g.nodes.size());
    for (const Node& n : g.nodes) {
        const u128 v = n.kind == NodeKind::Constant || n.kind == NodeKind::Register ? n.value : 0;
        st.values.push_back(BitVec{v, n.width, n.is_signed});
    }
    for (const auto& o : g.outputs) {
        const Node& n = g.nodes[o.node];
        st.outputs.push_back(BitVec{0, n.width, n.is_signed});
    }
    return st;
}

std::vector<uint32_t> topological_order(const DataflowGraph& g) {
    const std::size_t n = g.nodes.size();
    std::vector<uint32_t> pending(n, 0);
    std::vector<std::vector<uint32_t>> users(n);
    for (uint32_t i = 0; i < n; ++i) {
        for (uint32_t o : g.nodes[i].operands) {
            ++pending[i];
            users[o].push_back(i);
        }
    }
    std::vector<uint32_t> order;
    order.reserve(n);
    for (uint32_t i = 0; i < n; ++i) {
        if (pending[i] == 0) {
            order.push_back(i);
        }
    }
    for (std::size_t head = 0; head < order.size(); ++head) {
        for (uint32_t u : users[order[head]]) {
            if (--pending[u] == 0) {
                order.push_back(u);
            }
        }
    }
    if (order.size() != n) {
        throw CombinationalLoop({}, "graph has a combinational cycle");
    }
    return order;
}

namespace {

void evaluate(const DataflowGraph& g, const std::vector<uint32_t>& order, OracleState& st,
              std::vector<BitVec>& args, std::vector<BitVec>& staged) {
    for (uint32_t id : order) {
        const Node& n = g.nodes[id];
        if (n.kind != NodeKind::Op) {
            continue;
        }
        args.clear();
        for (uint32_t o : n.operands) {
            args.push_back(st.values[o]);
        }
        st.values[id] = ops::apply_op(n.op, args, n.params, n.width, n.is_signed);
    }
    for (std::size_t k = 0; k < g.outputs.size(); ++k) {
        st.outputs[k] = st.values[g.outputs[k].node];
    }
    staged.resize(g.registers.size());
    for (std::size_t k = 0; k < g.registers.size(); ++k) {
        const RegisterSink& r = g.registers[k];
        const Node& reg = g.nodes[r.reg];
        const bool in_reset = r.reset && st.values[*r.reset].value != 0;
        staged[k] = in_reset ? BitVec{r.init, reg.width, reg.is_signed}
                             : make_bitvec(ops::ext(st.values[r.next]), reg.width, reg.is_signed);
    }
    for (std::size_t k = 0; k < g.registers.size(); ++k) {
        st.values[g.registers[k].reg] = staged[k];
    }
    ++st.cycle;
}

void apply_poke(const DataflowGraph& g, OracleState& st, std::string_view name, u128 value) {
    for (uint32_t id : g.inputs) {
        if (g.nodes[id].name == name) {
            if ((value & ~width_mask(g.nodes[id].width)) != 0) {
                throw ValueOutOfRange("value " + to_decimal(value) + " does not fit " + std::string(name));
            }
            st.values[id].value = value;
            return;
        }
    }
    throw UnknownPort(std::string(name));
}

}  // namespace

void eval_graph_cycle(const DataflowGraph& g, OracleState& state, const Pokes& pokes) {
    for (const auto& [name, value] : pokes) {
        apply_poke(g, state, name, value);
    }
    std::vector<BitVec> args;
    std::vector<BitVec> staged;
    evaluate(g, topological_order(g), state, args, staged);
}

Oracle::Oracle(DataflowGraph g) : g_(std::move(g)), order_(topological_order(g_)), state_(init_oracle(g_)) {}

void Oracle::poke(std::string_view input, u128 value) { apply_poke(g_, state_, input, value); }

void Oracle::step() { evaluate(g_, order_, state_, args_, staged_); }

BitVec Oracle::peek(std::string_view name) const {
    for (std::size_t k = 0; k < g_.outputs.size(); ++k) {
        if (g_.outputs[k].name == name) {
            return state_.outputs[k];
        }
    }
    for (uint32_t id : g_.inputs) {
        if (g_.nodes[id].name == name) {
            return state_.values[id];
        }
    }
    for (const auto& r : g_.registers) {
        if (g_.nodes[r.reg].name == name) {
            return state_.values[r.reg];
        }
    }
    for (const auto& s : g_.signals) {
        if (s.name == name) {
            return state_.values[s.node];
        }
    }
    throw UnknownPort(std::string(name));
}

}  // namespace rtsim
