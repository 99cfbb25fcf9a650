#include <algorithm>

#include "rtsim/dfg.hpp"

namespace rtsim {

LayeredGraph levelize(DataflowGraph graph) {
    LayeredGraph lg;
    lg.graph = std::move(graph);
    const DataflowGraph& g = lg.graph;
    lg.layer_of.assign(g.nodes.size(), -1);
    int32_t depth = 0;
    for (uint32_t i = 0; i < g.nodes.size(); ++i) {
        const Node& n = g.nodes[i];
        if (n.is_source()) {
            continue;
        }
        int32_t layer = 0;
        for (uint32_t o : n.operands) {
            layer = std::max(layer, lg.layer_of[o] + 1);
        }
        lg.layer_of[i] = layer;
        depth = std::max(depth, layer + 1);
    }
    lg.layers.resize(static_cast<std::size_t>(depth));
    for (uint32_t i = 0; i < g.nodes.size(); ++i) {
        if (lg.layer_of[i] >= 0) {
            lg.layers[static_cast<std::size_t>(lg.layer_of[i])].push_back(i);
        }
    }
    for (auto& layer : lg.layers) {
        std::stable_sort(layer.begin(), layer.end(), [&](uint32_t a, uint32_t b) {
            return static_cast<unsigned>(g.nodes[a].op) < static_cast<unsigned>(g.nodes[b].op);
        });
    }
    return lg;
}

SlotAssignment assign_slots(const LayeredGraph& lg) {
    const DataflowGraph& g = lg.graph;
    SlotAssignment sa;
    sa.node_slot.assign(g.nodes.size(), 0);
    uint32_t next = 0;
    for (uint32_t id : g.inputs) {
        sa.node_slot[id] = next++;
    }
    for (const auto& r : g.registers) {
        sa.node_slot[r.reg] = next++;
    }
    for (uint32_t i = 0; i < g.nodes.size(); ++i) {
        if (g.nodes[i].kind == NodeKind::Constant) {
            sa.node_slot[i] = next++;
            sa.constants.push_back(ConstantSlot{sa.node_slot[i], g.nodes[i].value});
        }
    }
    for (const auto& layer : lg.layers) {
        for (uint32_t id : layer) {
            sa.node_slot[id] = next++;
        }
    }
    sa.total = next;
    for (const auto& r : g.registers) {
        RegisterSlots rs;
        rs.current = sa.node_slot[r.reg];
        rs.next = sa.node_slot[r.next];
        if (r.reset) {
            rs.reset = sa.node_slot[*r.reset];
        }
        rs.init = r.init;
        sa.registers.push_back(rs);
    }
    for (uint32_t id : g.inputs) {
        sa.inputs.push_back(PortSlot{g.nodes[id].name, sa.node_slot[id]});
    }
    for (const auto& o : g.outputs) {
        sa.outputs.push_back(PortSlot{o.name, sa.node_slot[o.node]});
    }
    for (const auto& r : g.registers) {
        sa.signals.push_back(PortSlot{g.nodes[r.reg].name, sa.node_slot[r.reg]});
    }
    for (const auto& s : g.signals) {
        sa.signals.push_back(PortSlot{s.name, sa.node_slot[s.node]});
    }
    return sa;
}

std::size_t count_naive_identity_ops(const LayeredGraph& lg) {
    const DataflowGraph& g = lg.graph;
    const auto depth = static_cast<int32_t>(lg.depth());
    std::vector<int32_t> last_use(g.nodes.size(), -2);
    for (uint32_t i = 0; i < g.nodes.size(); ++i) {
        for (uint32_t o : g.nodes[i].operands) {
            last_use[o] = std::max(last_use[o], lg.layer_of[i]);
        }
    }
    auto sink = [&](uint32_t id) { last_use[id] = depth; };
    for (const auto& o : g.outputs) {
        sink(o.node);
    }
    for (const auto& r : g.registers) {
        sink(r.next);
        if (r.reset) {
            sink(*r.reset);
        }
    }
    for (const auto& s : g.signals) {
        sink(s.node);
    }
    std::size_t total = 0;
    for (uint32_t i = 0; i < g.nodes.size(); ++i) {
        const int32_t gap = last_use[i] - lg.layer_of[i] - 1;
        if (gap > 0) {
            total += static_cast<std::size_t>(gap);
        }
    }
    return total;
}

}  // namespace rtsim
