#include <algorithm>
#include <numeric>

#include "rtsim/dfg.hpp"
#include "rtsim/ops.hpp"

namespace rtsim {

namespace {

// Drops nodes with alive[i] == false and redirects every reference x to rep[x].
DataflowGraph rebuild(DataflowGraph g, const std::vector<uint32_t>& rep, const std::vector<bool>& alive) {
    std::vector<uint32_t> new_id(g.nodes.size(), ~uint32_t{0});
    DataflowGraph out;
    out.top = std::move(g.top);
    out.nodes.reserve(static_cast<std::size_t>(std::count(alive.begin(), alive.end(), true)));
    for (uint32_t i = 0; i < g.nodes.size(); ++i) {
        if (alive[i]) {
            new_id[i] = static_cast<uint32_t>(out.nodes.size());
            out.nodes.push_back(std::move(g.nodes[i]));
        }
    }
    auto map = [&](uint32_t x) { return new_id[rep[x]]; };
    for (auto& n : out.nodes) {
        for (auto& o : n.operands) {
            o = map(o);
        }
    }
    for (uint32_t i : g.inputs) {
        out.inputs.push_back(map(i));
    }
    for (const auto& o : g.outputs) {
        out.outputs.push_back(NamedNode{o.name, map(o.node)});
    }
    for (const auto& r : g.registers) {
        RegisterSink s = r;
        s.reg = map(r.reg);
        s.next = map(r.next);
        if (r.reset) {
            s.reset = map(*r.reset);
        }
        out.registers.push_back(s);
    }
    for (const auto& s : g.signals) {
        out.signals.push_back(NamedNode{s.name, map(s.node)});
    }
    return out;
}

std::vector<uint32_t> identity_map(std::size_t n) {
    std::vector<uint32_t> rep(n);
    std::iota(rep.begin(), rep.end(), 0u);
    return rep;
}

void make_constant(Node& n, u128 value) {
    n.kind = NodeKind::Constant;
    n.op = Opcode::Copy;
    n.operands.clear();
    n.params.clear();
    n.value = value & width_mask(n.width);
}

// Replaces a select with one of its data operands, padding when narrower.
void make_forward(Node& n, uint32_t src, const Node& src_node) {
    n.operands = {src};
    if (src_node.width == n.width) {
        n.op = Opcode::Copy;
        n.params.clear();
    } else {
        n.op = Opcode::Pad;
        n.params = {n.width};
    }
}

// Single-operand nodes whose result equals their operand bit for bit.
bool is_passthrough(const Node& n, const Node& a) {
    if (n.kind != NodeKind::Op || n.operands.size() != 1 || n.width != a.width || n.is_signed != a.is_signed) {
        return false;
    }
    switch (n.op) {
    case Opcode::Copy:
    case Opcode::Pad:
    case Opcode::AsUInt:
    case Opcode::AsSInt:
    case Opcode::Cvt:
        return true;
    case Opcode::Bits:
        return n.params[1] == 0 && !a.is_signed;
    case Opcode::Head:
    case Opcode::Tail:
        return !a.is_signed;
    case Opcode::Shl:
    case Opcode::Shr:
        return n.params[0] == 0;
    default:
        return false;
    }
}

}  // namespace

DataflowGraph constant_propagate(DataflowGraph g) {
    DataflowGraph out = std::move(g);
    auto is_const = [&](uint32_t id) { return out.nodes[id].kind == NodeKind::Constant; };
    auto const_value = [&](uint32_t id) {
        const Node& c = out.nodes[id];
        return BitVec{c.value, c.width, c.is_signed};
    };
    // Operands precede users, so one pass in id order reaches the fixpoint.
    for (auto& n : out.nodes) {
        if (n.kind != NodeKind::Op) {
            continue;
        }
        if (std::all_of(n.operands.begin(), n.operands.end(), is_const)) {
            std::vector<BitVec> args;
            for (uint32_t o : n.operands) {
                args.push_back(const_value(o));
            }
            make_constant(n, ops::apply_op(n.op, args, n.params, n.width, n.is_signed).value);
            continue;
        }
        if (n.op == Opcode::And || n.op == Opcode::Mul) {
            for (uint32_t o : n.operands) {
                if (is_const(o) && out.nodes[o].value == 0) {
                    make_constant(n, 0);
                    break;
                }
            }
            continue;
        }
        if (n.op == Opcode::Mux && is_const(n.operands[0])) {
            const uint32_t pick = out.nodes[n.operands[0]].value != 0 ? n.operands[1] : n.operands[2];
            make_forward(n, pick, out.nodes[pick]);
            continue;
        }
        if (n.op == Opcode::MuxChain) {
            std::vector<uint32_t> kept;
            uint32_t fallback = n.operands.back();
            bool changed = false;
            for (uint32_t k = 0; k < n.params[0]; ++k) {
                const uint32_t sel = n.operands[2 * k];
                if (!is_const(sel)) {
                    kept.push_back(sel);
                    kept.push_back(n.operands[2 * k + 1]);
                    continue;
                }
                changed = true;
                if (out.nodes[sel].value != 0) {
                    fallback = n.operands[2 * k + 1];
                    break;
                }
            }
            if (!changed) {
                continue;
            }
            const uint32_t length = static_cast<uint32_t>(kept.size() / 2);
            if (length == 0) {
                make_forward(n, fallback, out.nodes[fallback]);
            } else {
                kept.push_back(fallback);
                n.operands = std::move(kept);
                n.op = length == 1 ? Opcode::Mux : Opcode::MuxChain;
                n.params = length == 1 ? std::vector<uint32_t>{} : std::vector<uint32_t>{length};
            }
        }
    }
    return out;
}

DataflowGraph copy_propagate(DataflowGraph g) {
    std::vector<uint32_t> rep = identity_map(g.nodes.size());
    std::vector<bool> alive(g.nodes.size(), true);
    std::vector<bool> drives_output(g.nodes.size(), false);
    for (const auto& o : g.outputs) {
        drives_output[o.node] = true;
    }
    DataflowGraph work = std::move(g);
    for (uint32_t i = 0; i < work.nodes.size(); ++i) {
        Node& n = work.nodes[i];
        for (auto& o : n.operands) {
            o = rep[o];
        }
        if (n.kind != NodeKind::Op || n.keep || !is_passthrough(n, work.nodes[n.operands[0]])) {
            continue;
        }
        const uint32_t root = n.operands[0];
        if (drives_output[i] && work.nodes[root].kind == NodeKind::Register) {
            // outputs show the pre-commit value, so they cannot share the register slot
            n.op = Opcode::Copy;
            n.params.clear();
            continue;
        }
        rep[i] = root;
        alive[i] = false;
    }
    return rebuild(std::move(work), rep, alive);
}

DataflowGraph fuse_mux_chains(DataflowGraph g) {
    const std::size_t n = g.nodes.size();
    std::vector<uint32_t> uses(n, 0);
    for (const auto& node : g.nodes) {
        for (uint32_t o : node.operands) {
            ++uses[o];
        }
    }
    for (const auto& o : g.outputs) {
        ++uses[o.node];
    }
    for (const auto& r : g.registers) {
        ++uses[r.next];
        if (r.reset) {
            ++uses[*r.reset];
        }
    }
    for (const auto& s : g.signals) {
        ++uses[s.node];
    }
    auto is_mux = [&](uint32_t id) { return g.nodes[id].kind == NodeKind::Op && g.nodes[id].op == Opcode::Mux; };
    // A link continues the chain of its only user's low input.
    std::vector<bool> is_link(n, false);
    for (uint32_t i = 0; i < n; ++i) {
        if (is_mux(i)) {
            const uint32_t low = g.nodes[i].operands[2];
            if (is_mux(low) && !g.nodes[low].keep && uses[low] == 1) {
                is_link[low] = true;
            }
        }
    }
    std::vector<bool> alive(n, true);
    for (uint32_t head = 0; head < n; ++head) {
        if (!is_mux(head) || is_link[head] || !is_link[g.nodes[head].operands[2]]) {
            continue;
        }
        std::vector<uint32_t> operands;
        uint32_t cur = head;
        uint32_t length = 0;
        for (;;) {
            const Node& m = g.nodes[cur];
            operands.push_back(m.operands[0]);
            operands.push_back(m.operands[1]);
            ++length;
            if (cur != head) {
                alive[cur] = false;
            }
            if (!is_link[m.operands[2]]) {
                operands.push_back(m.operands[2]);
                break;
            }
            cur = m.operands[2];
        }
        Node& h = g.nodes[head];
        h.op = Opcode::MuxChain;
        h.operands = std::move(operands);
        h.params = {length};
    }
    return rebuild(std::move(g), identity_map(n), alive);
}

DataflowGraph dead_code_eliminate(DataflowGraph g) {
    const std::size_t n = g.nodes.size();
    std::vector<bool> live(n, false);
    std::vector<uint32_t> work;
    auto mark = [&](uint32_t id) {
        if (!live[id]) {
            live[id] = true;
            work.push_back(id);
        }
    };
    for (uint32_t i = 0; i < n; ++i) {
        const Node& node = g.nodes[i];
        if (node.kind == NodeKind::Input || node.kind == NodeKind::Register || node.keep) {
            mark(i);
        }
    }
    for (const auto& o : g.outputs) {
        mark(o.node);
    }
    for (const auto& r : g.registers) {
        mark(r.next);
        if (r.reset) {
            mark(*r.reset);
        }
    }
    for (const auto& s : g.signals) {
        mark(s.node);
    }
    while (!work.empty()) {
        const uint32_t id = work.back();
        work.pop_back();
        for (uint32_t o : g.nodes[id].operands) {
            mark(o);
        }
    }
    return rebuild(std::move(g), identity_map(n), live);
}

DataflowGraph run_pipeline(DataflowGraph g, const PassDump& dump) {
    auto step = [&](std::string_view name, DataflowGraph next) {
        if (dump) {
            dump(name, next);
        }
        return next;
    };
    DataflowGraph cur = step("constant_propagate", constant_propagate(std::move(g)));
    cur = step("copy_propagate", copy_propagate(std::move(cur)));
    cur = step("fuse_mux_chains", fuse_mux_chains(std::move(cur)));
    cur = step("copy_propagate", copy_propagate(std::move(cur)));
    return step("dead_code_eliminate", dead_code_eliminate(std::move(cur)));
}

}  // namespace rtsim
