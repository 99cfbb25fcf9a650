#include "rtsim/dfg.hpp"

#include <algorithm>

#include "rtsim/error.hpp"

namespace rtsim {

std::size_t DataflowGraph::op_count() const {
    return static_cast<std::size_t>(
        std::count_if(nodes.begin(), nodes.end(), [](const Node& n) { return n.kind == NodeKind::Op; }));
}

std::size_t DataflowGraph::count(Opcode op) const {
    return static_cast<std::size_t>(std::count_if(
        nodes.begin(), nodes.end(), [op](const Node& n) { return n.kind == NodeKind::Op && n.op == op; }));
}

namespace {

class GraphBuilder {
public:
    GraphBuilder(const Netlist& net, bool keep) : net_(net), keep_(keep) {
        sig_node_.assign(net.signals.size(), kNone);
        state_.assign(net.signals.size(), 0);
        driver_.assign(net.signals.size(), kNone);
        g_.nodes.reserve(2 * net.signals.size());
        for (uint32_t i = 0; i < net.assignments.size(); ++i) {
            driver_[net.assignments[i].target] = i;
        }
    }

    DataflowGraph run() {
        g_.top = net_.top;
        for (uint32_t s : net_.inputs) {
            Node n;
            n.kind = NodeKind::Input;
            set_type(n, net_.signals[s]);
            sig_node_[s] = add(std::move(n));
            g_.inputs.push_back(sig_node_[s]);
        }
        for (const auto& r : net_.registers) {
            Node n;
            n.kind = NodeKind::Register;
            n.value = r.init;
            set_type(n, net_.signals[r.signal]);
            sig_node_[r.signal] = add(std::move(n));
        }
        for (uint32_t s = 0; s < net_.signals.size(); ++s) {
            if (net_.signals[s].kind == SignalKind::Constant) {
                Node n;
                n.kind = NodeKind::Constant;
                n.value = net_.signals[s].value;
                set_type(n, net_.signals[s]);
                sig_node_[s] = add(std::move(n));
            }
        }
        for (uint32_t s : net_.outputs) {
            uint32_t id = resolve_signal(s);
            if (g_.nodes[id].kind == NodeKind::Register) {
                // keeps the combinational (pre-commit) value observable
                id = add_copy(id, net_.signals[s].name);
            }
            g_.outputs.push_back(NamedNode{net_.signals[s].name, id});
        }
        for (const auto& r : net_.registers) {
            RegisterSink sink;
            sink.reg = sig_node_[r.signal];
            sink.next = resolve_expr(net_.assignments[driver_[r.signal]].expr);
            if (r.reset) {
                sink.reset = resolve_signal(*r.reset);
            }
            sink.init = r.init;
            g_.registers.push_back(sink);
        }
        for (uint32_t s = 0; s < net_.signals.size(); ++s) {
            const SignalKind k = net_.signals[s].kind;
            if (k == SignalKind::Wire || k == SignalKind::Node) {
                const uint32_t id = resolve_signal(s);
                if (keep_) {
                    g_.signals.push_back(NamedNode{net_.signals[s].name, id});
                }
            }
        }
        return std::move(g_);
    }

private:
    static constexpr uint32_t kNone = ~uint32_t{0};

    static void set_type(Node& n, const NetSignal& s) {
        n.width = s.width;
        n.is_signed = s.is_signed;
        n.name = s.name;
    }

    uint32_t add(Node n) {
        g_.nodes.push_back(std::move(n));
        return static_cast<uint32_t>(g_.nodes.size() - 1);
    }

    uint32_t add_copy(uint32_t src, const std::string& name) {
        Node n;
        n.op = Opcode::Copy;
        n.operands = {src};
        n.width = g_.nodes[src].width;
        n.is_signed = g_.nodes[src].is_signed;
        n.name = name;
        n.keep = true;
        return add(std::move(n));
    }

    uint32_t resolve_signal(uint32_t s) {
        if (sig_node_[s] != kNone) {
            return sig_node_[s];
        }
        if (state_[s] == 1) {
            std::vector<std::string> cycle;
            auto it = std::find(stack_.begin(), stack_.end(), s);
            for (; it != stack_.end(); ++it) {
                cycle.push_back(net_.signals[*it].name);
            }
            std::string msg = "combinational loop:";
            for (const auto& c : cycle) {
                msg += " " + c + " ->";
            }
            msg += " " + net_.signals[s].name;
            throw CombinationalLoop(std::move(cycle), msg);
        }
        if (driver_[s] == kNone) {
            throw UndrivenSignal(net_.signals[s].line, net_.signals[s].name);
        }
        state_[s] = 1;
        stack_.push_back(s);
        const NetExpr& expr = net_.assignments[driver_[s]].expr;
        uint32_t id = resolve_expr(expr);
        const NetSignal& sig = net_.signals[s];
        if (expr.kind == NetExpr::Kind::Op) {
            g_.nodes[id].name = sig.name;
            g_.nodes[id].keep = g_.nodes[id].keep || (keep_ && sig.kind != SignalKind::Output);
        } else if (keep_ && sig.kind != SignalKind::Output) {
            id = add_copy(id, sig.name);
        }
        stack_.pop_back();
        state_[s] = 2;
        sig_node_[s] = id;
        return id;
    }

    uint32_t resolve_expr(const NetExpr& e) {
        if (e.kind == NetExpr::Kind::Signal) {
            return resolve_signal(e.signal);
        }
        Node n;
        n.op = e.op;
        n.params = e.params;
        n.width = e.type.width;
        n.is_signed = e.type.is_signed;
        for (const auto& a : e.args) {
            n.operands.push_back(resolve_expr(a));
        }
        return add(std::move(n));
    }

    const Netlist& net_;
    bool keep_;
    DataflowGraph g_;
    std::vector<uint32_t> sig_node_;
    std::vector<uint8_t> state_;
    std::vector<uint32_t> driver_;
    std::vector<uint32_t> stack_;
};

std::string type_string(const Node& n) {
    return std::string(n.is_signed ? "SInt<" : "UInt<") + std::to_string(n.width) + ">";
}

}  // namespace

DataflowGraph build_graph(const Netlist& netlist, bool keep_signals) {
    return GraphBuilder(netlist, keep_signals).run();
}

std::string dump_graph(const DataflowGraph& g) {
    std::string out;
    for (uint32_t i = 0; i < g.nodes.size(); ++i) {
        const Node& n = g.nodes[i];
        out += "%" + std::to_string(i) + " : " + type_string(n) + " = ";
        switch (n.kind) {
        case NodeKind::Input: out += "input"; break;
        case NodeKind::Register: out += "reg init " + to_decimal(n.value); break;
        case NodeKind::Constant: out += "const " + to_decimal(n.value); break;
        case NodeKind::Op: {
            out += std::string(name(n.op)) + "(";
            bool first = true;
            for (uint32_t o : n.operands) {
                out += (first ? "%" : ", %") + std::to_string(o);
                first = false;
            }
            for (uint32_t p : n.params) {
                out += (first ? "" : ", ") + std::to_string(p);
                first = false;
            }
            out += ")";
            break;
        }
        }
        if (!n.name.empty()) {
            out += "  ; " + n.name;
        }
        if (n.keep) {
            out += " [keep]";
        }
        out += "\n";
    }
    for (const auto& o : g.outputs) {
        out += "output " + o.name + " <= %" + std::to_string(o.node) + "\n";
    }
    for (const auto& r : g.registers) {
        out += "register %" + std::to_string(r.reg) + " <= %" + std::to_string(r.next);
        if (r.reset) {
            out += " reset %" + std::to_string(*r.reset) + " init " + to_decimal(r.init);
        }
        out += "\n";
    }
    return out;
}

}  // namespace rtsim
