#include <map>
#include <tuple>

#include "rtsim/error.hpp"
#include "rtsim/string_map.hpp"
#include "rtsim/netlist.hpp"
#include "rtsim/ops.hpp"

namespace rtsim {

std::string_view to_string(SignalKind kind) {
    switch (kind) {
    case SignalKind::Input: return "input";
    case SignalKind::Output: return "output";
    case SignalKind::Register: return "register";
    case SignalKind::Wire: return "wire";
    case SignalKind::Node: return "node";
    case SignalKind::Constant: return "constant";
    }
    return "?";
}

std::optional<uint32_t> Netlist::find_signal(std::string_view name) const {
    for (uint32_t i = 0; i < signals.size(); ++i) {
        if (signals[i].name == name) {
            return i;
        }
    }
    return std::nullopt;
}

namespace {

using firrtl::Expr;

// A local name resolves to either a data signal or a clock entity.
struct Binding {
    bool is_clock = false;
    uint32_t id = 0;
    bool is_port = false;
    bool is_input_port = false;
};

struct InstanceBinding {
    StringMap<Binding> ports;
};

struct ClockEntity {
    std::string name;
    std::optional<uint32_t> driver;
    int line = 0;
};

struct PendingRegister {
    uint32_t signal;
    uint32_t clock;
    int line;
};

class Elaborator {
public:
    explicit Elaborator(const firrtl::CircuitAst& ast) : ast_(ast) {}

    Netlist run() {
        net_.top = ast_.top;
        const firrtl::ModuleAst* top = ast_.find_module(ast_.top);
        inline_module(*top, "", nullptr);
        check_clocks();
        check_drivers();
        return std::move(net_);
    }

private:
    struct Scope {
        std::string prefix;
        StringMap<Binding> names;
        StringMap<InstanceBinding> instances;
        std::map<std::tuple<bool, unsigned, u128>, uint32_t> literals;
    };

    uint32_t add_signal(std::string name, SignalType type, SignalKind kind, int line, u128 value = 0) {
        net_.signals.push_back(NetSignal{std::move(name), type.width, type.is_signed, kind, value, line});
        driven_.push_back(false);
        return static_cast<uint32_t>(net_.signals.size() - 1);
    }

    uint32_t add_clock(std::string name, int line) {
        clocks_.push_back(ClockEntity{std::move(name), std::nullopt, line});
        return static_cast<uint32_t>(clocks_.size() - 1);
    }

    // Instantiates `m`. `ports` receives the port bindings for a child instance.
    void inline_module(const firrtl::ModuleAst& m, const std::string& prefix, InstanceBinding* ports) {
        Scope scope;
        scope.prefix = prefix;
        scope.names.reserve(m.ports.size() + m.statements.size());
        const bool is_top = ports == nullptr;
        for (const auto& p : m.ports) {
            Binding b;
            b.is_port = true;
            b.is_input_port = p.direction == firrtl::Direction::Input;
            if (p.type.is_clock()) {
                b.is_clock = true;
                b.id = add_clock(prefix + p.name, p.line);
                if (is_top) {
                    top_clock_ = b.id;
                }
            } else {
                const SignalKind kind = !is_top ? SignalKind::Wire
                                        : b.is_input_port ? SignalKind::Input
                                                          : SignalKind::Output;
                b.id = add_signal(prefix + p.name, SignalType{p.type.width, p.type.is_signed()}, kind, p.line);
                if (kind == SignalKind::Input) {
                    net_.inputs.push_back(b.id);
                    driven_[b.id] = true;
                } else if (kind == SignalKind::Output) {
                    net_.outputs.push_back(b.id);
                }
            }
            scope.names[p.name] = b;
            if (ports) {
                ports->ports[p.name] = b;
            }
        }
        for (const auto& st : m.statements) {
            std::visit([&](const auto& s) { this->statement(scope, s, st.line); }, st.body);
        }
    }

    void statement(Scope& scope, const firrtl::WireStmt& w, int line) {
        Binding b;
        if (w.type.is_clock()) {
            b.is_clock = true;
            b.id = add_clock(scope.prefix + w.name, line);
        } else {
            b.id = add_signal(scope.prefix + w.name, SignalType{w.type.width, w.type.is_signed()},
                              SignalKind::Wire, line);
        }
        scope.names[w.name] = b;
    }

    void statement(Scope& scope, const firrtl::RegStmt& r, int line) {
        const SignalType type{r.type.width, r.type.is_signed()};
        const uint32_t id = add_signal(scope.prefix + r.name, type, SignalKind::Register, line);
        const Binding clk = resolve_clock(scope, r.clock, line);
        pending_regs_.push_back(PendingRegister{id, clk.id, line});
        RegisterInfo info;
        info.signal = id;
        if (r.has_reset) {
            NetExpr rst = lower(scope, r.reset, line);
            if (rst.kind != NetExpr::Kind::Signal) {
                throw UnsupportedConstruct(line, "reset must be a signal reference");
            }
            if (rst.type.width != 1 || rst.type.is_signed) {
                throw TypeError(line, "reset of '" + r.name + "' must be UInt<1>");
            }
            NetExpr init = lower(scope, r.init, line);
            if (init.type.is_signed != type.is_signed || init.type.width > type.width) {
                throw TypeError(line, "init value of '" + r.name + "' does not match the register type");
            }
            info.reset = rst.signal;
            info.init = extend(const_eval(init, line), init.type.width, init.type.is_signed) &
                        width_mask(type.width);
        }
        net_.registers.push_back(info);
        scope.names[r.name] = Binding{false, id, false, false};
    }

    void statement(Scope& scope, const firrtl::NodeStmt& n, int line) {
        if (n.value.kind == Expr::Kind::Ref) {
            auto it = scope.names.find(n.value.name);
            if (it != scope.names.end() && it->second.is_clock) {
                throw UnsupportedConstruct(line, "clock-typed node");
            }
        }
        NetExpr e = lower(scope, n.value, line);
        const uint32_t id = add_signal(scope.prefix + n.name, e.type, SignalKind::Node, line);
        driven_[id] = true;
        net_.assignments.push_back(Assignment{id, std::move(e), line});
        scope.names[n.name] = Binding{false, id, false, false};
    }

    void statement(Scope& scope, const firrtl::ConnectStmt& c, int line) {
        const Binding target = resolve_target(scope, c.target, line);
        if (target.is_clock) {
            const Binding src = resolve_clock(scope, c.value, line);
            ClockEntity& ce = clocks_[target.id];
            if (ce.driver) {
                throw MultipleDrivers(line, scope.prefix + print_expr(c.target));
            }
            ce.driver = src.id;
            return;
        }
        NetExpr e = lower(scope, c.value, line);
        const NetSignal& sig = net_.signals[target.id];
        if (sig.is_signed != e.type.is_signed) {
            throw TypeError(line, "connect of " + std::string(e.type.is_signed ? "SInt" : "UInt") + " to " +
                                      (sig.is_signed ? "SInt" : "UInt") + " '" + sig.name + "'");
        }
        if (e.type.width > sig.width) {
            throw TypeError(line, "connect of width " + std::to_string(e.type.width) + " to '" + sig.name +
                                      "' of width " + std::to_string(sig.width));
        }
        if (e.type.width < sig.width) {
            NetExpr pad;
            pad.kind = NetExpr::Kind::Op;
            pad.op = Opcode::Pad;
            pad.params = {sig.width};
            pad.type = sig.type();
            pad.args.push_back(std::move(e));
            e = std::move(pad);
        }
        if (driven_[target.id]) {
            throw MultipleDrivers(line, sig.name);
        }
        driven_[target.id] = true;
        net_.assignments.push_back(Assignment{target.id, std::move(e), line});
    }

    void statement(Scope& scope, const firrtl::InstStmt& in, int line) {
        (void)line;
        InstanceBinding ports;
        inline_module(*ast_.find_module(in.module), scope.prefix + in.name + ".", &ports);
        scope.instances[in.name] = std::move(ports);
    }

    void statement(Scope&, const firrtl::SkipStmt&, int) {}

    const Binding& lookup(Scope& scope, const Expr& e, int line) {
        if (e.kind == Expr::Kind::Ref) {
            auto it = scope.names.find(e.name);
            if (it == scope.names.end()) {
                throw ElaborationError(line, "unknown name '" + e.name + "'");
            }
            return it->second;
        }
        auto inst = scope.instances.find(e.name);
        if (inst == scope.instances.end()) {
            throw ElaborationError(line, "unknown instance '" + e.name + "'");
        }
        auto port = inst->second.ports.find(e.field);
        if (port == inst->second.ports.end()) {
            throw ElaborationError(line, "instance '" + e.name + "' has no port '" + e.field + "'");
        }
        return port->second;
    }

    Binding resolve_target(Scope& scope, const Expr& e, int line) {
        const Binding& b = lookup(scope, e, line);
        if (e.kind == Expr::Kind::Ref) {
            if (b.is_port && b.is_input_port) {
                throw ElaborationError(line, "cannot connect to input port '" + e.name + "'");
            }
            if (!b.is_clock && net_.signals[b.id].kind == SignalKind::Node) {
                throw ElaborationError(line, "cannot connect to node '" + e.name + "'");
            }
        } else if (!b.is_input_port) {
            throw ElaborationError(line, "cannot connect to output '" + print_expr(e) + "' of an instance");
        }
        return b;
    }

    Binding resolve_clock(Scope& scope, const Expr& e, int line) {
        if (e.kind != Expr::Kind::Ref && e.kind != Expr::Kind::Field) {
            throw ClockDomainError(line, "clock must be a clock signal reference");
        }
        const Binding& b = lookup(scope, e, line);
        if (!b.is_clock) {
            throw ClockDomainError(line, "'" + print_expr(e) + "' is not a clock");
        }
        return b;
    }

    NetExpr lower(Scope& scope, const Expr& e, int line) {
        NetExpr out;
        switch (e.kind) {
        case Expr::Kind::Ref:
        case Expr::Kind::Field: {
            const Binding& b = lookup(scope, e, line);
            if (b.is_clock) {
                throw TypeError(line, "clock '" + print_expr(e) + "' used as data");
            }
            out.signal = b.id;
            out.type = net_.signals[b.id].type();
            return out;
        }
        case Expr::Kind::Literal: {
            const auto& lit = e.literal;
            const auto key = std::make_tuple(lit.is_signed, unsigned{lit.width}, lit.bits);
            auto it = scope.literals.find(key);
            if (it == scope.literals.end()) {
                const std::string cname =
                    scope.prefix + "$const_" + (lit.is_signed ? "s" : "u") + std::to_string(lit.width) + "_" +
                    to_decimal(lit.bits);
                const uint32_t id = add_signal(cname, SignalType{lit.width, lit.is_signed}, SignalKind::Constant,
                                               line, lit.bits);
                driven_[id] = true;
                it = scope.literals.emplace(key, id).first;
            }
            out.signal = it->second;
            out.type = SignalType{lit.width, lit.is_signed};
            return out;
        }
        case Expr::Kind::Prim:
        case Expr::Kind::Mux:
            break;
        }
        out.kind = NetExpr::Kind::Op;
        out.op = e.kind == Expr::Kind::Mux ? Opcode::Mux : e.op;
        out.params = e.params;
        std::vector<SignalType> types;
        for (const auto& a : e.args) {
            out.args.push_back(lower(scope, a, line));
            types.push_back(out.args.back().type);
        }
        try {
            out.type = infer_type(out.op, types, out.params);
        } catch (const UnsupportedConstruct& err) {
            throw UnsupportedConstruct(line, err.construct());
        } catch (const TypeError& err) {
            throw TypeError(line, err.message());
        }
        return out;
    }

    u128 const_eval(const NetExpr& e, int line) {
        if (e.kind == NetExpr::Kind::Signal) {
            const NetSignal& s = net_.signals[e.signal];
            if (s.kind != SignalKind::Constant) {
                throw ElaborationError(line, "register init must be a constant, found '" + s.name + "'");
            }
            return s.value;
        }
        std::vector<BitVec> args;
        for (const auto& a : e.args) {
            args.push_back(BitVec{const_eval(a, line), a.type.width, a.type.is_signed});
        }
        return ops::apply_op(e.op, args, e.params, e.type.width, e.type.is_signed).value;
    }

    void check_clocks() {
        for (const auto& pr : pending_regs_) {
            uint32_t c = pr.clock;
            std::size_t hops = 0;
            while (clocks_[c].driver && hops++ <= clocks_.size()) {
                c = *clocks_[c].driver;
            }
            if (!top_clock_ || c != *top_clock_) {
                throw ClockDomainError(pr.line, "register '" + net_.signals[pr.signal].name +
                                                    "' is not clocked by the top-level clock");
            }
        }
    }

    void check_drivers() {
        for (uint32_t i = 0; i < net_.signals.size(); ++i) {
            if (driven_[i]) {
                continue;
            }
            const NetSignal& s = net_.signals[i];
            if (s.kind == SignalKind::Register) {
                // an undriven register holds its value
                NetExpr hold;
                hold.signal = i;
                hold.type = s.type();
                net_.assignments.push_back(Assignment{i, std::move(hold), s.line});
                continue;
            }
            throw UndrivenSignal(s.line, s.name);
        }
    }

    const firrtl::CircuitAst& ast_;
    Netlist net_;
    std::vector<bool> driven_;
    std::vector<ClockEntity> clocks_;
    std::optional<uint32_t> top_clock_;
    std::vector<PendingRegister> pending_regs_;
};

}  // namespace

Netlist elaborate(const firrtl::CircuitAst& ast) { return Elaborator(ast).run(); }

}  // namespace rtsim
