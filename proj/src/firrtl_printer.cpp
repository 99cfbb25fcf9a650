#include <set>
#include <tuple>

#include "rtsim/firrtl.hpp"

namespace rtsim::firrtl {

namespace {

std::string print_type(const Type& t) {
    switch (t.kind) {
    case Type::Kind::Clock: return "Clock";
    case Type::Kind::SInt: return "SInt<" + std::to_string(t.width) + ">";
    case Type::Kind::UInt: break;
    }
    return "UInt<" + std::to_string(t.width) + ">";
}

std::string print_literal(const Literal& lit) {
    std::string s = lit.is_signed ? "SInt" : "UInt";
    if (lit.explicit_width) {
        s += "<" + std::to_string(lit.width) + ">";
    }
    return s + "(" + to_decimal(BitVec{lit.bits, lit.width, lit.is_signed}) + ")";
}

void collect_literals(const Expr& e, std::set<std::tuple<bool, unsigned, u128>>& out) {
    if (e.kind == Expr::Kind::Literal) {
        out.emplace(e.literal.is_signed, e.literal.width, e.literal.bits);
    }
    for (const auto& a : e.args) {
        collect_literals(a, out);
    }
}

}  // namespace

std::string print_expr(const Expr& e) {
    switch (e.kind) {
    case Expr::Kind::Ref: return e.name;
    case Expr::Kind::Field: return e.name + "." + e.field;
    case Expr::Kind::Literal: return print_literal(e.literal);
    case Expr::Kind::Prim:
    case Expr::Kind::Mux: break;
    }
    std::string s = e.kind == Expr::Kind::Mux ? "mux" : std::string(name(e.op));
    s += "(";
    bool first = true;
    for (const auto& a : e.args) {
        s += first ? "" : ", ";
        s += print_expr(a);
        first = false;
    }
    for (uint32_t p : e.params) {
        s += first ? "" : ", ";
        s += std::to_string(p);
        first = false;
    }
    return s + ")";
}

std::string print_firrtl(const CircuitAst& ast) {
    std::string out = "circuit " + ast.top + " :\n";
    for (const auto& m : ast.modules) {
        out += "  module " + m.name + " :\n";
        for (const auto& p : m.ports) {
            out += "    ";
            out += p.direction == Direction::Input ? "input " : "output ";
            out += p.name + " : " + print_type(p.type) + "\n";
        }
        for (const auto& st : m.statements) {
            out += "    ";
            std::visit(
                [&](const auto& s) {
                    using T = std::decay_t<decltype(s)>;
                    if constexpr (std::is_same_v<T, WireStmt>) {
                        out += "wire " + s.name + " : " + print_type(s.type);
                    } else if constexpr (std::is_same_v<T, RegStmt>) {
                        out += "reg " + s.name + " : " + print_type(s.type) + ", " + print_expr(s.clock);
                        if (s.has_reset) {
                            out += " with :\n      reset => (" + print_expr(s.reset) + ", " +
                                   print_expr(s.init) + ")";
                        }
                    } else if constexpr (std::is_same_v<T, NodeStmt>) {
                        out += "node " + s.name + " = " + print_expr(s.value);
                    } else if constexpr (std::is_same_v<T, ConnectStmt>) {
                        out += print_expr(s.target) + " <= " + print_expr(s.value);
                    } else if constexpr (std::is_same_v<T, InstStmt>) {
                        out += "inst " + s.name + " of " + s.module;
                    } else {
                        out += "skip";
                    }
                },
                st.body);
            out += "\n";
        }
    }
    return out;
}

std::size_t local_signal_count(const ModuleAst& module) {
    std::size_t count = 0;
    for (const auto& p : module.ports) {
        count += p.type.is_clock() ? 0 : 1;
    }
    std::set<std::tuple<bool, unsigned, u128>> literals;
    for (const auto& st : module.statements) {
        if (const auto* w = std::get_if<WireStmt>(&st.body)) {
            count += w->type.is_clock() ? 0 : 1;
        } else if (const auto* r = std::get_if<RegStmt>(&st.body)) {
            ++count;
            if (r->has_reset) {
                collect_literals(r->reset, literals);
                collect_literals(r->init, literals);
            }
        } else if (const auto* n = std::get_if<NodeStmt>(&st.body)) {
            ++count;
            collect_literals(n->value, literals);
        } else if (const auto* c = std::get_if<ConnectStmt>(&st.body)) {
            collect_literals(c->value, literals);
        }
    }
    return count + literals.size();
}

}  // namespace rtsim::firrtl
