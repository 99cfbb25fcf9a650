#pragma once

// lo-FIRRTL subset: AST, parser and printer.

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "rtsim/bitvec.hpp"
#include "rtsim/opcode.hpp"

namespace rtsim::firrtl {

struct Type {
    enum class Kind : uint8_t { UInt, SInt, Clock };
    Kind kind = Kind::UInt;
    uint8_t width = 0;  // 0 for Clock

    bool is_clock() const { return kind == Kind::Clock; }
    bool is_signed() const { return kind == Kind::SInt; }
    friend bool operator==(const Type&, const Type&) = default;
};

struct Literal {
    bool is_signed = false;
    bool explicit_width = false;
    uint8_t width = 1;
    u128 bits = 0;  // two's complement, masked to width

    friend bool operator==(const Literal&, const Literal&) = default;
};

struct Expr {
    enum class Kind : uint8_t { Ref, Field, Literal, Prim, Mux };

    Kind kind = Kind::Ref;
    std::string name;   // Ref: identifier; Field: instance name
    std::string field;  // Field: port name
    Literal literal;
    Opcode op = Opcode::Copy;  // Prim
    std::vector<Expr> args;
    std::vector<uint32_t> params;

    friend bool operator==(const Expr&, const Expr&) = default;
};

enum class Direction : uint8_t { Input, Output };

struct Port {
    std::string name;
    Direction direction = Direction::Input;
    Type type;
    int line = 0;

    friend bool operator==(const Port& a, const Port& b) {
        return a.name == b.name && a.direction == b.direction && a.type == b.type;
    }
};

struct WireStmt {
    std::string name;
    Type type;
    friend bool operator==(const WireStmt&, const WireStmt&) = default;
};

struct RegStmt {
    std::string name;
    Type type;
    Expr clock;
    bool has_reset = false;
    Expr reset;
    Expr init;
    friend bool operator==(const RegStmt&, const RegStmt&) = default;
};

struct NodeStmt {
    std::string name;
    Expr value;
    friend bool operator==(const NodeStmt&, const NodeStmt&) = default;
};

struct ConnectStmt {
    Expr target;
    Expr value;
    friend bool operator==(const ConnectStmt&, const ConnectStmt&) = default;
};

struct InstStmt {
    std::string name;
    std::string module;
    friend bool operator==(const InstStmt&, const InstStmt&) = default;
};

struct SkipStmt {
    friend bool operator==(const SkipStmt&, const SkipStmt&) = default;
};

struct Statement {
    std::variant<WireStmt, RegStmt, NodeStmt, ConnectStmt, InstStmt, SkipStmt> body;
    int line = 0;

    // Source lines are diagnostics only and do not take part in equality.
    friend bool operator==(const Statement& a, const Statement& b) { return a.body == b.body; }
};

struct ModuleAst {
    std::string name;
    std::vector<Port> ports;
    std::vector<Statement> statements;
    int line = 0;

    const Port* find_port(std::string_view port) const;

    friend bool operator==(const ModuleAst& a, const ModuleAst& b) {
        return a.name == b.name && a.ports == b.ports && a.statements == b.statements;
    }
};

struct CircuitAst {
    std::string top;
    std::vector<ModuleAst> modules;

    const ModuleAst* find_module(std::string_view name) const;

    friend bool operator==(const CircuitAst&, const CircuitAst&) = default;
};

/// Parses lo-FIRRTL text. Throws SyntaxError or UnsupportedConstruct, both
/// carrying the offending source line.
CircuitAst parse_firrtl(std::string_view text);

/// Prints the AST in canonical lo-FIRRTL form. parse(print(ast)) == ast.
std::string print_firrtl(const CircuitAst& ast);
std::string print_expr(const Expr& e);

/// Signals one instance of `module` contributes after flattening: non-clock
/// ports, data wires, registers, nodes and its distinct literals.
std::size_t local_signal_count(const ModuleAst& module);

}  // namespace rtsim::firrtl
