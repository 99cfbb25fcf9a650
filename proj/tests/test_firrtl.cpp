#include <doctest.h>

#include <string>

#include "rtsim/error.hpp"
#include "rtsim/firrtl.hpp"
#include "rtsim/fuzz.hpp"

using namespace rtsim;
using namespace rtsim::firrtl;

namespace {

int error_line(const std::string& text) {
    try {
        parse_firrtl(text);
    } catch (const SourceError& e) {
        return e.line();
    }
    return -1;
}

}  // namespace

TEST_CASE("minimal circuit") {
    const CircuitAst ast = parse_firrtl("circuit Top:\n  module Top:\n    input a: UInt<1>\n    output b: UInt<1>\n    b <= a");
    REQUIRE(ast.modules.size() == 1);
    CHECK(ast.top == "Top");
    const ModuleAst& m = ast.modules[0];
    CHECK(m.ports.size() == 2);
    REQUIRE(m.statements.size() == 1);
    CHECK(std::holds_alternative<ConnectStmt>(m.statements[0].body));
}

TEST_CASE("node with a primitive op") {
    const CircuitAst ast = parse_firrtl(
        "circuit T :\n  module T :\n    input a : UInt<4>\n    input b : UInt<4>\n    output y : UInt<5>\n"
        "    node x = add(a, b)\n    y <= x\n");
    const auto& node = std::get<NodeStmt>(ast.modules[0].statements[0].body);
    CHECK(node.name == "x");
    CHECK(node.value.kind == Expr::Kind::Prim);
    CHECK(node.value.op == Opcode::Add);
    REQUIRE(node.value.args.size() == 2);
    CHECK(node.value.args[0].kind == Expr::Kind::Ref);
    CHECK(node.value.args[0].name == "a");
    CHECK(node.value.args[1].name == "b");
}

TEST_CASE("version header, comments and locators") {
    const CircuitAst ast = parse_firrtl(
        "FIRRTL version 1.1.0\ncircuit T : @[T.scala 1:1]\n  ; a comment\n  module T :\n"
        "    input a : UInt<4> @[T.scala 2:3]\n    output y : UInt<4>\n    y <= a ; trailing\n");
    CHECK(ast.modules[0].ports.size() == 2);
}

TEST_CASE("literals") {
    const CircuitAst ast = parse_firrtl(
        "circuit T :\n  module T :\n    output y : UInt<8>\n    output z : SInt<4>\n"
        "    y <= UInt<8>(\"hA5\")\n    z <= SInt<4>(-3)\n");
    const auto& y = std::get<ConnectStmt>(ast.modules[0].statements[0].body);
    CHECK(y.value.kind == Expr::Kind::Literal);
    CHECK(y.value.literal.bits == 0xA5);
    CHECK(y.value.literal.width == 8);
    const auto& z = std::get<ConnectStmt>(ast.modules[0].statements[1].body);
    CHECK(z.value.literal.is_signed);
    CHECK(z.value.literal.bits == 0xD);
}

TEST_CASE("unsupported constructs name themselves") {
    try {
        parse_firrtl("circuit T :\n  module T :\n    input a : UInt<4>\n    mem m :\n      data-type => UInt<4>\n");
        FAIL("mem accepted");
    } catch (const UnsupportedConstruct& e) {
        CHECK(e.construct() == "mem");
        CHECK(e.line() == 4);
    }
    CHECK_THROWS_AS(parse_firrtl("circuit T :\n  extmodule T :\n    input a : UInt<1>\n"), UnsupportedConstruct);
    CHECK_THROWS_AS(parse_firrtl("circuit T :\n  module T :\n    input a : UInt<1>\n    output y : UInt<1>\n"
                                 "    when a :\n      y <= a\n"),
                    UnsupportedConstruct);
}

TEST_CASE("syntax errors carry the offending line") {
    CHECK(error_line("circuit T :\n  module T :\n    input a : UInt\n") == 3);
    CHECK(error_line("circuit T :\n  module T :\n    input a : UInt<4>\n    output y : UInt<4>\n    y <= b\n") == 5);
    CHECK(error_line("circuit T :\n  module T :\n    input a : UInt<4>\n    output y : UInt<4>\n    y <= add(a\n") == 5);
    CHECK(error_line("circuit T :\n  module T :\n    input a : UInt<0>\n") == 3);
    CHECK(error_line("circuit T :\n  module T :\n    input a : UInt<4>\n    output y : UInt<4>\n    y <= a #\n") == 5);
    CHECK(error_line("") >= 0);
}

TEST_CASE("a second clock port is rejected") {
    CHECK_THROWS_AS(parse_firrtl("circuit T :\n  module T :\n    input c1 : Clock\n    input c2 : Clock\n"),
                    UnsupportedConstruct);
}

TEST_CASE("print then parse is the identity on generated designs") {
    for (uint64_t seed = 1; seed <= 40; ++seed) {
        FuzzSpec spec;
        spec.seed = seed;
        const CircuitAst ast = parse_firrtl(random_circuit(spec));
        const std::string printed = print_firrtl(ast);
        const CircuitAst again = parse_firrtl(printed);
        CHECK(again == ast);
        CHECK(print_firrtl(again) == printed);
    }
}

TEST_CASE("print then parse keeps registers and instances") {
    const std::string text =
        "circuit Top :\n  module Inc :\n    input x : UInt<4>\n    output y : UInt<5>\n    y <= add(x, UInt<1>(1))\n"
        "  module Top :\n    input clock : Clock\n    input reset : UInt<1>\n    input a : UInt<4>\n"
        "    output y : UInt<5>\n    inst i0 of Inc\n    i0.x <= a\n"
        "    reg r : UInt<5>, clock with :\n      reset => (reset, UInt<5>(0))\n    r <= i0.y\n    y <= r\n";
    const CircuitAst ast = parse_firrtl(text);
    CHECK(parse_firrtl(print_firrtl(ast)) == ast);
    const ModuleAst* top = ast.find_module("Top");
    REQUIRE(top != nullptr);
    CHECK(top->find_port("a") != nullptr);
    CHECK(top->find_port("q") == nullptr);
}

TEST_CASE("instance of an unknown module") {
    CHECK_THROWS_AS(parse_firrtl("circuit T :\n  module T :\n    input a : UInt<4>\n    inst i of Missing\n"), SourceError);
}

TEST_CASE("instantiation cycles") {
    CHECK_THROWS_AS(parse_firrtl("circuit T :\n  module A :\n    input x : UInt<1>\n    inst b of B\n"
                                 "  module B :\n    input x : UInt<1>\n    inst a of A\n"
                                 "  module T :\n    input x : UInt<1>\n    inst a of A\n"),
                    SourceError);
}

TEST_CASE("top must exist") {
    CHECK_THROWS_AS(parse_firrtl("circuit T :\n  module U :\n    input x : UInt<1>\n"), SourceError);
}
