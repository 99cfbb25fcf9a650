#include <doctest.h>

#include <string>

#include "rtsim/error.hpp"
#include "rtsim/firrtl.hpp"
#include "rtsim/fuzz.hpp"
#include "rtsim/netlist.hpp"

using namespace rtsim;

namespace {

const char* kTwoInc =
    "circuit Top :\n"
    "  module Inc :\n"
    "    input x : UInt<4>\n"
    "    output y : UInt<5>\n"
    "    node t = add(x, UInt<1>(1))\n"
    "    y <= t\n"
    "  module Top :\n"
    "    input a : UInt<4>\n"
    "    input b : UInt<4>\n"
    "    output p : UInt<5>\n"
    "    output q : UInt<5>\n"
    "    inst i0 of Inc\n"
    "    inst i1 of Inc\n"
    "    i0.x <= a\n"
    "    i1.x <= b\n"
    "    p <= i0.y\n"
    "    q <= i1.y\n";

Netlist elab(const std::string& text) { return elaborate(firrtl::parse_firrtl(text)); }

}  // namespace

TEST_CASE("instances flatten into prefixed signals") {
    const Netlist n = elab(kTwoInc);
    for (const char* s : {"i0.x", "i0.y", "i0.t", "i1.x", "i1.y", "i1.t", "a", "b", "p", "q"}) {
        CHECK_MESSAGE(n.find_signal(s).has_value(), s);
    }
    CHECK(n.inputs.size() == 2);
    CHECK(n.outputs.size() == 2);
    for (const auto& sig : n.signals) {
        CHECK(sig.name.find("of") == std::string::npos);
    }
}

TEST_CASE("signal count is the sum of per-instance local counts") {
    const firrtl::CircuitAst ast = firrtl::parse_firrtl(kTwoInc);
    const Netlist n = elaborate(ast);
    const std::size_t want =
        firrtl::local_signal_count(*ast.find_module("Top")) + 2 * firrtl::local_signal_count(*ast.find_module("Inc"));
    CHECK(n.signals.size() == want);
}

TEST_CASE("signal count on generated designs") {
    for (uint64_t seed = 1; seed <= 20; ++seed) {
        FuzzSpec spec;
        spec.seed = seed;
        const firrtl::CircuitAst ast = firrtl::parse_firrtl(random_circuit(spec));
        CHECK(elaborate(ast).signals.size() == firrtl::local_signal_count(*ast.find_module(ast.top)));
    }
}

TEST_CASE("register with reset") {
    const Netlist n = elab(
        "circuit T :\n  module T :\n    input clock : Clock\n    input rst : UInt<1>\n    input d : UInt<8>\n"
        "    output q : UInt<8>\n    reg r : UInt<8>, clock with :\n      reset => (rst, UInt(0))\n"
        "    r <= d\n    q <= r\n");
    REQUIRE(n.registers.size() == 1);
    const RegisterInfo& r = n.registers[0];
    CHECK(n.signals[r.signal].name == "r");
    REQUIRE(r.reset.has_value());
    CHECK(n.signals[*r.reset].name == "rst");
    CHECK(r.init == 0);
}

TEST_CASE("register init value") {
    const Netlist n = elab(
        "circuit T :\n  module T :\n    input clock : Clock\n    input rst : UInt<1>\n    output q : UInt<8>\n"
        "    reg r : UInt<8>, clock with :\n      reset => (rst, UInt<8>(3))\n    r <= r\n    q <= r\n");
    CHECK(n.registers.at(0).init == 3);
}

TEST_CASE("constants become signals") {
    const Netlist n = elab("circuit T :\n  module T :\n    output y : UInt<8>\n    y <= UInt<8>(7)\n");
    std::size_t constants = 0;
    for (const auto& s : n.signals) {
        if (s.kind == SignalKind::Constant) {
            ++constants;
            CHECK(s.value == 7);
        }
    }
    CHECK(constants == 1);
}

TEST_CASE("two drivers for one wire") {
    const std::string text =
        "circuit T :\n  module T :\n    input a : UInt<4>\n    input b : UInt<4>\n    output y : UInt<4>\n"
        "    wire w : UInt<4>\n    w <= a\n    w <= b\n    y <= w\n";
    try {
        elab(text);
        FAIL("accepted");
    } catch (const MultipleDrivers& e) {
        CHECK(e.signal() == "w");
        CHECK(e.line() == 8);
    }
}

TEST_CASE("undriven output") {
    CHECK_THROWS_AS(elab("circuit T :\n  module T :\n    input a : UInt<4>\n    output y : UInt<4>\n"), UndrivenSignal);
}

TEST_CASE("undriven register holds its value") {
    const Netlist n = elab(
        "circuit T :\n  module T :\n    input clock : Clock\n    output q : UInt<8>\n    reg r : UInt<8>, clock\n"
        "    q <= r\n");
    CHECK(n.registers.size() == 1);
}

TEST_CASE("type errors") {
    // connecting a wider value into a narrower sink
    CHECK_THROWS_AS(elab("circuit T :\n  module T :\n    input a : UInt<8>\n    output y : UInt<4>\n    y <= a\n"), TypeError);
    CHECK_THROWS_AS(elab("circuit T :\n  module T :\n    input a : UInt<4>\n    input b : SInt<4>\n"
                         "    output y : UInt<5>\n    y <= add(a, b)\n"),
                    TypeError);
}

TEST_CASE("narrow connect pads implicitly") {
    const Netlist n = elab("circuit T :\n  module T :\n    input a : UInt<4>\n    output y : UInt<8>\n    y <= a\n");
    CHECK(n.outputs.size() == 1);
}

TEST_CASE("register clocked by a data signal") {
    CHECK_THROWS_AS(elab("circuit T :\n  module T :\n    input clock : Clock\n    input d : UInt<1>\n"
                         "    output q : UInt<1>\n    reg r : UInt<1>, d\n    r <= d\n    q <= r\n"),
                    ElaborationError);
}
