#include <doctest.h>

#include <string>

#include "rtsim/toolchain.hpp"
#include "rtsim/vcd.hpp"

using namespace rtsim;

namespace {

const char* kToggle =
    "circuit T :\n  module T :\n    input clock : Clock\n    output k : UInt<8>\n"
    "    reg t : UInt<1>, clock\n    t <= not(t)\n    k <= UInt<8>(\"ha5\")\n";

std::string trace_text(const std::string& fir, int cycles) {
    Simulator sim(compile_firrtl(fir).oim, KernelConfig{KernelLevel::OU});
    SimulationProbe probe(sim.tensor(), false);
    for (int c = 0; c < cycles; ++c) {
        probe.before_step(sim.state());
        sim.step();
        probe.after_step(sim.state());
    }
    return render_vcd(probe.trace());
}

std::size_t count(const std::string& s, const std::string& what) {
    std::size_t n = 0;
    for (auto p = s.find(what); p != std::string::npos; p = s.find(what, p + 1)) {
        ++n;
    }
    return n;
}

}  // namespace

TEST_CASE("identifiers") {
    CHECK(vcd_identifier(0) == "!");
    CHECK(vcd_identifier(1) == "\"");
    CHECK(vcd_identifier(93) == "~");
    CHECK(vcd_identifier(94) == "!!");
    CHECK(vcd_identifier(95) == "\"!");
    CHECK(vcd_identifier(94 + 94 * 94) == "!!!");
}

TEST_CASE("a toggling register and a constant") {
    const std::string text = trace_text(kToggle, 3);
    CHECK(check_vcd(text).empty());
    // k is "!", t is "\""
    CHECK(text.find("$var wire 8 ! k $end") != std::string::npos);
    CHECK(text.find("$var wire 1 \" t $end") != std::string::npos);
    CHECK(text.find("#0\n$dumpvars\nb10100101 !\n0\"\n$end\n#1\n1\"\n#2\n0\"\n") != std::string::npos);
    CHECK(count(text, "b10100101 !") == 1);
    CHECK(text.find("#3") == std::string::npos);
}

TEST_CASE("recorder keeps only changes") {
    VcdRecorder rec("M", {{"a", 8}, {"b", 1}});
    rec.sample({0xa5, 0});
    rec.sample({0xa5, 1});
    rec.sample({0xa5, 1});
    rec.sample({0x0f, 1});
    const VcdTrace& t = rec.trace();
    CHECK(rec.samples() == 4);
    REQUIRE(t.frames.size() == 2);
    CHECK(t.frames[0].time == 1);
    CHECK(t.frames[1].time == 3);
    REQUIRE(t.frames[1].changes.size() == 1);
    CHECK(t.frames[1].changes[0].signal == 0);
    const std::string text = render_vcd(t);
    CHECK(text.find("b10100101 !\n") != std::string::npos);
    CHECK(text.find("#3\nb00001111 !\n") != std::string::npos);
    CHECK(check_vcd(text).empty());
}

TEST_CASE("checker rejects malformed dumps") {
    const std::string head =
        "$timescale 1 ns $end\n$scope module M $end\n$var wire 1 ! a $end\n$var wire 4 \" b $end\n"
        "$upscope $end\n$enddefinitions $end\n";
    CHECK(check_vcd(head + "#0\n$dumpvars\n0!\nb0 \"\n$end\n#1\n1!\n").empty());

    CHECK_FALSE(check_vcd(head + "#0\n$dumpvars\n0!\nb0 \"\n$end\n#1\n0!\n").empty());      // no change
    CHECK_FALSE(check_vcd(head + "#0\n$dumpvars\n0!\nb0 \"\n$end\n#1\n1!\n#1\n0!\n").empty());  // time not increasing
    CHECK_FALSE(check_vcd(head + "#0\n$dumpvars\n0!\nb0 \"\n$end\n#1\n1$\n").empty());      // unknown id
    CHECK_FALSE(check_vcd(head + "#0\n$dumpvars\n0!\nb10000 \"\n$end\n").empty());          // too wide
    CHECK_FALSE(check_vcd(head + "#0\n$dumpvars\n0!\n$end\n").empty());                     // b never dumped
    CHECK_FALSE(check_vcd(head + "1!\n").empty());                                          // before any time
    CHECK_FALSE(check_vcd(head + "#0\n$dumpvars\n0!\nb2 \"\n$end\n").empty());              // bad digit
    CHECK_FALSE(check_vcd("$scope module M $end\n$var wire 1 ! a $end\n$upscope $end\n$enddefinitions $end\n")
                    .empty());  // no timescale
    CHECK_FALSE(check_vcd("$timescale 1 ns $end\n$scope module M $end\n$enddefinitions $end\n").empty());
    CHECK_FALSE(check_vcd("$timescale 3 ns $end\n$enddefinitions $end\n").empty());
    CHECK_FALSE(check_vcd("$timescale 1 ns $end\n$scope module M $end\n$var wire 1 ! a $end\n"
                          "$var wire 1 ! b $end\n$upscope $end\n$enddefinitions $end\n")
                    .empty());  // duplicate identifier
}

TEST_CASE("registers are sampled before the step, outputs after") {
    const char* counter =
        "circuit C :\n  module C :\n    input clock : Clock\n    output y : UInt<4>\n"
        "    reg r : UInt<4>, clock\n    r <= tail(add(r, UInt<4>(1)), 1)\n    y <= not(r)\n";
    const std::string text = trace_text(counter, 2);
    CHECK(check_vcd(text).empty());
    // y = not(r) from the same cycle: r 0 -> y 15, r 1 -> y 14
    CHECK(text.find("#0\n$dumpvars\nb1111 !\nb0000 \"\n$end\n#1\nb1110 !\nb0001 \"\n") != std::string::npos);
}
