#include "rtsim/testbench.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "rtsim/error.hpp"

namespace rtsim {

namespace {

struct PortInfo {
    uint32_t slot;
    bool input;
};

std::optional<PortInfo> find_port(const OimTensor& t, const std::string& name) {
    for (const auto& p : t.inputs) {
        if (p.name == name) {
            return PortInfo{p.slot, true};
        }
    }
    for (const auto* ports : {&t.outputs, &t.signals}) {
        for (const auto& p : *ports) {
            if (p.name == name) {
                return PortInfo{p.slot, false};
            }
        }
    }
    return std::nullopt;
}

// Reduces a JSON value to the port's width, two's complement for negatives.
u128 port_value(const nlohmann::json& v, const std::string& port, unsigned width, bool is_signed) {
    bool negative = false;
    u128 magnitude = 0;
    if (v.is_number_unsigned()) {
        magnitude = v.get<uint64_t>();
    } else if (v.is_number_integer()) {
        const int64_t x = v.get<int64_t>();
        negative = x < 0;
        magnitude = negative ? static_cast<u128>(-static_cast<i128>(x)) : static_cast<u128>(x);
    } else if (v.is_string()) {
        std::string s = v.get<std::string>();
        if (!s.empty() && (s[0] == '-' || s[0] == '+')) {
            negative = s[0] == '-';
            s.erase(0, 1);
        }
        try {
            magnitude = parse_u128(s);
        } catch (const std::invalid_argument&) {
            throw SchemaError("testbench", "bad value '" + v.get<std::string>() + "' for " + port);
        }
    } else {
        throw SchemaError("testbench", "value for " + port + " must be an integer or a string");
    }
    const std::string shown = (negative ? "-" : "") + to_decimal(magnitude);
    const std::string range = " does not fit " + port + " (" + (is_signed ? "SInt<" : "UInt<") +
                              std::to_string(width) + ">)";
    if (is_signed) {
        const u128 limit = u128{1} << (width - 1);  // |min|
        if ((!negative && magnitude >= limit) || (negative && magnitude > limit)) {
            throw ValueOutOfRange("value " + shown + range);
        }
    } else if (negative || (magnitude & ~width_mask(width)) != 0) {
        throw ValueOutOfRange("value " + shown + range);
    }
    return (negative ? ~magnitude + 1 : magnitude) & width_mask(width);
}

}  // namespace

Testbench parse_testbench(const std::string& text, const OimTensor& t) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw SchemaError("testbench", e.what());
    }
    if (!j.is_object()) {
        throw SchemaError("testbench", "top level must be an object");
    }
    Testbench tb;
    if (j.contains("cycles")) {
        if (!j["cycles"].is_number_unsigned()) {
            throw SchemaError("cycles", "must be a non-negative integer");
        }
        tb.cycles = j["cycles"].get<uint64_t>();
    }
    const nlohmann::json actions = j.value("actions", nlohmann::json::array());
    if (!actions.is_array()) {
        throw SchemaError("actions", "must be an array");
    }
    std::map<uint64_t, TestbenchAction> by_cycle;
    for (const auto& a : actions) {
        if (!a.is_object() || !a.contains("cycle") || !a["cycle"].is_number_unsigned() ||
            a["cycle"].get<uint64_t>() == 0) {
            throw SchemaError("actions", "every action needs a \"cycle\" of at least 1");
        }
        const uint64_t cycle = a["cycle"].get<uint64_t>();
        TestbenchAction& act = by_cycle[cycle];
        act.cycle = cycle;
        for (const char* key : {"poke", "expect"}) {
            if (!a.contains(key)) {
                continue;
            }
            if (!a[key].is_object()) {
                throw SchemaError(key, "must be an object of port: value");
            }
            const bool is_poke = std::string_view(key) == "poke";
            for (const auto& [port, v] : a[key].items()) {
                const auto info = find_port(t, port);
                if (!info) {
                    throw UnknownPort(port);
                }
                if (is_poke && !info->input) {
                    throw NotPokeable(port);
                }
                const u128 value = port_value(v, port, t.widths[info->slot], t.signedness[info->slot] != 0);
                (is_poke ? act.pokes : act.expects)[port] = value;
            }
        }
    }
    for (auto& [cycle, act] : by_cycle) {
        tb.actions.push_back(std::move(act));
    }
    if (!j.contains("cycles") && !tb.actions.empty()) {
        tb.cycles = tb.actions.back().cycle;
    }
    return tb;
}

Testbench load_testbench(const std::filesystem::path& path, const OimTensor& t) {
    std::ifstream f(path, std::ios::binary);
    if (!f) {
        throw IoError("cannot read " + path.string());
    }
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_testbench(ss.str(), t);
}

TestbenchResult run_testbench(Simulator& sim, const Testbench& tb, const RunOptions& options) {
    TestbenchResult result;
    const uint64_t cycles = options.cycles != 0 ? options.cycles : tb.cycles;
    std::optional<SimulationProbe> probe;
    if (options.vcd || options.vcd_all) {
        probe.emplace(sim.tensor(), options.vcd_all);
    }
    auto action = tb.actions.begin();
    for (uint64_t cycle = 1; cycle <= cycles; ++cycle) {
        while (action != tb.actions.end() && action->cycle < cycle) {
            ++action;
        }
        const bool here = action != tb.actions.end() && action->cycle == cycle;
        if (here) {
            for (const auto& [port, value] : action->pokes) {
                sim.poke(port, value);
            }
        }
        if (probe) {
            probe->before_step(sim.state());
        }
        sim.step();
        if (probe) {
            probe->after_step(sim.state());
        }
        if (here && !result.mismatch) {
            for (const auto& [port, want] : action->expects) {
                const BitVec got = sim.peek(port);
                if (got.value != want) {
                    const BitVec w = make_bitvec(want, got.width, got.is_signed);
                    result.mismatch = Mismatch{cycle, port, to_decimal(got), to_decimal(w)};
                    break;
                }
            }
        }
        result.cycles = cycle;
    }
    if (probe) {
        result.trace = probe->trace();
    }
    return result;
}

}  // namespace rtsim
