#pragma once

// JSON testbench:
//   {"cycles": N, "actions": [{"cycle": c, "poke": {"a": 1}, "expect": {"r": 5}}]}
// Cycles count from 1. Pokes of cycle c are applied before step c; expects
// of cycle c are checked after it. Values are integers (negative for SInt
// ports) or strings in any form parse_u128 takes, optionally with a sign.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rtsim/kernel.hpp"
#include "rtsim/vcd.hpp"

namespace rtsim {

struct TestbenchAction {
    uint64_t cycle = 1;
    std::map<std::string, u128> pokes;    // already reduced to the port width
    std::map<std::string, u128> expects;  // ditto
};

struct Testbench {
    uint64_t cycles = 0;
    std::vector<TestbenchAction> actions;  // sorted by cycle, one per cycle
};

/// Throws SchemaError on malformed JSON, UnknownPort, NotPokeable or
/// ValueOutOfRange when an action does not fit the tensor.
Testbench parse_testbench(const std::string& json, const OimTensor& t);
Testbench load_testbench(const std::filesystem::path& path, const OimTensor& t);

struct Mismatch {
    uint64_t cycle = 0;
    std::string port;
    std::string got;
    std::string want;
};

struct TestbenchResult {
    uint64_t cycles = 0;
    std::optional<Mismatch> mismatch;  // the first one
    std::optional<VcdTrace> trace;
};

struct RunOptions {
    uint64_t cycles = 0;  // 0: the testbench's own count
    bool vcd = false;
    bool vcd_all = false;
};

/// Steps the simulator, applying the testbench (may be empty), and
/// records a waveform when asked.
TestbenchResult run_testbench(Simulator& sim, const Testbench& tb, const RunOptions& options);

}  // namespace rtsim
