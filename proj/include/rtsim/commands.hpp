#pragma once

// Subcommands of the rtsim tool. Each returns the process exit code:
// 0 success, 1 semantic failure, 2 usage or I/O error.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rtsim/kernel.hpp"
#include "rtsim/oim.hpp"

namespace rtsim {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

struct CompileArgs {
    std::string input;
    std::string out;  // empty: stats only
    OimFormat format = OimFormat::B;
    bool dump_passes = false;
    bool keep_signals = false;
    bool no_opt = false;
};

struct SimulateArgs {
    std::string oim_dir;
    std::string kernel;   // empty: OU for Format B, NU for Format C
    uint64_t cycles = 0;  // 0: the testbench's count
    std::string tb;
    std::string vcd;
    bool vcd_all = false;
    unsigned op_unroll = 8;
    unsigned writeback_unroll = 24;
};

struct CheckArgs {
    std::string input;      // a .fir file, or empty with fuzz > 0
    uint64_t fuzz = 0;      // number of generated designs
    uint64_t cycles = 100;
    uint64_t seed = 1;
    std::string levels = "ru,ou,nu,psu,iu";
    bool json = false;
    bool no_opt = false;
    unsigned jobs = 1;
};

struct BenchArgs {
    std::string sizes = "1000,4000,16000,64000";
    std::string kernel = "nu";
    uint64_t cycles = 2000;
    unsigned reps = 5;
    uint64_t seed = 7;
    std::string csv;  // empty: stdout
};

struct FuzzArgs {
    uint64_t seed = 1;
    unsigned nodes = 0;  // 0: drawn from the default range
    std::string out;     // empty: stdout
};

int cmd_compile(const CompileArgs& args, std::ostream& out, std::ostream& err);
int cmd_simulate(const SimulateArgs& args, std::ostream& out, std::ostream& err);
int cmd_check(const CheckArgs& args, std::ostream& out, std::ostream& err);
int cmd_bench(const BenchArgs& args, std::ostream& out, std::ostream& err);
int cmd_fuzz(const FuzzArgs& args, std::ostream& out, std::ostream& err);

/// "ru,nu" -> levels. Throws std::invalid_argument on an unknown name or
/// a reserved level.
std::vector<KernelLevel> parse_levels(const std::string& list);

/// Layers, ops per opcode, slots and array bytes.
std::string compile_stats(const OimTensor& t);

}  // namespace rtsim
