#pragma once

// Value change dump. One $scope named after the top module, 1 cycle = 1 ns.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rtsim/bitvec.hpp"
#include "rtsim/kernel.hpp"

namespace rtsim {

struct VcdSignal {
    std::string name;
    unsigned width = 1;
    std::string id;
};

struct VcdChange {
    uint32_t signal = 0;
    u128 value = 0;
};

struct VcdFrame {
    uint64_t time = 0;
    std::vector<VcdChange> changes;  // only values that differ from the previous frame
};

struct VcdTrace {
    std::string top;
    std::vector<VcdSignal> signals;
    std::vector<u128> initial;     // the $dumpvars snapshot at time 0
    std::vector<VcdFrame> frames;  // times 1, 2, ...
};

/// Short printable identifier for the n-th signal: "!", "\"", ..., "~", "!!", ...
std::string vcd_identifier(std::size_t n);

/// Builds a trace from full per-cycle snapshots, keeping only changes.
class VcdRecorder {
public:
    VcdRecorder(std::string top, const std::vector<std::pair<std::string, unsigned>>& signals);

    void sample(const std::vector<u128>& values);
    uint64_t samples() const { return samples_; }
    const VcdTrace& trace() const { return trace_; }

private:
    VcdTrace trace_;
    std::vector<u128> last_;
    uint64_t samples_ = 0;
};

/// Records a simulator's io ports and registers (and with `all_slots`,
/// every other slot too). Inputs are sampled as driven for the cycle,
/// registers as they were when the cycle began, everything else as
/// computed by the cycle.
class SimulationProbe {
public:
    SimulationProbe(const OimTensor& t, bool all_slots);

    /// Call after the cycle's pokes, before the step.
    void before_step(const SignalState& state);
    /// Call right after the step.
    void after_step(const SignalState& state);

    const VcdTrace& trace() const { return recorder_.trace(); }

private:
    std::vector<uint32_t> slots_;
    std::vector<bool> pre_step_;
    std::vector<u128> frame_;
    VcdRecorder recorder_;
};

std::string render_vcd(const VcdTrace& trace);
/// Throws IoError.
void write_vcd(const VcdTrace& trace, const std::filesystem::path& path);

/// Grammar and change-only conformance. Empty when the text conforms.
std::vector<std::string> check_vcd(std::string_view text);

}  // namespace rtsim
