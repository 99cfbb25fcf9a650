#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rtsim/fuzz.hpp"
#include "rtsim/kernel.hpp"

namespace rtsim {

struct Divergence {
    uint64_t cycle = 0;  // 1-based
    std::string port;
    std::string level;     // kernel that disagreed
    std::string reference; // "oracle" or the first kernel level
    std::string expected;
    std::string got;
};

struct Report {
    bool pass = false;
    uint64_t cycles = 0;
    std::vector<KernelLevel> levels;
    std::size_t ops = 0;
    std::size_t layers = 0;
    std::optional<Divergence> divergence;  // first kernel-vs-oracle mismatch
    std::optional<Divergence> ladder;      // first kernel-vs-kernel mismatch
    std::optional<std::string> error;      // compile or run failure

    std::string text() const;
    std::string json() const;
};

struct DiffOptions {
    uint64_t cycles = 100;
    uint64_t seed = 1;
    std::vector<KernelLevel> levels{std::begin(kInterpreterLevels), std::end(kInterpreterLevels)};
    bool optimize = true;
    bool swap_sub_operands = false;  // fault injection: reverses every SUB's R fiber
};

/// Oracle on the unoptimized graph against every requested kernel on the
/// optimized tensor, same random pokes, every output and register checked
/// after every cycle.
Report differential_check(std::string_view fir, const DiffOptions& options = {});

/// Checks `count` fuzzed designs; design k uses structure seed
/// `first_seed + k` and the same seed for its pokes. Work is spread over
/// `jobs` threads; results come back in design order.
std::vector<Report> differential_fuzz(uint64_t count, uint64_t first_seed, const FuzzSpec& base,
                                      const DiffOptions& options, unsigned jobs = 1);

/// Reverses the operand order of every SUB in the tensor.
void swap_sub_operands(OimTensor& t);

}  // namespace rtsim
