#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rtsim/kernel.hpp"

namespace rtsim {

struct BenchOptions {
    std::vector<unsigned> sizes{1000, 4000, 16000, 64000};  // raw op counts
    KernelLevel level = KernelLevel::NU;
    uint64_t cycles = 2000;
    unsigned reps = 5;  // timings are the minimum over reps
    uint64_t seed = 7;
    unsigned max_depth = 32;
};

struct BenchRow {
    unsigned size = 0;    // requested raw ops
    std::size_t ops = 0;  // ops in the tensor after the passes
    uint32_t layers = 0;
    double ns_per_cycle = 0;
    double ns_per_op = 0;
    double compile_ms = 0;
    double reference_ms = 0;  // deep copy of the compiled design: linear work, same footprint
};

struct LinearFit {
    double intercept = 0;
    double slope = 0;
    double r2 = 0;
};

/// Ordinary least squares; needs at least two distinct x.
std::optional<LinearFit> fit_line(const std::vector<double>& x, const std::vector<double>& y);

struct BenchReport {
    std::vector<BenchRow> rows;
    std::optional<LinearFit> cycle_fit;      // ns/cycle against ops
    std::optional<double> compile_exponent;  // slope of log(compile time) against log(size)
    std::optional<double> reference_exponent;  // same slope for reference_ms

    // Growth of compile time beyond what the host shows for plain linear
    // work over the same data; cache and page effects cancel out.
    std::optional<double> excess_exponent() const {
        if (!compile_exponent || !reference_exponent) {
            return std::nullopt;
        }
        return *compile_exponent - *reference_exponent;
    }

    std::string csv() const;
    std::string summary() const;
};

/// Throws std::invalid_argument for an empty size list or a size of 0.
BenchReport run_bench(const BenchOptions& options);

}  // namespace rtsim
