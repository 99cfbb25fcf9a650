#include "rtsim/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "rtsim/fuzz.hpp"
#include "rtsim/toolchain.hpp"

namespace rtsim {

std::optional<LinearFit> fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    if (n < 2 || y.size() != n) {
        return std::nullopt;
    }
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0) {
        return std::nullopt;
    }
    LinearFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.r2 = syy == 0 ? 1.0 : (sxy * sxy) / (sxx * syy);
    return f;
}

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ns(Clock::time_point a, Clock::time_point b) {
    return std::chrono::duration<double, std::nano>(b - a).count();
}

std::string fmt(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

}  // namespace

BenchReport run_bench(const BenchOptions& options) {
    if (options.sizes.empty()) {
        throw std::invalid_argument("no benchmark sizes given");
    }
    for (unsigned s : options.sizes) {
        if (s == 0) {
            throw std::invalid_argument("benchmark size must be positive");
        }
    }
    const unsigned reps = std::max(1u, options.reps);
    BenchReport report;
    for (unsigned size : options.sizes) {
        FuzzSpec spec;
        spec.seed = mix_seed(options.seed, size);
        spec.min_nodes = spec.max_nodes = size;
        spec.max_depth = options.max_depth;
        spec.num_inputs = 16;
        const std::string fir = random_circuit(spec);

        BenchRow row;
        row.size = size;
        double best_compile = std::numeric_limits<double>::infinity();
        double best_reference = std::numeric_limits<double>::infinity();
        CompiledDesign design;
        CompileOptions copts;
        copts.format = required_format(options.level);
        // compile and reference alternate so both see the same heap and cache state
        for (unsigned r = 0; r < reps; ++r) {
            design = CompiledDesign{};  // the previous rep's teardown is not compile time
            auto t0 = Clock::now();
            design = compile_firrtl(fir, copts);
            best_compile = std::min(best_compile, elapsed_ns(t0, Clock::now()));
            t0 = Clock::now();
            CompiledDesign copy = design;
            best_reference = std::min(best_reference, elapsed_ns(t0, Clock::now()));
        }
        row.compile_ms = best_compile / 1e6;
        row.reference_ms = best_reference / 1e6;
        row.ops = design.oim.num_ops();
        row.layers = design.oim.num_layers;

        Simulator sim(design.oim, KernelConfig{options.level});
        std::vector<unsigned> widths;
        for (const auto& p : design.oim.inputs) {
            widths.push_back(design.oim.widths[p.slot]);
        }
        PokeStream pokes(options.seed, widths);
        const std::vector<u128> stimulus = pokes.next();
        for (std::size_t k = 0; k < stimulus.size(); ++k) {
            sim.poke(design.oim.inputs[k].name, stimulus[k]);
        }
        sim.run(std::max<uint64_t>(options.cycles / 10, 1));  // warm-up
        double best = std::numeric_limits<double>::infinity();
        for (unsigned r = 0; r < reps; ++r) {
            const auto t0 = Clock::now();
            sim.run(options.cycles);
            best = std::min(best, elapsed_ns(t0, Clock::now()));
        }
        row.ns_per_cycle = best / static_cast<double>(std::max<uint64_t>(options.cycles, 1));
        row.ns_per_op = row.ops == 0 ? 0.0 : row.ns_per_cycle / static_cast<double>(row.ops);
        report.rows.push_back(row);
    }

    std::vector<double> ops, ns, log_size, log_compile, log_reference;
    for (const auto& r : report.rows) {
        ops.push_back(static_cast<double>(r.ops));
        ns.push_back(r.ns_per_cycle);
        log_size.push_back(std::log(static_cast<double>(r.size)));
        log_compile.push_back(std::log(std::max(r.compile_ms, 1e-6)));
        log_reference.push_back(std::log(std::max(r.reference_ms, 1e-6)));
    }
    report.cycle_fit = fit_line(ops, ns);
    if (auto f = fit_line(log_size, log_compile)) {
        report.compile_exponent = f->slope;
    }
    if (auto f = fit_line(log_size, log_reference)) {
        report.reference_exponent = f->slope;
    }
    return report;
}

std::string BenchReport::csv() const {
    std::string out = "size,ops,layers,ns_per_cycle,ns_per_op,compile_ms,reference_ms\n";
    for (const auto& r : rows) {
        out += std::to_string(r.size) + "," + std::to_string(r.ops) + "," + std::to_string(r.layers) + "," +
               fmt(r.ns_per_cycle, 1) + "," + fmt(r.ns_per_op, 3) + "," + fmt(r.compile_ms, 3) + "," + fmt(r.reference_ms, 3) + "\n";
    }
    return out;
}

std::string BenchReport::summary() const {
    std::string out;
    if (cycle_fit) {
        out += "fit: ns/cycle = " + fmt(cycle_fit->intercept, 1) + " + " + fmt(cycle_fit->slope, 4) +
               " * ops, R^2 = " + fmt(cycle_fit->r2, 4) + "\n";
    } else {
        out += "fit: omitted (fewer than two sizes)\n";
    }
    if (compile_exponent) {
        out += "compile time ~ size^" + fmt(*compile_exponent, 3);
        if (reference_exponent) {
            out += " (reference copy ~ size^" + fmt(*reference_exponent, 3) + ", excess " +
                   fmt(*excess_exponent(), 3) + ")";
        }
        out += "\n";
    }
    return out;
}

}  // namespace rtsim
