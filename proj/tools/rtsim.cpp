// rtsim: compile lo-FIRRTL to OIM tensors, simulate them, check them
// against the oracle, benchmark the kernels.
//
// Log verbosity comes from RTSIM_LOG (trace, debug, info, warn, error, off).

#include <chrono>
#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "rtsim/commands.hpp"

int main(int argc, char** argv) {
    spdlog::set_pattern("[%l] %v");
    spdlog::set_level(spdlog::level::warn);
    if (const char* env = std::getenv("RTSIM_LOG")) {
        spdlog::set_level(spdlog::level::from_str(env));
    }

    CLI::App app{"OIM tensor RTL simulator"};
    app.require_subcommand(1);

    rtsim::CompileArgs compile;
    std::string format = "b";
    auto* c = app.add_subcommand("compile", "FIRRTL -> meta.json + oim.json, with stats");
    c->add_option("input", compile.input, "lo-FIRRTL file")->required();
    c->add_option("--out,-o", compile.out, "output directory");
    c->add_option("--format", format, "b or c")->check(CLI::IsMember({"b", "c", "B", "C"}));
    c->add_flag("--dump-passes", compile.dump_passes, "print the graph after each pass");
    c->add_flag("--keep-signals", compile.keep_signals, "keep every named signal observable");
    c->add_flag("--no-opt", compile.no_opt, "skip the optimization passes");

    rtsim::SimulateArgs simulate;
    auto* s = app.add_subcommand("simulate", "run a compiled design");
    s->add_option("oim_dir", simulate.oim_dir, "directory written by compile")->required();
    s->add_option("--kernel,-k", simulate.kernel, "ru, ou, nu, psu or iu (default: ou for Format B, nu for Format C)");
    s->add_option("--cycles,-n", simulate.cycles, "cycles to run (default: the testbench's)");
    s->add_option("--tb", simulate.tb, "JSON testbench");
    s->add_option("--vcd", simulate.vcd, "waveform output");
    s->add_flag("--vcd-all", simulate.vcd_all, "record every slot, not only ports and registers");
    s->add_option("--op-unroll", simulate.op_unroll, "PSU/IU op block factor");
    s->add_option("--wb-unroll", simulate.writeback_unroll, "PSU/IU write-back block factor");

    rtsim::CheckArgs check;
    auto* k = app.add_subcommand("check", "differential check against the oracle");
    k->add_option("input", check.input, "lo-FIRRTL file");
    k->add_option("--fuzz", check.fuzz, "check N generated designs instead");
    k->add_option("--cycles,-n", check.cycles, "cycles per design");
    k->add_option("--seed", check.seed, "poke seed (and first structure seed with --fuzz)");
    k->add_option("--levels", check.levels, "comma-separated kernel levels");
    k->add_option("--jobs,-j", check.jobs, "worker threads for --fuzz (0: all cores)");
    k->add_flag("--json", check.json, "one JSON report per design");
    k->add_flag("--no-opt", check.no_opt, "check the unoptimized lowering");

    rtsim::BenchArgs bench;
    auto* b = app.add_subcommand("bench", "scaling benchmark on generated designs");
    b->add_option("--sizes", bench.sizes, "comma-separated op counts");
    b->add_option("--kernel,-k", bench.kernel, "kernel level");
    b->add_option("--cycles,-n", bench.cycles, "timed cycles per repetition");
    b->add_option("--reps", bench.reps, "repetitions (minimum is reported)");
    b->add_option("--seed", bench.seed, "design seed");
    b->add_option("--csv", bench.csv, "write the CSV here instead of stdout");

    rtsim::FuzzArgs fuzz;
    auto* f = app.add_subcommand("fuzz", "print a generated design");
    f->add_option("--seed", fuzz.seed, "structure seed");
    f->add_option("--nodes", fuzz.nodes, "exact op count");
    f->add_option("--out,-o", fuzz.out, "output file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? rtsim::kExitOk : rtsim::kExitUsage;
    }

    const auto t0 = std::chrono::steady_clock::now();
    int rc = rtsim::kExitUsage;
    if (*c) {
        compile.format = (format == "c" || format == "C") ? rtsim::OimFormat::C : rtsim::OimFormat::B;
        spdlog::debug("compile {} -> {}", compile.input, compile.out.empty() ? "(stats only)" : compile.out);
        rc = rtsim::cmd_compile(compile, std::cout, std::cerr);
    } else if (*s) {
        spdlog::debug("simulate {} on {}", simulate.oim_dir, simulate.kernel.empty() ? "default" : simulate.kernel);
        rc = rtsim::cmd_simulate(simulate, std::cout, std::cerr);
    } else if (*k) {
        spdlog::debug("check {} levels {}", check.input.empty() ? "fuzz" : check.input, check.levels);
        rc = rtsim::cmd_check(check, std::cout, std::cerr);
    } else if (*b) {
        spdlog::debug("bench sizes {}", bench.sizes);
        rc = rtsim::cmd_bench(bench, std::cout, std::cerr);
    } else if (*f) {
        rc = rtsim::cmd_fuzz(fuzz, std::cout, std::cerr);
    }
    spdlog::info("{} ms, exit {}",
                 std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0).count(),
                 rc);
    return rc;
}
