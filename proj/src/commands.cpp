#include "rtsim/commands.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <thread>

#include "rtsim/bench.hpp"
#include "rtsim/differential.hpp"
#include "rtsim/error.hpp"
#include "rtsim/fuzz.hpp"
#include "rtsim/testbench.hpp"
#include "rtsim/toolchain.hpp"
#include "rtsim/vcd.hpp"

namespace rtsim {

namespace {

std::string read_text(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) {
        throw IoError("cannot read " + path);
    }
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f || !(f << text)) {
        throw IoError("cannot write " + path);
    }
}

std::vector<std::string> split(const std::string& list) {
    std::vector<std::string> out;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) {
            out.push_back(item);
        }
    }
    return out;
}

KernelLevel parse_level(const std::string& name) {
    const auto level = kernel_level_from_name(name);
    if (!level) {
        throw std::invalid_argument("unknown kernel level '" + name + "'");
    }
    if (*level == KernelLevel::SU || *level == KernelLevel::TI) {
        throw std::invalid_argument("kernel level '" + name + "' is not available in the interpreter");
    }
    return *level;
}

// Compile-path diagnostics: file:line: message, exit 1. I/O problems exit 2.
template <typename F>
int guarded(const std::string& file, std::ostream& err, F&& body) {
    try {
        return body();
    } catch (const SourceError& e) {
        err << file << ":" << e.line() << ": " << e.message() << "\n";
        return kExitFailure;
    } catch (const IoError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const SchemaError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const VersionError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const FormatMismatch& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const UnknownPort& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const NotPokeable& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const ValueOutOfRange& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << file << ": " << e.what() << "\n";
        return kExitFailure;
    }
}

}  // namespace

std::vector<KernelLevel> parse_levels(const std::string& list) {
    std::vector<KernelLevel> out;
    for (const auto& name : split(list)) {
        const KernelLevel l = parse_level(name);
        if (std::find(out.begin(), out.end(), l) == out.end()) {
            out.push_back(l);
        }
    }
    if (out.empty()) {
        throw std::invalid_argument("no kernel levels given");
    }
    return out;
}

std::string compile_stats(const OimTensor& t) {
    std::ostringstream s;
    uint64_t total = 0;
    for (uint32_t v : t.format == OimFormat::B ? t.i_payload : t.n_payload) {
        total += v;
    }
    std::map<std::string_view, uint64_t> per_op;
    for (const auto& op : op_layout(t)) {
        ++per_op[name(op.op)];
    }
    s << "top: " << t.top << "\n";
    s << "format: " << to_string(t.format) << "\n";
    s << "layers: " << t.num_layers << "\n";
    s << "ops: " << total << "\n";
    for (const auto& [op, n] : per_op) {
        s << "  " << op << ": " << n << "\n";
    }
    s << "slots: " << t.num_slots << " (" << t.inputs.size() << " inputs, " << t.registers.size() << " registers, "
      << t.constants.size() << " constants)\n";
    s << "outputs: " << t.outputs.size() << "\n";
    s << "arrays:";
    if (t.format == OimFormat::B) {
        s << " I_payload " << t.i_payload.size() << ", N_coord " << t.n_coord.size();
    } else {
        s << " N_payload " << t.n_payload.size();
    }
    s << ", S_coord " << t.s_coord.size() << ", R_coord " << t.r_coord.size() << ", P_params " << t.p_params.size()
      << "\n";
    s << "array bytes: " << array_bytes(t) << "\n";
    return s.str();
}

int cmd_compile(const CompileArgs& args, std::ostream& out, std::ostream& err) {
    return guarded(args.input, err, [&] {
        CompileOptions opts;
        opts.format = args.format;
        opts.keep_signals = args.keep_signals;
        opts.optimize = !args.no_opt;
        if (args.dump_passes) {
            opts.dump = [&out](std::string_view pass, const DataflowGraph& g) {
                out << "== " << pass << " (" << g.op_count() << " ops)\n" << dump_graph(g);
            };
        }
        const CompiledDesign d = compile_firrtl(read_text(args.input), opts);
        if (!args.out.empty()) {
            std::error_code ec;
            std::filesystem::create_directories(args.out, ec);
            if (ec) {
                throw IoError("cannot create " + args.out + ": " + ec.message());
            }
            serialize_oim(d.oim, args.out);
        }
        out << compile_stats(d.oim);
        return kExitOk;
    });
}

int cmd_simulate(const SimulateArgs& args, std::ostream& out, std::ostream& err) {
    return guarded(args.oim_dir, err, [&] {
        OimTensor t = load_oim(args.oim_dir);
        const KernelLevel level = !args.kernel.empty()          ? parse_level(args.kernel)
                                  : t.format == OimFormat::B ? KernelLevel::OU
                                                             : KernelLevel::NU;
        Testbench tb;
        if (!args.tb.empty()) {
            tb = load_testbench(args.tb, t);
        }
        RunOptions ro;
        ro.cycles = args.cycles;
        ro.vcd = !args.vcd.empty();
        ro.vcd_all = args.vcd_all && ro.vcd;
        if (ro.cycles == 0 && tb.cycles == 0) {
            throw std::invalid_argument("nothing to run: give --cycles or a testbench");
        }
        Simulator sim(std::move(t), KernelConfig{level, args.op_unroll, args.writeback_unroll});
        const TestbenchResult r = run_testbench(sim, tb, ro);
        if (r.trace) {
            write_vcd(*r.trace, args.vcd);
        }
        if (r.mismatch) {
            const Mismatch& m = *r.mismatch;
            err << "mismatch at cycle " << m.cycle << ": " << m.port << " got " << m.got << ", want " << m.want
                << "\n";
            return kExitFailure;
        }
        out << "ran " << r.cycles << " cycles on " << to_string(level) << "\n";
        for (const auto& p : sim.tensor().outputs) {
            out << "  " << p.name << " = " << to_decimal(sim.peek(p.name)) << "\n";
        }
        return kExitOk;
    });
}

int cmd_check(const CheckArgs& args, std::ostream& out, std::ostream& err) {
    const std::string where = args.input.empty() ? std::string("fuzz") : args.input;
    return guarded(where, err, [&] {
        DiffOptions opts;
        opts.cycles = args.cycles;
        opts.seed = args.seed;
        opts.levels = parse_levels(args.levels);
        opts.optimize = !args.no_opt;
        std::vector<Report> reports;
        if (!args.input.empty()) {
            if (args.fuzz > 0) {
                throw std::invalid_argument("give either an input file or --fuzz, not both");
            }
            reports.push_back(differential_check(read_text(args.input), opts));
        } else if (args.fuzz > 0) {
            const unsigned jobs = args.jobs != 0 ? args.jobs : std::max(1u, std::thread::hardware_concurrency());
            reports = differential_fuzz(args.fuzz, args.seed, FuzzSpec{}, opts, jobs);
        } else {
            throw std::invalid_argument("give an input file or --fuzz N");
        }
        uint64_t failed = 0;
        for (std::size_t k = 0; k < reports.size(); ++k) {
            const Report& r = reports[k];
            failed += r.pass ? 0 : 1;
            if (args.json) {
                out << r.json() << "\n";
            } else if (args.fuzz == 0) {
                out << r.text();
            } else if (!r.pass) {
                out << "seed " << (args.seed + k) << ": " << r.text();
            }
        }
        if (args.fuzz > 0 && !args.json) {
            out << (reports.size() - failed) << "/" << reports.size() << " designs pass\n";
        }
        return failed == 0 ? kExitOk : kExitFailure;
    });
}

int cmd_bench(const BenchArgs& args, std::ostream& out, std::ostream& err) {
    return guarded("bench", err, [&] {
        BenchOptions opts;
        opts.sizes.clear();
        for (const auto& s : split(args.sizes)) {
            std::size_t used = 0;
            long long v = 0;
            try {
                v = std::stoll(s, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != s.size() || v <= 0 || v > 100000000) {
                throw std::invalid_argument("bad benchmark size '" + s + "'");
            }
            opts.sizes.push_back(static_cast<unsigned>(v));
        }
        opts.level = parse_level(args.kernel);
        opts.cycles = args.cycles;
        opts.reps = args.reps;
        opts.seed = args.seed;
        const BenchReport r = run_bench(opts);
        if (args.csv.empty()) {
            out << r.csv();
        } else {
            write_text(args.csv, r.csv());
        }
        out << r.summary();
        return kExitOk;
    });
}

int cmd_fuzz(const FuzzArgs& args, std::ostream& out, std::ostream& err) {
    return guarded("fuzz", err, [&] {
        FuzzSpec spec;
        spec.seed = args.seed;
        if (args.nodes > 0) {
            spec.min_nodes = spec.max_nodes = args.nodes;
        }
        const std::string fir = random_circuit(spec);
        if (args.out.empty()) {
            out << fir;
        } else {
            write_text(args.out, fir);
        }
        return kExitOk;
    });
}

}  // namespace rtsim
