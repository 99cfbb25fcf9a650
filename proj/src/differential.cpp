#include "rtsim/differential.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

#include <json.hpp>

#include "rtsim/error.hpp"
#include "rtsim/fuzz.hpp"
#include "rtsim/oracle.hpp"
#include "rtsim/toolchain.hpp"

namespace rtsim {

void swap_sub_operands(OimTensor& t) {
    for (const OpLayout& op : op_layout(t)) {
        if (op.op == Opcode::Sub) {
            std::swap(t.r_coord[op.r_begin], t.r_coord[op.r_begin + 1]);
        }
    }
}

namespace {

std::string describe(const Divergence& d) {
    return "cycle " + std::to_string(d.cycle) + ", " + d.port + ": " + d.reference + " = " + d.expected + ", " +
           d.level + " = " + d.got;
}

nlohmann::json divergence_json(const std::optional<Divergence>& d) {
    if (!d) {
        return nullptr;
    }
    return {{"cycle", d->cycle},       {"port", d->port},         {"level", d->level},
            {"reference", d->reference}, {"expected", d->expected}, {"got", d->got}};
}

}  // namespace

std::string Report::text() const {
    std::string out = pass ? "PASS" : "FAIL";
    out += ": " + std::to_string(cycles) + " cycles, " + std::to_string(ops) + " ops, " + std::to_string(layers) +
           " layers, levels";
    for (auto l : levels) {
        out += " " + std::string(to_string(l));
    }
    out += "\n";
    if (error) {
        out += "error: " + *error + "\n";
    }
    if (divergence) {
        out += "divergence: " + describe(*divergence) + "\n";
    }
    if (ladder) {
        out += "ladder divergence: " + describe(*ladder) + "\n";
    }
    return out;
}

std::string Report::json() const {
    nlohmann::json j;
    j["pass"] = pass;
    j["cycles"] = cycles;
    j["ops"] = ops;
    j["layers"] = layers;
    nlohmann::json lv = nlohmann::json::array();
    for (auto l : levels) {
        lv.push_back(std::string(to_string(l)));
    }
    j["levels"] = lv;
    j["divergence"] = divergence_json(divergence);
    j["ladder_divergence"] = divergence_json(ladder);
    j["error"] = error ? nlohmann::json(*error) : nlohmann::json(nullptr);
    return j.dump();
}

Report differential_check(std::string_view fir, const DiffOptions& options) {
    Report report;
    report.levels = options.levels;
    try {
        CompileOptions copts;
        copts.optimize = options.optimize;
        const CompiledDesign design = compile_firrtl(fir, copts);
        report.ops = design.oim.num_ops();
        report.layers = design.oim.num_layers;

        Oracle oracle(design.raw);
        std::vector<Simulator> sims;
        for (KernelLevel level : options.levels) {
            OimTensor t = relower(design, required_format(level));
            if (options.swap_sub_operands) {
                swap_sub_operands(t);
            }
            sims.emplace_back(std::move(t), KernelConfig{level});
        }

        // ports compared every cycle: outputs, then registers
        std::vector<std::string> observed;
        for (const auto& o : design.raw.outputs) {
            observed.push_back(o.name);
        }
        for (const auto& r : design.raw.registers) {
            observed.push_back(design.raw.nodes[r.reg].name);
        }
        std::vector<std::string> input_names;
        std::vector<unsigned> widths;
        for (uint32_t id : design.raw.inputs) {
            input_names.push_back(design.raw.nodes[id].name);
            widths.push_back(design.raw.nodes[id].width);
        }
        PokeStream pokes(options.seed, widths);

        for (uint64_t cycle = 1; cycle <= options.cycles; ++cycle) {
            const std::vector<u128> values = pokes.next();
            for (std::size_t k = 0; k < values.size(); ++k) {
                oracle.poke(input_names[k], values[k]);
                for (auto& s : sims) {
                    s.poke(input_names[k], values[k]);
                }
            }
            oracle.step();
            for (auto& s : sims) {
                s.step();
            }
            for (const auto& port : observed) {
                const BitVec want = oracle.peek(port);
                std::optional<BitVec> first;
                for (std::size_t k = 0; k < sims.size(); ++k) {
                    const BitVec got = sims[k].peek(port);
                    const std::string level(to_string(options.levels[k]));
                    if (!report.divergence && got != want) {
                        report.divergence =
                            Divergence{cycle, port, level, "oracle", to_decimal(want), to_decimal(got)};
                    }
                    if (!first) {
                        first = got;
                    } else if (!report.ladder && got != *first) {
                        report.ladder = Divergence{cycle, port, level, std::string(to_string(options.levels[0])),
                                                   to_decimal(*first), to_decimal(got)};
                    }
                }
            }
            report.cycles = cycle;
            if (report.divergence) {
                break;
            }
        }
    } catch (const SourceError& e) {
        report.error = "line " + std::to_string(e.line()) + ": " + e.message();
    } catch (const std::exception& e) {
        report.error = e.what();
    }
    report.pass = !report.error && !report.divergence && !report.ladder;
    return report;
}

std::vector<Report> differential_fuzz(uint64_t count, uint64_t first_seed, const FuzzSpec& base,
                                      const DiffOptions& options, unsigned jobs) {
    std::vector<Report> reports(count);
    std::atomic<uint64_t> next{0};
    auto worker = [&] {
        for (uint64_t k = next++; k < count; k = next++) {
            FuzzSpec spec = base;
            spec.seed = first_seed + k;
            DiffOptions o = options;
            o.seed = spec.seed;
            reports[k] = differential_check(random_circuit(spec), o);
        }
    };
    jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<uint64_t>(count, 1))));
    std::vector<std::thread> pool;
    for (unsigned j = 1; j < jobs; ++j) {
        pool.emplace_back(worker);
    }
    worker();
    for (auto& t : pool) {
        t.join();
    }
    return reports;
}

}  // namespace rtsim
