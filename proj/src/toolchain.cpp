#include "rtsim/toolchain.hpp"

namespace rtsim {

CompiledDesign compile_firrtl(std::string_view text, const CompileOptions& options) {
    CompiledDesign d;
    d.netlist = elaborate(firrtl::parse_firrtl(text));
    d.raw = build_graph(d.netlist, options.keep_signals);
    if (options.dump) {
        options.dump("build_graph", d.raw);
    }
    d.layered = levelize(options.optimize ? run_pipeline(d.raw, options.dump) : d.raw);
    d.slots = assign_slots(d.layered);
    d.oim = build_oim(d.layered, d.slots, options.format);
    return d;
}

OimTensor relower(const CompiledDesign& design, OimFormat format) {
    return build_oim(design.layered, design.slots, format);
}

}  // namespace rtsim
