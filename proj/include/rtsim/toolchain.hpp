#pragma once

// FIRRTL text -> OIM tensor.

#include <string_view>

#include "rtsim/dfg.hpp"
#include "rtsim/firrtl.hpp"
#include "rtsim/netlist.hpp"
#include "rtsim/oim.hpp"

namespace rtsim {

struct CompileOptions {
    OimFormat format = OimFormat::B;
    bool keep_signals = false;
    bool optimize = true;
    PassDump dump;  // called after each pass
};

struct CompiledDesign {
    Netlist netlist;
    DataflowGraph raw;  // before any pass; what the oracle evaluates
    LayeredGraph layered;
    SlotAssignment slots;
    OimTensor oim;
};

CompiledDesign compile_firrtl(std::string_view text, const CompileOptions& options = {});

/// Same design, other format.
OimTensor relower(const CompiledDesign& design, OimFormat format);

}  // namespace rtsim
