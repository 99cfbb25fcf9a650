#include "rtsim/ops.hpp"

#include <string>

#include "rtsim/error.hpp"

namespace rtsim::ops {

BitVec apply_op(Opcode op, std::span<const BitVec> operands, std::span<const uint32_t> params,
                unsigned out_width, bool out_signed) {
    if (op == Opcode::MuxChain && params.empty()) {
        throw ArityMismatch("muxchain requires its chain length parameter");
    }
    const unsigned n = arity(op, params);
    if (operands.size() != n) {
        throw ArityMismatch(std::string(name(op)) + " expects " + std::to_string(n) +
                            " operands, got " + std::to_string(operands.size()));
    }
    if (is_select(op)) {
        return op_s(op, operands, params.data(), out_width, out_signed);
    }
    // Fold the O fiber in coordinate order: the first map temporary seeds the
    // reduce temporary, later ones are combined with op_r.
    BitVec acc = op_u(op, operands[0], params.data(), out_width, out_signed);
    for (unsigned o = 1; o < n; ++o) {
        acc = op_r(op, acc, op_u(op, operands[o], params.data(), out_width, out_signed), out_width,
                   out_signed);
    }
    return make_bitvec(acc.value, out_width, out_signed);
}

}  // namespace rtsim::ops
