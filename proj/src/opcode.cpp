#include "rtsim/opcode.hpp"

#include <algorithm>
#include <string>
#include <vector>

#include "rtsim/bitvec.hpp"
#include "rtsim/error.hpp"

namespace rtsim {

std::optional<Opcode> opcode_from_name(std::string_view name) {
    for (unsigned i = 0; i < kNumOpcodes; ++i) {
        if (kOpcodeTable[i].name == name) {
            return static_cast<Opcode>(i);
        }
    }
    return std::nullopt;
}

namespace {

[[noreturn]] void type_error(Opcode op, const std::string& what) {
    throw TypeError(0, std::string(name(op)) + ": " + what);
}

SignalType checked(Opcode op, unsigned width, bool is_signed) {
    if (width > kMaxWidth) {
        throw UnsupportedConstruct(0, std::string(name(op)) + " result width " +
                                          std::to_string(width) + " exceeds 128 bits");
    }
    if (width == 0) {
        type_error(op, "result width would be zero");
    }
    return SignalType{static_cast<uint8_t>(width), is_signed};
}

void require_same_sign(Opcode op, const SignalType& a, const SignalType& b) {
    if (a.is_signed != b.is_signed) {
        type_error(op, "operands must both be UInt or both be SInt");
    }
}

}  // namespace

SignalType infer_type(Opcode op, std::span<const SignalType> args, std::span<const uint32_t> params) {
    if (params.size() != info(op).num_params) {
        type_error(op, "expected " + std::to_string(info(op).num_params) + " static parameters");
    }
    const unsigned n = arity(op, params);
    if (args.size() != n || (op == Opcode::MuxChain && params[0] < 1)) {
        type_error(op, "expected " + std::to_string(n) + " operands, got " + std::to_string(args.size()));
    }

    if (is_reducible(op)) {
        const SignalType& a = args[0];
        const SignalType& b = args[1];
        const unsigned wa = a.width;
        const unsigned wb = b.width;
        switch (op) {
        case Opcode::Add:
        case Opcode::Sub:
            require_same_sign(op, a, b);
            return checked(op, std::max(wa, wb) + 1, a.is_signed);
        case Opcode::Mul:
            require_same_sign(op, a, b);
            return checked(op, wa + wb, a.is_signed);
        case Opcode::Div:
            require_same_sign(op, a, b);
            return checked(op, a.is_signed ? wa + 1 : wa, a.is_signed);
        case Opcode::Rem:
            require_same_sign(op, a, b);
            return checked(op, std::min(wa, wb), a.is_signed);
        case Opcode::Lt:
        case Opcode::Leq:
        case Opcode::Gt:
        case Opcode::Geq:
        case Opcode::Eq:
        case Opcode::Neq:
            require_same_sign(op, a, b);
            return checked(op, 1, false);
        case Opcode::And:
        case Opcode::Or:
        case Opcode::Xor:
            require_same_sign(op, a, b);
            return checked(op, std::max(wa, wb), false);
        case Opcode::Cat:
            require_same_sign(op, a, b);
            return checked(op, wa + wb, false);
        case Opcode::Dshl:
            if (b.is_signed) {
                type_error(op, "shift amount must be UInt");
            }
            if (wb > 7) {
                type_error(op, "shift amount wider than 7 bits");
            }
            return checked(op, wa + (1u << wb) - 1, a.is_signed);
        case Opcode::Dshr:
            if (b.is_signed) {
                type_error(op, "shift amount must be UInt");
            }
            return checked(op, wa, a.is_signed);
        default:
            break;
        }
    }

    if (is_unary(op)) {
        const SignalType& a = args[0];
        const unsigned wa = a.width;
        switch (op) {
        case Opcode::Pad:
            return checked(op, std::max<unsigned>(wa, params[0]), a.is_signed);
        case Opcode::AsUInt:
            return checked(op, wa, false);
        case Opcode::AsSInt:
            return checked(op, wa, true);
        case Opcode::Shl:
            if (params[0] >= kMaxWidth) {
                type_error(op, "shift amount too large");
            }
            return checked(op, wa + params[0], a.is_signed);
        case Opcode::Shr:
            return checked(op, params[0] >= wa ? 1 : wa - params[0], a.is_signed);
        case Opcode::Cvt:
            return checked(op, a.is_signed ? wa : wa + 1, true);
        case Opcode::Neg:
            return checked(op, wa + 1, true);
        case Opcode::Not:
            return checked(op, wa, false);
        case Opcode::Andr:
        case Opcode::Orr:
        case Opcode::Xorr:
            return checked(op, 1, false);
        case Opcode::Bits:
            if (params[0] < params[1] || params[0] >= wa) {
                type_error(op, "bit range [" + std::to_string(params[0]) + ":" +
                                   std::to_string(params[1]) + "] out of range for width " +
                                   std::to_string(wa));
            }
            return checked(op, params[0] - params[1] + 1, false);
        case Opcode::Head:
            if (params[0] < 1 || params[0] > wa) {
                type_error(op, "head amount out of range");
            }
            return checked(op, params[0], false);
        case Opcode::Tail:
            if (params[0] >= wa) {
                type_error(op, "tail amount out of range");
            }
            return checked(op, wa - params[0], false);
        case Opcode::Copy:
            return a;
        default:
            break;
        }
    }

    // Select: every selector is UInt<1>; every data operand shares one signedness.
    const std::size_t num_data = op == Opcode::Mux ? 2 : params[0] + 1;
    auto check_sel = [&](const SignalType& s) {
        if (s.is_signed || s.width != 1) {
            type_error(op, "selector must be UInt<1>");
        }
    };
    std::vector<SignalType> data;
    data.reserve(num_data);
    if (op == Opcode::Mux) {
        check_sel(args[0]);
        data = {args[1], args[2]};
    } else {
        for (uint32_t k = 0; k < params[0]; ++k) {
            check_sel(args[2 * k]);
            data.push_back(args[2 * k + 1]);
        }
        data.push_back(args.back());
    }
    unsigned width = 0;
    for (const auto& d : data) {
        require_same_sign(op, d, data.front());
        width = std::max<unsigned>(width, d.width);
    }
    return checked(op, width, data.front().is_signed);
}

}  // namespace rtsim
