#include "rtsim/kernel.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <stdexcept>
#include <utility>

#include "rtsim/error.hpp"
#include "rtsim/ops.hpp"

namespace rtsim {

std::string_view to_string(KernelLevel level) {
    switch (level) {
    case KernelLevel::RU: return "RU";
    case KernelLevel::OU: return "OU";
    case KernelLevel::NU: return "NU";
    case KernelLevel::PSU: return "PSU";
    case KernelLevel::IU: return "IU";
    case KernelLevel::SU: return "SU";
    case KernelLevel::TI: return "TI";
    }
    return "?";
}

std::optional<KernelLevel> kernel_level_from_name(std::string_view name) {
    std::string upper(name);
    for (auto& c : upper) {
        c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    }
    for (auto level : {KernelLevel::RU, KernelLevel::OU, KernelLevel::NU, KernelLevel::PSU, KernelLevel::IU,
                       KernelLevel::SU, KernelLevel::TI}) {
        if (to_string(level) == upper) {
            return level;
        }
    }
    return std::nullopt;
}

OimFormat required_format(KernelLevel level) {
    return level == KernelLevel::RU || level == KernelLevel::OU ? OimFormat::B : OimFormat::C;
}

SignalState init_state(const OimTensor& t) {
    SignalState st;
    st.li.resize(t.num_slots);
    for (uint32_t s = 0; s < t.num_slots; ++s) {
        st.li[s] = BitVec{0, t.widths[s], t.signedness[s] != 0};
    }
    for (const auto& c : t.constants) {
        st.li[c.slot].value = c.value;
    }
    for (const auto& r : t.registers) {
        st.li[r.current].value = r.init;
    }
    st.reg_next.resize(t.registers.size());
    return st;
}

void poke(SignalState& state, const OimTensor& t, std::string_view port, u128 value) {
    for (const auto& p : t.inputs) {
        if (p.name == port) {
            BitVec& slot = state.li[p.slot];
            if ((value & ~width_mask(slot.width)) != 0) {
                throw ValueOutOfRange("value " + to_decimal(value) + " does not fit " + std::string(port) +
                                      " (" + std::to_string(slot.width) + " bits)");
            }
            slot.value = value;
            return;
        }
    }
    for (const auto* ports : {&t.outputs, &t.signals}) {
        for (const auto& p : *ports) {
            if (p.name == port) {
                throw NotPokeable(std::string(port));
            }
        }
    }
    throw UnknownPort(std::string(port));
}

BitVec peek(const SignalState& state, const OimTensor& t, std::string_view port) {
    for (const auto* ports : {&t.outputs, &t.inputs, &t.signals}) {
        for (const auto& p : *ports) {
            if (p.name == port) {
                return state.li[p.slot];
            }
        }
    }
    throw UnknownPort(std::string(port));
}

void commit_registers(SignalState& state, const OimTensor& t) {
    const std::size_t n = t.registers.size();
    for (std::size_t k = 0; k < n; ++k) {
        const OimRegister& r = t.registers[k];
        const BitVec& cur = state.li[r.current];
        if (r.reset && state.li[*r.reset].value != 0) {
            state.reg_next[k] = BitVec{r.init, cur.width, cur.is_signed};
        } else {
            state.reg_next[k] = make_bitvec(ops::ext(state.li[r.next]), cur.width, cur.is_signed);
        }
    }
    for (std::size_t k = 0; k < n; ++k) {
        state.li[t.registers[k].current] = state.reg_next[k];
    }
}

namespace {

struct Ctx {
    BitVec* li;
    const uint32_t* s;
    const uint32_t* r;
    const uint32_t* p_offset;
    const uint32_t* p;
    const uint8_t* widths;
    const uint8_t* signedness;
};

template <Opcode Op>
inline BitVec eval_one(const Ctx& c, const uint32_t* r, const uint32_t* params, unsigned w, bool sg) {
    const BitVec* li = c.li;
    u128 v;
    if constexpr (is_unary(Op)) {
        v = ops::unary_value(Op, li[r[0]], params, w);
    } else if constexpr (is_reducible(Op)) {
        v = ops::binary_value(Op, li[r[0]], li[r[1]], w);
    } else if constexpr (Op == Opcode::Mux) {
        v = ops::mux_value(li[r[0]], li[r[1]], li[r[2]], w);
    } else {
        v = ops::muxchain_value(params[0], [&](uint32_t o) -> const BitVec& { return li[r[o]]; }, w);
    }
    return BitVec{v, static_cast<uint8_t>(w), sg};
}

using GroupFn = uint32_t (*)(const Ctx&, uint32_t j0, uint32_t count, uint32_t r0, BitVec* lo);

// One (layer, opcode) group of Format C: the S loop, blocked by U.
template <Opcode Op, unsigned U>
uint32_t run_group(const Ctx& c, uint32_t j0, uint32_t count, uint32_t r0, BitVec* lo) {
    if constexpr (Op == Opcode::MuxChain) {
        uint32_t r = r0;
        for (uint32_t k = 0; k < count; ++k) {
            const uint32_t j = j0 + k;
            const uint32_t s = c.s[j];
            const uint32_t* params = c.p + c.p_offset[j];
            lo[k] = eval_one<Op>(c, c.r + r, params, c.widths[s], c.signedness[s] != 0);
            r += 2 * params[0] + 1;
        }
        return r;
    } else {
        constexpr uint32_t A = info(Op).arity;
        auto one = [&](uint32_t k) {
            const uint32_t j = j0 + k;
            const uint32_t s = c.s[j];
            lo[k] = eval_one<Op>(c, c.r + r0 + k * A, c.p + c.p_offset[j], c.widths[s], c.signedness[s] != 0);
        };
        uint32_t k = 0;
        if constexpr (U > 1) {
            for (; k + U <= count; k += U) {
                for (unsigned u = 0; u < U; ++u) {
                    one(k + u);
                }
            }
        }
        for (; k < count; ++k) {
            one(k);
        }
        return r0 + count * A;
    }
}

template <unsigned U, std::size_t... I>
constexpr std::array<GroupFn, kNumOpcodes> make_group_table(std::index_sequence<I...>) {
    return {&run_group<static_cast<Opcode>(I), U>...};
}

template <unsigned U>
inline constexpr std::array<GroupFn, kNumOpcodes> kGroupTable =
    make_group_table<U>(std::make_index_sequence<kNumOpcodes>{});

const std::array<GroupFn, kNumOpcodes>& group_table(unsigned u) {
    switch (u) {
    case 1: return kGroupTable<1>;
    case 2: return kGroupTable<2>;
    case 4: return kGroupTable<4>;
    case 8: return kGroupTable<8>;
    case 16: return kGroupTable<16>;
    default: throw std::invalid_argument("op unroll factor must be one of 1, 2, 4, 8, 16");
    }
}

using WriteBackFn = void (*)(BitVec* li, const uint32_t* s, const BitVec* lo, uint32_t count);

template <unsigned W>
void write_back(BitVec* li, const uint32_t* s, const BitVec* lo, uint32_t count) {
    uint32_t k = 0;
    if constexpr (W > 1) {
        for (; k + W <= count; k += W) {
            for (unsigned u = 0; u < W; ++u) {
                li[s[k + u]] = lo[k + u];
            }
        }
    }
    for (; k < count; ++k) {
        li[s[k]] = lo[k];
    }
}

WriteBackFn write_back_fn(unsigned w) {
    switch (w) {
    case 1: return &write_back<1>;
    case 4: return &write_back<4>;
    case 8: return &write_back<8>;
    case 16: return &write_back<16>;
    case 24: return &write_back<24>;
    case 32: return &write_back<32>;
    default: throw std::invalid_argument("write-back unroll factor must be one of 1, 4, 8, 16, 24, 32");
    }
}

struct PlanEntry {
    GroupFn fn;
    uint32_t j0;
    uint32_t count;
    uint32_t r0;
};

struct LayerPlan {
    uint32_t j0;
    uint32_t count;
    std::vector<PlanEntry> groups;  // non-empty groups only
};

}  // namespace

struct Kernel::Impl {
    std::vector<BitVec> lo;  // per-layer scratch
    std::vector<BitVec> sel_inputs;
    const std::array<GroupFn, kNumOpcodes>* groups = nullptr;
    WriteBackFn wb = nullptr;
    std::vector<LayerPlan> plan;  // IU
};

Kernel::Kernel(const OimTensor& tensor, KernelConfig config)
    : tensor_(&tensor), config_(config), impl_(std::make_unique<Impl>()) {
    if (config.level == KernelLevel::SU || config.level == KernelLevel::TI) {
        throw Error("kernel level " + std::string(to_string(config.level)) +
                    " needs generated code and is not available in the interpreter");
    }
    if (required_format(config.level) != tensor.format) {
        throw FormatMismatch("kernel " + std::string(to_string(config.level)) + " requires Format " +
                             std::string(to_string(required_format(config.level))) + ", tensor is Format " +
                             std::string(to_string(tensor.format)));
    }
    const OimTensor& t = tensor;
    std::size_t widest = 0;
    std::size_t max_arity = 0;
    if (t.format == OimFormat::B) {
        for (uint32_t c : t.i_payload) {
            widest = std::max<std::size_t>(widest, c);
        }
    } else {
        for (uint32_t i = 0; i < t.num_layers; ++i) {
            std::size_t layer = 0;
            for (uint32_t n = 0; n < kNumOpcodes; ++n) {
                layer += t.n_payload[i * kNumOpcodes + n];
            }
            widest = std::max(widest, layer);
        }
    }
    for (uint32_t j = 0; j < t.num_ops(); ++j) {
        const uint32_t np = t.p_offset[j + 1] - t.p_offset[j];
        if (np == 1 && (t.format == OimFormat::C || t.n_coord[j] == static_cast<uint32_t>(Opcode::MuxChain))) {
            max_arity = std::max<std::size_t>(max_arity, 2 * t.p_params[t.p_offset[j]] + 1);
        }
    }
    impl_->lo.resize(widest);
    impl_->sel_inputs.resize(std::max<std::size_t>(max_arity, 3));

    const bool blocked = config.level == KernelLevel::PSU || config.level == KernelLevel::IU;
    impl_->groups = &group_table(blocked ? config.op_unroll : 1);
    impl_->wb = write_back_fn(blocked ? config.writeback_unroll : 1);

    if (config.level == KernelLevel::IU) {
        uint32_t j = 0;
        uint32_t r = 0;
        for (uint32_t i = 0; i < t.num_layers; ++i) {
            LayerPlan lp{j, 0, {}};
            for (uint32_t n = 0; n < kNumOpcodes; ++n) {
                const uint32_t count = t.n_payload[i * kNumOpcodes + n];
                if (count == 0) {
                    continue;
                }
                lp.groups.push_back(PlanEntry{(*impl_->groups)[n], j, count, r});
                if (static_cast<Opcode>(n) == Opcode::MuxChain) {
                    for (uint32_t k = 0; k < count; ++k) {
                        r += 2 * t.p_params[t.p_offset[j + k]] + 1;
                    }
                } else {
                    r += count * info(static_cast<Opcode>(n)).arity;
                }
                j += count;
            }
            lp.count = j - lp.j0;
            impl_->plan.push_back(std::move(lp));
        }
    }
}

Kernel::~Kernel() = default;
Kernel::Kernel(Kernel&&) noexcept = default;
Kernel& Kernel::operator=(Kernel&&) noexcept = default;

namespace {

// RU: generic S loop over Format B, opcode-dispatched O loop with one R
// fetch per o, LO scratch, then write-back.
void step_ru(const OimTensor& t, BitVec* li, BitVec* lo, BitVec* sel_inputs) {
    uint32_t j = 0;
    uint32_t r = 0;
    for (uint32_t i = 0; i < t.num_layers; ++i) {
        const uint32_t j0 = j;
        const uint32_t count = t.i_payload[i];
        for (uint32_t k = 0; k < count; ++k, ++j) {
            const auto n = static_cast<Opcode>(t.n_coord[j]);
            const uint32_t s = t.s_coord[j];
            const uint32_t* params = t.p_params.data() + t.p_offset[j];
            const unsigned a = n == Opcode::MuxChain ? 2 * params[0] + 1 : info(n).arity;
            const unsigned w = t.widths[s];
            const bool sg = t.signedness[s] != 0;
            if (is_select(n)) {
                for (unsigned o = 0; o < a; ++o) {
                    sel_inputs[o] = li[t.r_coord[r + o]];
                }
                lo[k] = ops::op_s(n, std::span<const BitVec>(sel_inputs, a), params, w, sg);
            } else {
                BitVec acc{};
                for (unsigned o = 0; o < a; ++o) {
                    const BitVec x = ops::op_u(n, li[t.r_coord[r + o]], params, w, sg);
                    acc = o == 0 ? x : ops::op_r(n, acc, x, w, sg);
                }
                lo[k] = acc;
            }
            r += a;
        }
        for (uint32_t k = 0; k < count; ++k) {
            li[t.s_coord[j0 + k]] = lo[k];
        }
    }
}

// OU: the O loop is replaced by an arity-specialized fetch.
void step_ou(const OimTensor& t, BitVec* li, BitVec* lo) {
    uint32_t j = 0;
    uint32_t r = 0;
    for (uint32_t i = 0; i < t.num_layers; ++i) {
        const uint32_t j0 = j;
        const uint32_t count = t.i_payload[i];
        for (uint32_t k = 0; k < count; ++k, ++j) {
            const auto n = static_cast<Opcode>(t.n_coord[j]);
            const uint32_t s = t.s_coord[j];
            const uint32_t* params = t.p_params.data() + t.p_offset[j];
            const unsigned w = t.widths[s];
            const uint32_t* rr = t.r_coord.data() + r;
            u128 v;
            if (n == Opcode::MuxChain) {
                v = ops::muxchain_value(params[0], [&](uint32_t o) -> const BitVec& { return li[rr[o]]; }, w);
                r += 2 * params[0] + 1;
            } else {
                switch (info(n).arity) {
                case 1:
                    v = ops::unary_value(n, li[rr[0]], params, w);
                    r += 1;
                    break;
                case 2:
                    v = ops::binary_value(n, li[rr[0]], li[rr[1]], w);
                    r += 2;
                    break;
                default:
                    v = ops::mux_value(li[rr[0]], li[rr[1]], li[rr[2]], w);
                    r += 3;
                    break;
                }
            }
            lo[k] = BitVec{v, static_cast<uint8_t>(w), t.signedness[s] != 0};
        }
        for (uint32_t k = 0; k < count; ++k) {
            li[t.s_coord[j0 + k]] = lo[k];
        }
    }
}

}  // namespace

void Kernel::step(SignalState& state) {
    const OimTensor& t = *tensor_;
    BitVec* li = state.li.data();
    BitVec* lo = impl_->lo.data();
    switch (config_.level) {
    case KernelLevel::RU:
        step_ru(t, li, lo, impl_->sel_inputs.data());
        break;
    case KernelLevel::OU:
        step_ou(t, li, lo);
        break;
    case KernelLevel::NU:
    case KernelLevel::PSU: {
        const Ctx c{li, t.s_coord.data(), t.r_coord.data(), t.p_offset.data(), t.p_params.data(), t.widths.data(),
                    t.signedness.data()};
        const auto& groups = *impl_->groups;
        uint32_t j = 0;
        uint32_t r = 0;
        for (uint32_t i = 0; i < t.num_layers; ++i) {
            const uint32_t j0 = j;
            const uint32_t* np = t.n_payload.data() + std::size_t{i} * kNumOpcodes;
            for (uint32_t n = 0; n < kNumOpcodes; ++n) {
                r = groups[n](c, j, np[n], r, lo + (j - j0));
                j += np[n];
            }
            impl_->wb(li, t.s_coord.data() + j0, lo, j - j0);
        }
        break;
    }
    case KernelLevel::IU: {
        const Ctx c{li, t.s_coord.data(), t.r_coord.data(), t.p_offset.data(), t.p_params.data(), t.widths.data(),
                    t.signedness.data()};
        for (const LayerPlan& lp : impl_->plan) {
            for (const PlanEntry& g : lp.groups) {
                g.fn(c, g.j0, g.count, g.r0, lo + (g.j0 - lp.j0));
            }
            impl_->wb(li, t.s_coord.data() + lp.j0, lo, lp.count);
        }
        break;
    }
    case KernelLevel::SU:
    case KernelLevel::TI:
        break;
    }
    commit_registers(state, t);
    ++state.cycle;
}

void step_cycle(SignalState& state, const OimTensor& t, const KernelConfig& config) {
    Kernel(t, config).step(state);
}

Simulator::Simulator(OimTensor tensor, KernelConfig config)
    : tensor_(std::make_unique<OimTensor>(std::move(tensor))),
      kernel_(*tensor_, config),
      state_(init_state(*tensor_)) {
    for (const auto& p : tensor_->inputs) {
        inputs_.emplace(p.name, p.slot);
    }
    for (const auto* ports : {&tensor_->outputs, &tensor_->inputs, &tensor_->signals}) {
        for (const auto& p : *ports) {
            readable_.emplace(p.name, p.slot);
        }
    }
}

void Simulator::poke(std::string_view port, u128 value) {
    auto it = inputs_.find(std::string(port));
    if (it == inputs_.end()) {
        rtsim::poke(state_, *tensor_, port, value);  // raises the specific error
        return;
    }
    BitVec& slot = state_.li[it->second];
    if ((value & ~width_mask(slot.width)) != 0) {
        throw ValueOutOfRange("value " + to_decimal(value) + " does not fit " + std::string(port) + " (" +
                              std::to_string(slot.width) + " bits)");
    }
    slot.value = value;
}

BitVec Simulator::peek(std::string_view port) const {
    auto it = readable_.find(std::string(port));
    if (it == readable_.end()) {
        throw UnknownPort(std::string(port));
    }
    return state_.li[it->second];
}

void Simulator::step() { kernel_.step(state_); }

void Simulator::run(uint64_t cycles) {
    for (uint64_t c = 0; c < cycles; ++c) {
        kernel_.step(state_);
    }
}

}  // namespace rtsim
