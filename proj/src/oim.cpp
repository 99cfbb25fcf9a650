#include "rtsim/oim.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "rtsim/error.hpp"

namespace rtsim {

std::string_view to_string(OimFormat f) { return f == OimFormat::B ? "B" : "C"; }

uint8_t minimal_bits(uint64_t max_value) {
    for (uint8_t bits : {8, 16, 32}) {
        if (max_value < (uint64_t{1} << bits)) {
            return bits;
        }
    }
    return 64;
}

namespace {

uint64_t max_of(const std::vector<uint32_t>& v) {
    return v.empty() ? 0 : *std::max_element(v.begin(), v.end());
}

std::vector<RankDescriptor> expected_ranks(const OimTensor& t) {
    const RankDescriptor s{"S", true, minimal_bits(max_of(t.s_coord)), 0};
    const RankDescriptor o{"O", false, 0, 0};
    const RankDescriptor r{"R", true, minimal_bits(max_of(t.r_coord)), 0};
    if (t.format == OimFormat::B) {
        return {RankDescriptor{"I", false, 0, minimal_bits(max_of(t.i_payload))}, s,
                RankDescriptor{"N", true, minimal_bits(max_of(t.n_coord)), 0}, o, r};
    }
    return {RankDescriptor{"I", false, 0, 0}, RankDescriptor{"N", false, 0, minimal_bits(max_of(t.n_payload))}, s,
            o, r};
}

struct OpView {
    uint32_t index;  // position in S_coord
    uint32_t layer;
    Opcode op;
    uint32_t r_begin;
    uint32_t arity;
};

// Walks the ops in storage order. Assumes the length invariants hold.
template <class Fn>
void for_each_op(const OimTensor& t, Fn&& fn) {
    uint32_t j = 0;
    uint32_t r = 0;
    auto visit = [&](uint32_t layer, Opcode op) {
        const uint32_t p = t.p_offset[j];
        const uint32_t np = t.p_offset[j + 1] - p;
        const uint32_t a = arity(op, std::span<const uint32_t>(t.p_params.data() + p, np));
        fn(OpView{j, layer, op, r, a});
        r += a;
        ++j;
    };
    if (t.format == OimFormat::B) {
        for (uint32_t i = 0; i < t.num_layers; ++i) {
            for (uint32_t k = 0; k < t.i_payload[i]; ++k) {
                visit(i, static_cast<Opcode>(t.n_coord[j]));
            }
        }
    } else {
        for (uint32_t i = 0; i < t.num_layers; ++i) {
            for (uint32_t n = 0; n < kNumOpcodes; ++n) {
                for (uint32_t k = 0; k < t.n_payload[i * kNumOpcodes + n]; ++k) {
                    visit(i, static_cast<Opcode>(n));
                }
            }
        }
    }
}

uint64_t sum(const std::vector<uint32_t>& v) { return std::accumulate(v.begin(), v.end(), uint64_t{0}); }

}  // namespace

OimTensor build_oim(const LayeredGraph& lg, const SlotAssignment& slots, OimFormat format) {
    const DataflowGraph& g = lg.graph;
    uint64_t total_ops = 0;
    for (const auto& layer : lg.layers) {
        total_ops += layer.size();
    }
    if (total_ops > 0xFFFFFFFFull || slots.total == 0xFFFFFFFFu) {
        throw CapacityError("design exceeds 2^32 operations or slots");
    }
    OimTensor t;
    t.format = format;
    t.top = g.top;
    t.num_layers = static_cast<uint32_t>(lg.depth());
    t.num_slots = slots.total;
    t.widths.resize(slots.total);
    t.signedness.resize(slots.total);
    for (uint32_t i = 0; i < g.nodes.size(); ++i) {
        t.widths[slots.node_slot[i]] = g.nodes[i].width;
        t.signedness[slots.node_slot[i]] = g.nodes[i].is_signed ? 1 : 0;
    }
    if (format == OimFormat::C) {
        t.n_payload.assign(std::size_t{t.num_layers} * kNumOpcodes, 0);
    }
    t.p_offset.push_back(0);
    uint64_t r_total = 0;
    for (uint32_t i = 0; i < t.num_layers; ++i) {
        const auto& layer = lg.layers[i];
        if (format == OimFormat::B) {
            t.i_payload.push_back(static_cast<uint32_t>(layer.size()));
        }
        // layers are sorted by opcode, which is exactly the Format C grouping
        for (uint32_t id : layer) {
            const Node& n = g.nodes[id];
            if (format == OimFormat::B) {
                t.n_coord.push_back(static_cast<uint32_t>(n.op));
            } else {
                ++t.n_payload[std::size_t{i} * kNumOpcodes + static_cast<unsigned>(n.op)];
            }
            t.s_coord.push_back(slots.node_slot[id]);
            for (uint32_t o : n.operands) {
                t.r_coord.push_back(slots.node_slot[o]);
            }
            r_total += n.operands.size();
            t.p_params.insert(t.p_params.end(), n.params.begin(), n.params.end());
            t.p_offset.push_back(static_cast<uint32_t>(t.p_params.size()));
        }
    }
    if (r_total > 0xFFFFFFFFull) {
        throw CapacityError("operand count exceeds 2^32");
    }
    for (const auto& r : slots.registers) {
        t.registers.push_back(OimRegister{r.current, r.next, r.reset, r.init});
    }
    for (const auto& c : slots.constants) {
        t.constants.push_back(OimConstant{c.slot, c.value});
    }
    for (const auto& p : slots.inputs) {
        t.inputs.push_back(OimPort{p.name, p.slot});
    }
    for (const auto& p : slots.outputs) {
        t.outputs.push_back(OimPort{p.name, p.slot});
    }
    for (const auto& p : slots.signals) {
        t.signals.push_back(OimPort{p.name, p.slot});
    }
    t.ranks = expected_ranks(t);
    return t;
}

std::vector<std::string> validate_oim(const OimTensor& t) {
    std::vector<std::string> diag;
    auto fail = [&](std::string msg) { diag.push_back(std::move(msg)); };
    const std::size_t ops = t.s_coord.size();

    if (t.format == OimFormat::B) {
        if (t.i_payload.size() != t.num_layers) {
            fail("I_payload has " + std::to_string(t.i_payload.size()) + " entries, expected num_layers = " +
                 std::to_string(t.num_layers));
        }
        if (sum(t.i_payload) != ops) {
            fail("sum(I_payload) = " + std::to_string(sum(t.i_payload)) + " but len(S_coord) = " +
                 std::to_string(ops));
        }
        if (t.n_coord.size() != ops) {
            fail("len(N_coord) = " + std::to_string(t.n_coord.size()) + " but len(S_coord) = " +
                 std::to_string(ops));
        }
        if (!t.n_payload.empty()) {
            fail("Format B must not carry N_payload");
        }
        for (std::size_t j = 0; j < t.n_coord.size(); ++j) {
            if (t.n_coord[j] >= kNumOpcodes) {
                fail("op " + std::to_string(j) + ": opcode tag " + std::to_string(t.n_coord[j]) + " out of range");
            }
        }
    } else {
        if (t.n_payload.size() != std::size_t{t.num_layers} * kNumOpcodes) {
            fail("len(N_payload) = " + std::to_string(t.n_payload.size()) + ", expected num_layers x " +
                 std::to_string(kNumOpcodes));
        }
        if (sum(t.n_payload) != ops) {
            fail("sum(N_payload) = " + std::to_string(sum(t.n_payload)) + " but len(S_coord) = " +
                 std::to_string(ops));
        }
        if (!t.i_payload.empty() || !t.n_coord.empty()) {
            fail("Format C must not carry I_payload or N_coord");
        }
    }
    if (t.p_offset.size() != ops + 1) {
        fail("len(P_offset) = " + std::to_string(t.p_offset.size()) + ", expected num_ops + 1");
    } else {
        if (t.p_offset.front() != 0 || t.p_offset.back() != t.p_params.size()) {
            fail("P_offset does not span P_params");
        }
        for (std::size_t j = 0; j + 1 < t.p_offset.size(); ++j) {
            if (t.p_offset[j + 1] < t.p_offset[j]) {
                fail("P_offset decreases at op " + std::to_string(j));
                break;
            }
        }
    }
    if (t.widths.size() != t.num_slots || t.signedness.size() != t.num_slots) {
        fail("widths/signed must have num_slots entries");
    } else {
        for (uint32_t s = 0; s < t.num_slots; ++s) {
            if (t.widths[s] < 1 || t.widths[s] > kMaxWidth) {
                fail("slot " + std::to_string(s) + ": width " + std::to_string(t.widths[s]) + " out of range");
            }
            if (t.signedness[s] > 1) {
                fail("slot " + std::to_string(s) + ": signed flag must be 0 or 1");
            }
        }
    }
    if (t.ranks != expected_ranks(t)) {
        fail("rank descriptors do not match the arrays");
    }
    for (std::size_t j = 0; j < ops; ++j) {
        if (t.s_coord[j] >= t.num_slots) {
            fail("op " + std::to_string(j) + ": S_coord " + std::to_string(t.s_coord[j]) + " >= num_slots " +
                 std::to_string(t.num_slots));
        }
    }
    for (std::size_t k = 0; k < t.r_coord.size(); ++k) {
        if (t.r_coord[k] >= t.num_slots) {
            fail("R_coord[" + std::to_string(k) + "] = " + std::to_string(t.r_coord[k]) + " >= num_slots");
        }
    }
    auto check_slot = [&](const std::string& what, uint32_t slot) {
        if (slot >= t.num_slots) {
            fail(what + ": slot " + std::to_string(slot) + " >= num_slots");
        }
    };
    for (const auto& r : t.registers) {
        check_slot("register", r.current);
        check_slot("register next", r.next);
        if (r.reset) {
            check_slot("register reset", *r.reset);
        }
        if (r.current < t.widths.size() && (r.init & ~width_mask(t.widths[r.current])) != 0) {
            fail("register init does not fit slot " + std::to_string(r.current));
        }
    }
    for (const auto& c : t.constants) {
        check_slot("constant", c.slot);
        if (c.slot < t.widths.size() && (c.value & ~width_mask(t.widths[c.slot])) != 0) {
            fail("constant does not fit slot " + std::to_string(c.slot));
        }
    }
    for (const auto* ports : {&t.inputs, &t.outputs, &t.signals}) {
        for (const auto& p : *ports) {
            check_slot("port " + p.name, p.slot);
        }
    }
    if (!diag.empty()) {
        return diag;  // the op walk below relies on the length invariants
    }

    std::vector<int64_t> produced(t.num_slots, -1);
    std::vector<bool> written(t.num_slots, false);
    uint64_t r_needed = 0;
    bool bad_params = false;
    for_each_op(t, [&](const OpView& op) {
        const uint32_t np = t.p_offset[op.index + 1] - t.p_offset[op.index];
        if (np != info(op.op).num_params || (op.op == Opcode::MuxChain && op.arity < 3)) {
            fail("op " + std::to_string(op.index) + ": wrong static parameter count for " +
                 std::string(name(op.op)));
            bad_params = true;
        }
        r_needed += op.arity;
        const uint32_t s = t.s_coord[op.index];
        if (written[s]) {
            fail("op " + std::to_string(op.index) + ": slot " + std::to_string(s) + " written twice");
        }
        written[s] = true;
        produced[s] = op.layer;
    });
    if (bad_params) {
        return diag;
    }
    if (r_needed != t.r_coord.size()) {
        fail("len(R_coord) = " + std::to_string(t.r_coord.size()) + " but the ops read " +
             std::to_string(r_needed) + " operands");
        return diag;
    }
    for_each_op(t, [&](const OpView& op) {
        for (uint32_t o = 0; o < op.arity; ++o) {
            const uint32_t r = t.r_coord[op.r_begin + o];
            if (produced[r] >= static_cast<int64_t>(op.layer)) {
                fail("op " + std::to_string(op.index) + " in layer " + std::to_string(op.layer) + " reads slot " +
                     std::to_string(r) + " produced in layer " + std::to_string(produced[r]));
            }
        }
    });
    for (const auto& c : t.constants) {
        if (written[c.slot]) {
            fail("constant slot " + std::to_string(c.slot) + " is also an op output");
        }
    }
    for (const auto& r : t.registers) {
        if (written[r.current]) {
            fail("register slot " + std::to_string(r.current) + " is also an op output");
        }
    }
    for (const auto& p : t.inputs) {
        if (written[p.slot]) {
            fail("input slot " + std::to_string(p.slot) + " is also an op output");
        }
    }
    return diag;
}

std::vector<DecodedOp> decode_oim(const OimTensor& t) {
    std::vector<DecodedOp> out;
    out.reserve(t.num_ops());
    for_each_op(t, [&](const OpView& op) {
        std::vector<uint32_t> operands(t.r_coord.begin() + op.r_begin, t.r_coord.begin() + op.r_begin + op.arity);
        std::vector<uint32_t> params(t.p_params.begin() + t.p_offset[op.index],
                                     t.p_params.begin() + t.p_offset[op.index + 1]);
        out.emplace_back(op.layer, static_cast<uint32_t>(op.op), t.s_coord[op.index], std::move(operands),
                         std::move(params));
    });
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<OpLayout> op_layout(const OimTensor& t) {
    std::vector<OpLayout> out;
    out.reserve(t.num_ops());
    for_each_op(t, [&](const OpView& op) { out.push_back(OpLayout{op.op, op.layer, op.r_begin, op.arity}); });
    return out;
}

std::size_t array_bytes(const OimTensor& t) {
    auto bytes = [](std::size_t len, uint8_t bits) { return len * bits / 8; };
    std::size_t total = bytes(t.s_coord.size(), t.ranks[t.format == OimFormat::B ? 1 : 2].cbits) +
                        bytes(t.r_coord.size(), t.ranks[4].cbits);
    if (t.format == OimFormat::B) {
        total += bytes(t.i_payload.size(), t.ranks[0].pbits) + bytes(t.n_coord.size(), t.ranks[2].cbits);
    } else {
        total += bytes(t.n_payload.size(), t.ranks[1].pbits);
    }
    return total;
}

}  // namespace rtsim
