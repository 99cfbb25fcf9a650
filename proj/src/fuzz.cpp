#include "rtsim/fuzz.hpp"

#include <algorithm>
#include <optional>
#include <sstream>

namespace rtsim {

uint64_t Rng::below(uint64_t n) {
    if (n <= 1) {
        return 0;
    }
    const uint64_t limit = ~uint64_t{0} - (~uint64_t{0} % n);
    uint64_t x;
    do {
        x = engine_();
    } while (x >= limit);
    return x % n;
}

int64_t Rng::range(int64_t lo, int64_t hi) {
    return lo + static_cast<int64_t>(below(static_cast<uint64_t>(hi - lo) + 1));
}

double Rng::unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

u128 Rng::bits(unsigned width) {
    const u128 v = (static_cast<u128>(engine_()) << 64) | engine_();
    return v & width_mask(width);
}

uint64_t mix_seed(uint64_t seed, uint64_t stream) {
    // splitmix64 finalizer
    uint64_t z = seed + 0x9E3779B97F4A7C15ull * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

std::vector<u128> PokeStream::next() {
    std::vector<u128> out;
    out.reserve(widths_.size());
    for (unsigned w : widths_) {
        out.push_back(rng_.bits(w));
    }
    return out;
}

std::array<double, kNumOpcodes> FuzzSpec::default_weights() {
    std::array<double, kNumOpcodes> w{};
    w.fill(1.0);
    w[static_cast<unsigned>(Opcode::Copy)] = 0.0;
    w[static_cast<unsigned>(Opcode::MuxChain)] = 0.0;
    w[static_cast<unsigned>(Opcode::Mux)] = 3.0;
    return w;
}

namespace {

std::string type_text(unsigned w, bool s) { return std::string(s ? "SInt<" : "UInt<") + std::to_string(w) + ">"; }

struct Ex {
    std::string text;
    unsigned width = 1;
    bool sgn = false;
    unsigned depth = 0;
    unsigned ops = 0;
};

struct Val {
    std::string name;
    unsigned width;
    bool sgn;
    unsigned depth;
    bool used = false;
    bool exportable = true;  // op results that become outputs when unused
};

class CircuitGen {
public:
    explicit CircuitGen(const FuzzSpec& spec) : spec_(spec), rng_(mix_seed(spec.seed, 0x73747275)) {}

    std::string run() {
        const unsigned lo = std::max(1u, spec_.min_nodes);
        const unsigned hi = std::max(lo, spec_.max_nodes);
        const auto target = static_cast<unsigned>(rng_.range(lo, hi));
        const auto num_regs = static_cast<unsigned>(spec_.register_fraction * target);
        max_w_ = std::clamp(spec_.max_width, 1u, 64u);
        min_w_ = std::clamp(spec_.min_width, 1u, max_w_);

        for (unsigned i = 0; i < spec_.num_inputs; ++i) {
            const unsigned w = draw_width();
            const bool s = rng_.chance(0.3);
            ports_.push_back("    input in" + std::to_string(i) + " : " + type_text(w, s));
            add_val("in" + std::to_string(i), w, s, 0, false);
        }
        bool any_reset = false;
        for (unsigned i = 0; i < num_regs; ++i) {
            const unsigned w = draw_width();
            const bool s = rng_.chance(0.3);
            std::string name = "r" + std::to_string(i);
            std::string line = "    reg " + name + " : " + type_text(w, s) + ", clock";
            if (rng_.chance(0.3)) {
                any_reset = true;
                line += " with :\n      reset => (reset, " + literal_text(w, s) + ")";
            }
            body_.push_back(line);
            regs_.push_back(static_cast<uint32_t>(vals_.size()));
            add_val(name, w, s, 0, false);
        }
        if (num_regs > 0) {
            ports_.insert(ports_.begin(), "    input clock : Clock");
            if (any_reset) {
                ports_.insert(ports_.begin() + 1, "    input reset : UInt<1>");
                add_val("reset", 1, false, 0, false);
            }
        }

        const unsigned reserve = 2 * num_regs;
        budget_ = target;
        while (budget_ > reserve) {
            emit_node(budget_ - reserve);
        }
        for (uint32_t r : regs_) {
            connect_register(r);
        }
        while (budget_ > 0) {
            emit_node(budget_);
        }
        for (auto& c : deferred_) {
            body_.push_back(std::move(c));
        }
        unsigned k = 0;
        for (const auto& v : vals_) {
            if (v.exportable && !v.used) {
                const std::string o = "o" + std::to_string(k++);
                ports_.push_back("    output " + o + " : " + type_text(v.width, v.sgn));
                body_.push_back("    " + o + " <= " + v.name);
            }
        }

        std::ostringstream out;
        out << "FIRRTL version 1.1.0\ncircuit Fuzz :\n  module Fuzz :\n";
        for (const auto& p : ports_) {
            out << p << "\n";
        }
        for (const auto& b : body_) {
            out << b << "\n";
        }
        return out.str();
    }

private:
    unsigned draw_width() {
        if (rng_.chance(0.5)) {
            return static_cast<unsigned>(rng_.range(min_w_, std::max(min_w_, std::min(8u, max_w_))));
        }
        return static_cast<unsigned>(rng_.range(min_w_, max_w_));
    }

    void add_val(std::string name, unsigned w, bool s, unsigned depth, bool exportable) {
        vals_.push_back(Val{std::move(name), w, s, depth, false, exportable});
        (s ? signed_ : unsigned_).push_back(static_cast<uint32_t>(vals_.size() - 1));
    }

    std::string literal_text(unsigned w, bool s) {
        const u128 raw = rng_.bits(w);
        const std::string width = rng_.chance(0.2) ? "" : "<" + std::to_string(w) + ">";
        if (s) {
            // an unsized literal would shrink to its minimal width, so always size SInt
            return "SInt<" + std::to_string(w) + ">(" + to_decimal(BitVec{raw, static_cast<uint8_t>(w), true}) + ")";
        }
        if (rng_.chance(0.25)) {
            std::string hex;
            u128 v = raw;
            do {
                hex.insert(hex.begin(), "0123456789abcdef"[static_cast<unsigned>(v & 15)]);
                v >>= 4;
            } while (v != 0);
            return "UInt" + width + "(\"h" + hex + "\")";
        }
        return "UInt" + width + "(" + to_decimal(raw) + ")";
    }

    // A random operand. `sign` fixes signedness; widths in [1, max_w];
    // depth strictly below max_depth.
    std::optional<Ex> operand(std::optional<bool> sign, unsigned max_w, unsigned max_depth, bool allow_literal = true,
                              std::optional<unsigned> exact_w = std::nullopt) {
        if (max_w == 0 || max_depth == 0) {
            return std::nullopt;
        }
        if (allow_literal && rng_.chance(spec_.literal_probability)) {
            const bool s = sign ? *sign : rng_.chance(0.3);
            const unsigned w = exact_w ? *exact_w : std::min(max_w, draw_width());
            return make_literal(w, s);
        }
        const bool s = sign ? *sign : rng_.chance(0.3);
        const auto& pool = s ? signed_ : unsigned_;
        for (int attempt = 0; attempt < 24 && !pool.empty(); ++attempt) {
            uint32_t idx;
            if (rng_.chance(0.5)) {
                const std::size_t recent = std::min<std::size_t>(pool.size(), 24);
                idx = pool[pool.size() - 1 - rng_.below(recent)];
            } else {
                idx = pool[rng_.below(pool.size())];
            }
            Val& v = vals_[idx];
            if (v.depth < max_depth && v.width <= max_w && (!exact_w || v.width == *exact_w)) {
                v.used = true;
                return Ex{v.name, v.width, v.sgn, v.depth, 0};
            }
        }
        if (allow_literal) {
            return make_literal(exact_w ? *exact_w : std::min(max_w, draw_width()), s);
        }
        return std::nullopt;
    }

    Ex make_literal(unsigned w, bool s) {
        std::string text = literal_text(w, s);
        unsigned width = w;
        if (!s && text.rfind("UInt(", 0) == 0) {
            // unsized: recover the minimal width the parser will assign
            const auto open = text.find('(');
            std::string body = text.substr(open + 1, text.size() - open - 2);
            u128 v = body[0] == '"' ? parse_u128("0x" + body.substr(2, body.size() - 3)) : parse_u128(body);
            width = std::max(1u, bit_length(v));
        }
        return Ex{std::move(text), width, s, 0, 0};
    }

    Opcode draw_opcode() {
        double total = 0;
        for (double w : spec_.opcode_weights) {
            total += w;
        }
        double x = rng_.unit() * total;
        for (unsigned i = 0; i < kNumOpcodes; ++i) {
            x -= spec_.opcode_weights[i];
            if (x < 0 && spec_.opcode_weights[i] > 0) {
                return static_cast<Opcode>(i);
            }
        }
        return Opcode::Xor;
    }

    static Ex prim(std::string_view op, std::initializer_list<const Ex*> args, std::initializer_list<unsigned> params,
                   unsigned width, bool sgn) {
        Ex e;
        e.text = std::string(op) + "(";
        bool first = true;
        unsigned depth = 0;
        unsigned ops = 1;
        for (const Ex* a : args) {
            e.text += (first ? "" : ", ") + a->text;
            first = false;
            depth = std::max(depth, a->depth);
            ops += a->ops;
        }
        for (unsigned p : params) {
            e.text += (first ? "" : ", ") + std::to_string(p);
            first = false;
        }
        e.text += ")";
        e.width = width;
        e.sgn = sgn;
        e.depth = depth + 1;
        e.ops = ops;
        return e;
    }

    // A UInt<1> selector, possibly reduced from a wider value via orr.
    std::optional<Ex> selector(unsigned max_depth, unsigned ops_left) {
        if (auto s = operand(false, 1, max_depth, true, 1u)) {
            return s;
        }
        if (ops_left >= 2 && max_depth >= 2) {
            if (auto x = operand(std::nullopt, max_w_, max_depth - 1, false)) {
                return prim("orr", {&*x}, {}, 1, false);
            }
        }
        return std::nullopt;
    }

    // One op of opcode `op`, all operand trees below max_depth. nullopt when
    // the draw does not satisfy the type rules.
    std::optional<Ex> make_op(Opcode op, unsigned ops_left) {
        const unsigned D = spec_.max_depth;
        const unsigned W = max_w_;
        const std::string_view nm = name(op);
        if (is_reducible(op)) {
            auto a = operand(std::nullopt, W, D);
            if (!a) {
                return std::nullopt;
            }
            const unsigned wa = a->width;
            std::optional<Ex> b;
            switch (op) {
            case Opcode::Add:
            case Opcode::Sub:
                if (wa >= W) {
                    return std::nullopt;
                }
                b = operand(a->sgn, W - 1, D);
                if (!b) return std::nullopt;
                return prim(nm, {&*a, &*b}, {}, std::max(wa, b->width) + 1, a->sgn);
            case Opcode::Mul:
            case Opcode::Cat:
                if (wa >= W) {
                    return std::nullopt;
                }
                b = operand(a->sgn, W - wa, D);
                if (!b) return std::nullopt;
                return prim(nm, {&*a, &*b}, {}, wa + b->width, op == Opcode::Mul && a->sgn);
            case Opcode::Div:
                if (a->sgn && wa >= W) {
                    return std::nullopt;
                }
                b = operand(a->sgn, W, D);
                if (!b) return std::nullopt;
                return prim(nm, {&*a, &*b}, {}, a->sgn ? wa + 1 : wa, a->sgn);
            case Opcode::Rem:
                b = operand(a->sgn, W, D);
                if (!b) return std::nullopt;
                return prim(nm, {&*a, &*b}, {}, std::min(wa, b->width), a->sgn);
            case Opcode::Lt:
            case Opcode::Leq:
            case Opcode::Gt:
            case Opcode::Geq:
            case Opcode::Eq:
            case Opcode::Neq:
                b = operand(a->sgn, W, D);
                if (!b) return std::nullopt;
                return prim(nm, {&*a, &*b}, {}, 1, false);
            case Opcode::And:
            case Opcode::Or:
            case Opcode::Xor:
                b = operand(a->sgn, W, D);
                if (!b) return std::nullopt;
                return prim(nm, {&*a, &*b}, {}, std::max(wa, b->width), false);
            case Opcode::Dshl: {
                unsigned wb = 0;
                while (wb < 7 && wa + (1u << (wb + 1)) - 1 <= W) {
                    ++wb;
                }
                if (wb == 0) {
                    return std::nullopt;
                }
                b = operand(false, wb, D);
                if (!b) return std::nullopt;
                return prim(nm, {&*a, &*b}, {}, wa + (1u << b->width) - 1, a->sgn);
            }
            case Opcode::Dshr:
                b = operand(false, 8, D);
                if (!b) return std::nullopt;
                return prim(nm, {&*a, &*b}, {}, wa, a->sgn);
            default:
                return std::nullopt;
            }
        }
        if (op == Opcode::Mux) {
            if (ops_left < 1) {
                return std::nullopt;
            }
            auto sel = selector(D, ops_left);
            if (!sel || sel->ops + 1 > ops_left) {
                return std::nullopt;
            }
            std::optional<Ex> low;
            if (last_mux_ && rng_.chance(spec_.chain_bias)) {
                Val& v = vals_[*last_mux_];
                if (v.depth < D && !v.used) {
                    v.used = true;
                    low = Ex{v.name, v.width, v.sgn, v.depth, 0};
                }
            }
            auto high = operand(low ? std::optional<bool>(low->sgn) : std::nullopt, W, D);
            if (!high) {
                return std::nullopt;
            }
            if (!low) {
                low = operand(high->sgn, W, D);
                if (!low) return std::nullopt;
            }
            return prim("mux", {&*sel, &*high, &*low}, {}, std::max(high->width, low->width), high->sgn);
        }
        auto a = operand(std::nullopt, W, D, rng_.chance(0.3));
        if (!a) {
            return std::nullopt;
        }
        const unsigned wa = a->width;
        switch (op) {
        case Opcode::Pad: {
            const auto n = static_cast<unsigned>(rng_.range(1, W));
            return prim(nm, {&*a}, {n}, std::max(wa, n), a->sgn);
        }
        case Opcode::AsUInt:
            return prim(nm, {&*a}, {}, wa, false);
        case Opcode::AsSInt:
            return prim(nm, {&*a}, {}, wa, true);
        case Opcode::Shl: {
            if (wa >= W) return std::nullopt;
            const auto n = static_cast<unsigned>(rng_.range(0, std::min(W - wa, 12u)));
            return prim(nm, {&*a}, {n}, wa + n, a->sgn);
        }
        case Opcode::Shr: {
            const auto n = static_cast<unsigned>(rng_.range(0, wa + 1));
            return prim(nm, {&*a}, {n}, n >= wa ? 1 : wa - n, a->sgn);
        }
        case Opcode::Cvt:
            if (!a->sgn && wa >= W) return std::nullopt;
            return prim(nm, {&*a}, {}, a->sgn ? wa : wa + 1, true);
        case Opcode::Neg:
            if (wa >= W) return std::nullopt;
            return prim(nm, {&*a}, {}, wa + 1, true);
        case Opcode::Not:
            return prim(nm, {&*a}, {}, wa, false);
        case Opcode::Andr:
        case Opcode::Orr:
        case Opcode::Xorr:
            return prim(nm, {&*a}, {}, 1, false);
        case Opcode::Bits: {
            const auto hi = static_cast<unsigned>(rng_.range(0, wa - 1));
            const auto lo = static_cast<unsigned>(rng_.range(0, hi));
            return prim(nm, {&*a}, {hi, lo}, hi - lo + 1, false);
        }
        case Opcode::Head: {
            const auto n = static_cast<unsigned>(rng_.range(1, wa));
            return prim(nm, {&*a}, {n}, n, false);
        }
        case Opcode::Tail: {
            const auto n = static_cast<unsigned>(rng_.range(0, wa - 1));
            return prim(nm, {&*a}, {n}, wa - n, false);
        }
        default:
            return std::nullopt;
        }
    }

    void emit_node(unsigned ops_left) {
        std::optional<Ex> e;
        for (int attempt = 0; attempt < 8 && !e; ++attempt) {
            const Opcode op = draw_opcode();
            e = make_op(op, ops_left);
            if (e && e->ops > ops_left) {
                e.reset();
            }
            if (e && op == Opcode::Mux) {
                is_mux_ = true;
            }
        }
        if (!e) {
            auto a = operand(std::nullopt, max_w_, spec_.max_depth, false);
            if (!a) {
                a = make_literal(draw_width(), false);
            }
            e = prim("not", {&*a}, {}, a->width, false);
            is_mux_ = false;
        }
        budget_ -= e->ops;
        const double form = rng_.unit();
        const uint32_t before = static_cast<uint32_t>(vals_.size());
        if (form < 0.05) {
            const std::string w = "w" + std::to_string(wire_count_++);
            body_.push_back("    wire " + w + " : " + type_text(e->width, e->sgn));
            deferred_.push_back("    " + w + " <= " + e->text);
            add_val(w, e->width, e->sgn, e->depth, true);
        } else {
            const std::string n = "n" + std::to_string(node_count_++);
            body_.push_back("    node " + n + " = " + e->text);
            add_val(n, e->width, e->sgn, e->depth, true);
            if (form > 0.95) {
                // alias: the node itself stays referenced, the alias may be exported
                const std::string a = "a" + std::to_string(alias_count_++);
                body_.push_back("    node " + a + " = " + n);
                vals_[before].used = true;
                add_val(a, e->width, e->sgn, e->depth, true);
            }
        }
        if (is_mux_) {
            last_mux_ = static_cast<uint32_t>(vals_.size() - 1);
        }
        is_mux_ = false;
    }

    void connect_register(uint32_t r) {
        const Val reg = vals_[r];
        const unsigned D = spec_.max_depth;
        // exact type first, then narrower (implicit pad), then truncate a wider value
        if (auto e = operand(reg.sgn, reg.width, D, false, reg.width)) {
            body_.push_back("    " + reg.name + " <= " + e->text);
            return;
        }
        if (auto e = operand(reg.sgn, reg.width, D - 1, false)) {
            body_.push_back("    " + reg.name + " <= " + e->text);
            budget_ -= e->width < reg.width ? 1 : 0;  // the implicit pad
            return;
        }
        if (auto e = operand(reg.sgn, max_w_, D - 1, false)) {
            if (e->width > reg.width) {
                Ex t = prim("bits", {&*e}, {reg.width - 1, 0}, reg.width, false);
                if (reg.sgn) {
                    if (e->depth + 2 > D) {
                        body_.push_back("    " + reg.name + " <= " + literal_text(reg.width, true));
                        return;
                    }
                    t = prim("asSInt", {&t}, {}, reg.width, true);
                }
                budget_ -= t.ops;
                body_.push_back("    " + reg.name + " <= " + t.text);
                return;
            }
            body_.push_back("    " + reg.name + " <= " + e->text);
            budget_ -= e->width < reg.width ? 1 : 0;
            return;
        }
        body_.push_back("    " + reg.name + " <= " + literal_text(reg.width, reg.sgn));
    }

    const FuzzSpec& spec_;
    Rng rng_;
    unsigned min_w_ = 1;
    unsigned max_w_ = 64;
    unsigned budget_ = 0;
    std::vector<Val> vals_;
    std::vector<uint32_t> signed_;
    std::vector<uint32_t> unsigned_;
    std::vector<uint32_t> regs_;
    std::vector<std::string> ports_;
    std::vector<std::string> body_;
    std::vector<std::string> deferred_;
    std::optional<uint32_t> last_mux_;
    bool is_mux_ = false;
    unsigned node_count_ = 0;
    unsigned wire_count_ = 0;
    unsigned alias_count_ = 0;
};

}  // namespace

std::string random_circuit(const FuzzSpec& spec) { return CircuitGen(spec).run(); }

std::string deep_circuit(const DeepSpec& spec) {
    Rng rng(mix_seed(spec.seed, 0x64656570));
    const std::string t = type_text(spec.width, false);
    std::ostringstream ports;
    std::ostringstream body;
    ports << "    input clock : Clock\n";
    std::vector<std::vector<std::string>> levels(1);
    for (unsigned i = 0; i < spec.num_inputs; ++i) {
        ports << "    input in" << i << " : " << t << "\n";
        levels[0].push_back("in" + std::to_string(i));
    }
    const unsigned num_regs = std::max(1u, spec.num_inputs / 2);
    for (unsigned i = 0; i < num_regs; ++i) {
        body << "    reg r" << i << " : " << t << ", clock\n";
        levels[0].push_back("r" + std::to_string(i));
    }
    std::vector<std::string> all;
    std::vector<bool> used;
    std::vector<std::string> outputs;
    auto pick_level = [&](std::size_t level) -> const std::string& {
        const auto& pool = levels[level];
        return pool[rng.below(pool.size())];
    };
    static constexpr const char* kOps[] = {"xor", "xor", "xor", "and", "or"};
    std::vector<std::pair<std::string, unsigned>> produced;  // name, level
    for (unsigned level = 1; level <= spec.depth; ++level) {
        levels.emplace_back();
        for (unsigned k = 0; k < spec.nodes_per_layer; ++k) {
            const std::string& a = pick_level(level - 1);
            // skip edges reach back into the lower half, so they span many layers
            const std::string& b = level >= 2 && rng.chance(spec.skip_probability)
                                       ? pick_level(rng.below(std::max(1u, level / 2)))
                                       : pick_level(level - 1);
            const std::string n = "n" + std::to_string(level) + "_" + std::to_string(k);
            body << "    node " << n << " = " << kOps[rng.below(5)] << "(" << a << ", " << b << ")\n";
            levels[level].push_back(n);
        }
    }
    for (std::size_t level = 1; level < levels.size(); ++level) {
        for (const auto& n : levels[level]) {
            if (level == levels.size() - 1 || rng.chance(spec.output_fraction)) {
                outputs.push_back(n);
            }
        }
    }
    for (unsigned i = 0; i < num_regs; ++i) {
        body << "    r" << i << " <= " << pick_level(1 + rng.below(spec.depth)) << "\n";
    }
    for (std::size_t k = 0; k < outputs.size(); ++k) {
        ports << "    output o" << k << " : " << t << "\n";
        body << "    o" << k << " <= " << outputs[k] << "\n";
    }
    return "circuit Deep :\n  module Deep :\n" + ports.str() + body.str();
}

std::string priority_mux_circuit(unsigned k, unsigned width) {
    const std::string t = type_text(width, false);
    std::ostringstream ports;
    std::ostringstream body;
    for (unsigned i = 0; i < k; ++i) {
        ports << "    input s" << i << " : UInt<1>\n    input v" << i << " : " << t << "\n";
    }
    ports << "    input d : " << t << "\n    output out : " << t << "\n";
    std::string low = "d";
    for (unsigned i = k; i-- > 0;) {
        const std::string m = "m" + std::to_string(i);
        body << "    node " << m << " = mux(s" << i << ", v" << i << ", " << low << ")\n";
        low = m;
    }
    body << "    out <= " << low << "\n";
    return "circuit Priority :\n  module Priority :\n" + ports.str() + body.str();
}

}  // namespace rtsim
