#include "rtsim/vcd.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <unordered_set>

#include "rtsim/error.hpp"

namespace rtsim {

std::string vcd_identifier(std::size_t n) {
    std::string s;
    do {
        s.push_back(static_cast<char>('!' + n % 94));
        n /= 94;
    } while (n-- > 0);
    return s;
}

VcdRecorder::VcdRecorder(std::string top, const std::vector<std::pair<std::string, unsigned>>& signals) {
    trace_.top = std::move(top);
    for (std::size_t k = 0; k < signals.size(); ++k) {
        trace_.signals.push_back(VcdSignal{signals[k].first, signals[k].second, vcd_identifier(k)});
    }
}

void VcdRecorder::sample(const std::vector<u128>& values) {
    if (samples_ == 0) {
        trace_.initial = values;
    } else {
        VcdFrame frame{samples_, {}};
        for (std::size_t k = 0; k < values.size(); ++k) {
            if (values[k] != last_[k]) {
                frame.changes.push_back(VcdChange{static_cast<uint32_t>(k), values[k]});
            }
        }
        if (!frame.changes.empty()) {
            trace_.frames.push_back(std::move(frame));
        }
    }
    last_ = values;
    ++samples_;
}

namespace {

std::vector<std::pair<std::string, unsigned>> probe_signals(const OimTensor& t, bool all_slots,
                                                           std::vector<uint32_t>& slots,
                                                           std::vector<bool>& pre_step) {
    std::vector<std::pair<std::string, unsigned>> out;
    std::vector<bool> covered(t.num_slots, false);
    std::unordered_set<uint32_t> reg_slots;
    for (const auto& r : t.registers) {
        reg_slots.insert(r.current);
    }
    auto add = [&](const std::string& name, uint32_t slot) {
        out.emplace_back(name, t.widths[slot]);
        slots.push_back(slot);
        pre_step.push_back(reg_slots.count(slot) != 0);
        covered[slot] = true;
    };
    for (const auto& p : t.inputs) {
        add(p.name, p.slot);
    }
    for (const auto& p : t.outputs) {
        add(p.name, p.slot);
    }
    const std::size_t named = all_slots ? t.signals.size() : std::min(t.signals.size(), t.registers.size());
    for (std::size_t k = 0; k < named; ++k) {
        add(t.signals[k].name, t.signals[k].slot);
    }
    if (all_slots) {
        for (uint32_t s = 0; s < t.num_slots; ++s) {
            if (!covered[s]) {
                add("_slot" + std::to_string(s), s);
            }
        }
    }
    return out;
}

}  // namespace

SimulationProbe::SimulationProbe(const OimTensor& t, bool all_slots)
    : recorder_(t.top, probe_signals(t, all_slots, slots_, pre_step_)) {
    frame_.resize(slots_.size());
}

void SimulationProbe::before_step(const SignalState& state) {
    for (std::size_t k = 0; k < slots_.size(); ++k) {
        if (pre_step_[k]) {
            frame_[k] = state.li[slots_[k]].value;
        }
    }
}

void SimulationProbe::after_step(const SignalState& state) {
    for (std::size_t k = 0; k < slots_.size(); ++k) {
        if (!pre_step_[k]) {
            frame_[k] = state.li[slots_[k]].value;
        }
    }
    recorder_.sample(frame_);
}

namespace {

void value_record(std::string& out, const VcdSignal& s, u128 value) {
    if (s.width == 1) {
        out += (value & 1) ? '1' : '0';
    } else {
        out += 'b';
        out += to_binary(value, s.width);
        out += ' ';
    }
    out += s.id;
    out += '\n';
}

}  // namespace

std::string render_vcd(const VcdTrace& trace) {
    std::string out;
    out += "$version rtsim $end\n";
    out += "$timescale 1 ns $end\n";
    out += "$scope module " + trace.top + " $end\n";
    for (const auto& s : trace.signals) {
        out += "$var wire " + std::to_string(s.width) + " " + s.id + " " + s.name + " $end\n";
    }
    out += "$upscope $end\n";
    out += "$enddefinitions $end\n";
    if (trace.initial.empty() && !trace.signals.empty()) {
        return out;  // nothing simulated
    }
    out += "#0\n$dumpvars\n";
    for (std::size_t k = 0; k < trace.signals.size(); ++k) {
        value_record(out, trace.signals[k], trace.initial[k]);
    }
    out += "$end\n";
    for (const auto& f : trace.frames) {
        out += "#" + std::to_string(f.time) + "\n";
        for (const auto& c : f.changes) {
            value_record(out, trace.signals[c.signal], c.value);
        }
    }
    return out;
}

void write_vcd(const VcdTrace& trace, const std::filesystem::path& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) {
        throw IoError("cannot write " + path.string());
    }
    f << render_vcd(trace);
    if (!f) {
        throw IoError("write failed: " + path.string());
    }
}

namespace {

class VcdChecker {
public:
    explicit VcdChecker(std::string_view text) {
        std::istringstream in{std::string(text)};
        std::string tok;
        while (in >> tok) {
            toks_.push_back(tok);
        }
    }

    std::vector<std::string> run() {
        header();
        if (problems_.empty()) {
            body();
        }
        return problems_;
    }

private:
    struct Var {
        unsigned width;
        std::string value;  // last recorded, normalized
    };

    bool more() const { return pos_ < toks_.size(); }
    const std::string& peek() const { return toks_[pos_]; }
    std::string next() { return more() ? toks_[pos_++] : std::string(); }

    void fail(const std::string& what) { problems_.push_back(what); }

    std::vector<std::string> until_end(const std::string& cmd) {
        std::vector<std::string> args;
        while (more() && peek() != "$end") {
            args.push_back(next());
        }
        if (!more()) {
            fail(cmd + " is not terminated by $end");
        } else {
            ++pos_;
        }
        return args;
    }

    void header() {
        bool timescale = false;
        std::vector<std::set<std::string>> scopes;
        while (more()) {
            const std::string cmd = next();
            if (cmd == "$date" || cmd == "$version" || cmd == "$comment") {
                until_end(cmd);
            } else if (cmd == "$timescale") {
                auto args = until_end(cmd);
                std::string joined;
                for (const auto& a : args) {
                    joined += a;
                }
                static const std::set<std::string> units{"s", "ms", "us", "ns", "ps", "fs"};
                std::size_t digits = 0;
                while (digits < joined.size() && std::isdigit(static_cast<unsigned char>(joined[digits]))) {
                    ++digits;
                }
                const std::string mag = joined.substr(0, digits);
                if ((mag != "1" && mag != "10" && mag != "100") || !units.count(joined.substr(digits))) {
                    fail("malformed $timescale '" + joined + "'");
                }
                timescale = true;
            } else if (cmd == "$scope") {
                auto args = until_end(cmd);
                if (args.size() != 2) {
                    fail("$scope needs a type and a name");
                }
                scopes.emplace_back();
            } else if (cmd == "$upscope") {
                until_end(cmd);
                if (scopes.empty()) {
                    fail("$upscope without an open $scope");
                } else {
                    scopes.pop_back();
                }
            } else if (cmd == "$var") {
                auto args = until_end(cmd);
                if (scopes.empty()) {
                    fail("$var outside any $scope");
                }
                if (args.size() != 4 && args.size() != 5) {
                    fail("$var needs type, size, identifier and reference");
                    continue;
                }
                unsigned width = 0;
                try {
                    width = static_cast<unsigned>(std::stoul(args[1]));
                } catch (const std::exception&) {
                }
                if (width == 0) {
                    fail("$var '" + args[3] + "' has bad size '" + args[1] + "'");
                }
                if (!vars_.emplace(args[2], Var{width, {}}).second) {
                    fail("identifier '" + args[2] + "' declared twice");
                }
                if (!scopes.empty() && !scopes.back().insert(args[3]).second) {
                    fail("reference '" + args[3] + "' declared twice in one scope");
                }
            } else if (cmd == "$enddefinitions") {
                until_end(cmd);
                if (!scopes.empty()) {
                    fail("$enddefinitions with " + std::to_string(scopes.size()) + " open scope(s)");
                }
                if (!timescale) {
                    fail("missing $timescale");
                }
                return;
            } else {
                fail("unexpected '" + cmd + "' in header");
                return;
            }
        }
        fail("missing $enddefinitions");
    }

    // normalized binary digits, no leading zeros
    static std::string normalize(const std::string& bits) {
        const auto p = bits.find_first_not_of('0');
        return p == std::string::npos ? "0" : bits.substr(p);
    }

    void change(const std::string& bits, const std::string& id, bool initial, std::set<std::string>& in_frame) {
        auto it = vars_.find(id);
        if (it == vars_.end()) {
            fail("value change for undeclared identifier '" + id + "'");
            return;
        }
        for (char c : bits) {
            if (std::string_view("01xzXZ").find(c) == std::string_view::npos) {
                fail("bad value digit '" + std::string(1, c) + "' for '" + id + "'");
                return;
            }
        }
        if (bits.size() > it->second.width) {
            fail("value for '" + id + "' wider than its " + std::to_string(it->second.width) + " bits");
        }
        if (!in_frame.insert(id).second) {
            fail("'" + id + "' changes twice at #" + std::to_string(time_));
        }
        const std::string v = normalize(bits);
        if (!initial && v == it->second.value) {
            fail("'" + id + "' recorded at #" + std::to_string(time_) + " without changing");
        }
        it->second.value = v;
        dumped_.insert(id);
    }

    bool value_token(bool initial, std::set<std::string>& in_frame) {
        const std::string tok = next();
        if (tok.empty()) {
            return false;
        }
        if (tok[0] == 'b' || tok[0] == 'B') {
            if (!more()) {
                fail("vector value without identifier");
                return false;
            }
            const std::string id = next();
            change(tok.substr(1), id, initial, in_frame);
            return true;
        }
        if (std::string_view("01xzXZ").find(tok[0]) != std::string_view::npos && tok.size() > 1) {
            change(tok.substr(0, 1), tok.substr(1), initial, in_frame);
            return true;
        }
        fail("unexpected '" + tok + "' in value section");
        return false;
    }

    void body() {
        bool have_time = false;
        bool dumpvars = false;
        std::set<std::string> in_frame;
        while (more()) {
            const std::string& tok = peek();
            if (tok[0] == '#') {
                ++pos_;
                uint64_t t = 0;
                try {
                    std::size_t used = 0;
                    t = std::stoull(tok.substr(1), &used);
                    if (used != tok.size() - 1) {
                        throw std::invalid_argument(tok);
                    }
                } catch (const std::exception&) {
                    fail("malformed timestamp '" + tok + "'");
                    return;
                }
                if (have_time && t <= time_) {
                    fail("timestamp #" + std::to_string(t) + " does not increase");
                }
                time_ = t;
                have_time = true;
                in_frame.clear();
            } else if (tok == "$dumpvars" || tok == "$dumpall" || tok == "$dumpon" || tok == "$dumpoff") {
                const std::string cmd = next();
                if (!have_time) {
                    fail(cmd + " before the first timestamp");
                }
                if (cmd == "$dumpvars") {
                    dumpvars = true;
                }
                while (more() && peek() != "$end") {
                    if (!value_token(true, in_frame)) {
                        return;
                    }
                }
                if (!more()) {
                    fail(cmd + " is not terminated by $end");
                    return;
                }
                ++pos_;
            } else if (tok == "$comment") {
                ++pos_;
                until_end("$comment");
            } else {
                if (!have_time) {
                    fail("value change before the first timestamp");
                    return;
                }
                if (!value_token(false, in_frame)) {
                    return;
                }
            }
        }
        if (dumpvars && dumped_.size() != vars_.size()) {
            fail("$dumpvars leaves " + std::to_string(vars_.size() - dumped_.size()) + " signal(s) without a value");
        }
    }

    std::vector<std::string> toks_;
    std::size_t pos_ = 0;
    std::map<std::string, Var> vars_;
    std::set<std::string> dumped_;
    uint64_t time_ = 0;
    std::vector<std::string> problems_;
};

}  // namespace

std::vector<std::string> check_vcd(std::string_view text) { return VcdChecker(text).run(); }

}  // namespace rtsim
