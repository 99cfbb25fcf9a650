#include <fstream>
#include <sstream>

#include <json.hpp>

#include "rtsim/error.hpp"
#include "rtsim/oim.hpp"

namespace rtsim {

using nlohmann::json;

namespace {

json ports_json(const std::vector<OimPort>& ports) {
    json a = json::array();
    for (const auto& p : ports) {
        a.push_back({{"name", p.name}, {"slot", p.slot}});
    }
    return a;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) {
        throw IoError("cannot write " + path.string());
    }
    f << text;
    if (!f) {
        throw IoError("error writing " + path.string());
    }
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) {
        throw IoError("cannot read " + path.string());
    }
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

const json& field(const json& obj, const std::string& key, const std::string& path) {
    if (!obj.is_object() || !obj.contains(key)) {
        throw SchemaError(path + key, "missing");
    }
    return obj.at(key);
}

uint64_t as_uint(const json& v, const std::string& path, uint64_t max = 0xFFFFFFFFull) {
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<int64_t>() >= 0)) {
        throw SchemaError(path, "expected a non-negative integer");
    }
    const uint64_t x = v.get<uint64_t>();
    if (x > max) {
        throw SchemaError(path, "value " + std::to_string(x) + " out of range");
    }
    return x;
}

std::vector<uint32_t> uint_array(const json& obj, const std::string& key, const std::string& prefix) {
    const json& a = field(obj, key, prefix);
    if (!a.is_array()) {
        throw SchemaError(prefix + key, "expected an array");
    }
    std::vector<uint32_t> out;
    out.reserve(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        out.push_back(static_cast<uint32_t>(as_uint(a[i], prefix + key + "[" + std::to_string(i) + "]")));
    }
    return out;
}

std::string as_string(const json& v, const std::string& path) {
    if (!v.is_string()) {
        throw SchemaError(path, "expected a string");
    }
    return v.get<std::string>();
}

u128 as_u128(const json& v, const std::string& path) {
    try {
        return parse_u128(as_string(v, path));
    } catch (const std::invalid_argument& e) {
        throw SchemaError(path, e.what());
    }
}

std::vector<OimPort> parse_ports(const json& a, const std::string& path) {
    if (!a.is_array()) {
        throw SchemaError(path, "expected an array");
    }
    std::vector<OimPort> out;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const std::string p = path + "[" + std::to_string(i) + "].";
        out.push_back(OimPort{as_string(field(a[i], "name", p), p + "name"),
                              static_cast<uint32_t>(as_uint(field(a[i], "slot", p), p + "slot"))});
    }
    return out;
}

json parse_json(const std::string& text, const std::string& file) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw SchemaError(file, e.what());
    }
}

}  // namespace

std::string meta_json(const OimTensor& t) {
    json m;
    m["schema_version"] = kOimSchemaVersion;
    m["format"] = std::string(to_string(t.format));
    m["top"] = t.top;
    m["num_layers"] = t.num_layers;
    m["num_slots"] = t.num_slots;
    m["num_ops"] = t.num_ops();
    json ranks = json::array();
    for (const auto& r : t.ranks) {
        ranks.push_back({{"name", r.name}, {"compressed", r.compressed}, {"cbits", r.cbits}, {"pbits", r.pbits}});
    }
    m["ranks"] = ranks;
    m["widths"] = t.widths;
    m["signed"] = t.signedness;
    json regs = json::array();
    for (const auto& r : t.registers) {
        json j = {{"current", r.current}, {"next", r.next}, {"init", to_decimal(r.init)}};
        j["reset"] = r.reset ? json(*r.reset) : json(nullptr);
        regs.push_back(j);
    }
    m["registers"] = regs;
    json consts = json::array();
    for (const auto& c : t.constants) {
        consts.push_back({{"slot", c.slot}, {"value", to_decimal(c.value)}});
    }
    m["constants"] = consts;
    m["io"] = {{"inputs", ports_json(t.inputs)}, {"outputs", ports_json(t.outputs)}};
    m["signals"] = ports_json(t.signals);
    json opcodes = json::array();
    for (const auto& op : kOpcodeTable) {
        opcodes.push_back(std::string(op.name));
    }
    m["opcodes"] = opcodes;
    return m.dump() + "\n";
}

std::string arrays_json(const OimTensor& t) {
    json a;
    if (t.format == OimFormat::B) {
        a["I_payload"] = t.i_payload;
        a["N_coord"] = t.n_coord;
    } else {
        a["N_payload"] = t.n_payload;
    }
    a["S_coord"] = t.s_coord;
    a["R_coord"] = t.r_coord;
    a["P_offset"] = t.p_offset;
    a["P_params"] = t.p_params;
    return a.dump() + "\n";
}

void serialize_oim(const OimTensor& t, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw IoError("cannot create " + dir.string() + ": " + ec.message());
    }
    write_file(dir / "meta.json", meta_json(t));
    write_file(dir / "oim.json", arrays_json(t));
}

OimTensor parse_oim(const std::string& meta_text, const std::string& arrays_text) {
    const json m = parse_json(meta_text, "meta.json");
    const json a = parse_json(arrays_text, "oim.json");
    if (!m.is_object()) {
        throw SchemaError("meta.json", "expected an object");
    }
    if (!a.is_object()) {
        throw SchemaError("oim.json", "expected an object");
    }
    const json& version = field(m, "schema_version", "");
    if (!version.is_number_integer()) {
        throw SchemaError("schema_version", "expected an integer");
    }
    if (version.get<int64_t>() != kOimSchemaVersion) {
        throw VersionError("unsupported OIM schema version " + version.dump() + " (expected " +
                           std::to_string(kOimSchemaVersion) + ")");
    }

    OimTensor t;
    const std::string format = as_string(field(m, "format", ""), "format");
    if (format == "B") {
        t.format = OimFormat::B;
    } else if (format == "C") {
        t.format = OimFormat::C;
    } else {
        throw SchemaError("format", "expected \"B\" or \"C\"");
    }
    t.top = as_string(field(m, "top", ""), "top");
    t.num_layers = static_cast<uint32_t>(as_uint(field(m, "num_layers", ""), "num_layers"));
    t.num_slots = static_cast<uint32_t>(as_uint(field(m, "num_slots", ""), "num_slots"));

    const json& opcodes = field(m, "opcodes", "");
    if (!opcodes.is_array() || opcodes.size() != kNumOpcodes) {
        throw SchemaError("opcodes", "expected " + std::to_string(kNumOpcodes) + " opcode names");
    }
    for (unsigned i = 0; i < kNumOpcodes; ++i) {
        if (as_string(opcodes[i], "opcodes") != kOpcodeTable[i].name) {
            throw SchemaError("opcodes[" + std::to_string(i) + "]", "opcode table differs from this build");
        }
    }

    const json& ranks = field(m, "ranks", "");
    if (!ranks.is_array() || ranks.size() != 5) {
        throw SchemaError("ranks", "expected 5 rank descriptors");
    }
    for (std::size_t i = 0; i < ranks.size(); ++i) {
        const std::string p = "ranks[" + std::to_string(i) + "].";
        RankDescriptor r;
        r.name = as_string(field(ranks[i], "name", p), p + "name");
        const json& c = field(ranks[i], "compressed", p);
        if (!c.is_boolean()) {
            throw SchemaError(p + "compressed", "expected a boolean");
        }
        r.compressed = c.get<bool>();
        r.cbits = static_cast<uint8_t>(as_uint(field(ranks[i], "cbits", p), p + "cbits", 64));
        r.pbits = static_cast<uint8_t>(as_uint(field(ranks[i], "pbits", p), p + "pbits", 64));
        if (r.compressed != (r.cbits > 0)) {
            throw SchemaError(p + "cbits", "compressed ranks need cbits > 0, uncompressed ranks cbits = 0");
        }
        t.ranks.push_back(r);
    }

    for (const auto& [key, out] : {std::pair{"widths", &t.widths}, std::pair{"signed", &t.signedness}}) {
        for (uint32_t v : uint_array(m, key, "")) {
            if (v > 255) {
                throw SchemaError(key, "entry out of range");
            }
            out->push_back(static_cast<uint8_t>(v));
        }
    }

    const json& regs = field(m, "registers", "");
    if (!regs.is_array()) {
        throw SchemaError("registers", "expected an array");
    }
    for (std::size_t i = 0; i < regs.size(); ++i) {
        const std::string p = "registers[" + std::to_string(i) + "].";
        OimRegister r;
        r.current = static_cast<uint32_t>(as_uint(field(regs[i], "current", p), p + "current"));
        r.next = static_cast<uint32_t>(as_uint(field(regs[i], "next", p), p + "next"));
        const json& reset = field(regs[i], "reset", p);
        if (!reset.is_null()) {
            r.reset = static_cast<uint32_t>(as_uint(reset, p + "reset"));
        }
        r.init = as_u128(field(regs[i], "init", p), p + "init");
        t.registers.push_back(r);
    }
    const json& consts = field(m, "constants", "");
    if (!consts.is_array()) {
        throw SchemaError("constants", "expected an array");
    }
    for (std::size_t i = 0; i < consts.size(); ++i) {
        const std::string p = "constants[" + std::to_string(i) + "].";
        t.constants.push_back(OimConstant{static_cast<uint32_t>(as_uint(field(consts[i], "slot", p), p + "slot")),
                                          as_u128(field(consts[i], "value", p), p + "value")});
    }
    const json& io = field(m, "io", "");
    t.inputs = parse_ports(field(io, "inputs", "io."), "io.inputs");
    t.outputs = parse_ports(field(io, "outputs", "io."), "io.outputs");
    t.signals = parse_ports(field(m, "signals", ""), "signals");

    if (t.format == OimFormat::B) {
        t.i_payload = uint_array(a, "I_payload", "");
        t.n_coord = uint_array(a, "N_coord", "");
    } else {
        t.n_payload = uint_array(a, "N_payload", "");
    }
    t.s_coord = uint_array(a, "S_coord", "");
    t.r_coord = uint_array(a, "R_coord", "");
    t.p_offset = uint_array(a, "P_offset", "");
    t.p_params = uint_array(a, "P_params", "");

    const uint64_t num_ops = as_uint(field(m, "num_ops", ""), "num_ops");
    if (num_ops != t.num_ops()) {
        throw SchemaError("num_ops", "meta.json says " + std::to_string(num_ops) + " but S_coord has " +
                                         std::to_string(t.num_ops()));
    }
    const auto diag = validate_oim(t);
    if (!diag.empty()) {
        throw SchemaError("oim.json", diag.front());
    }
    return t;
}

OimTensor load_oim(const std::filesystem::path& dir) {
    return parse_oim(read_file(dir / "meta.json"), read_file(dir / "oim.json"));
}

}  // namespace rtsim
