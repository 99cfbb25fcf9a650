#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "rtsim/error.hpp"
#include "rtsim/fuzz.hpp"
#include "rtsim/oim.hpp"
#include "rtsim/toolchain.hpp"

using namespace rtsim;
namespace fs = std::filesystem;

namespace {

const char* kSharedMul =
    "circuit SharedMul :\n  module SharedMul :\n    input a : UInt<4>\n    input b : UInt<4>\n    input c : UInt<4>\n"
    "    output y : UInt<8>\n    output z : UInt<8>\n    y <= mul(a, c)\n    z <= mul(b, c)\n";

CompileOptions with_format(OimFormat f) {
    CompileOptions o;
    o.format = f;
    return o;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

fs::path scratch_dir(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("rtsim_test_" + name);
    fs::remove_all(p);
    return p;
}

uint32_t sum(const std::vector<uint32_t>& v) { return std::accumulate(v.begin(), v.end(), 0u); }

}  // namespace

TEST_CASE("shared-operand products in Format B") {
    const OimTensor t = compile_firrtl(kSharedMul).oim;
    CHECK(t.format == OimFormat::B);
    CHECK(t.num_layers == 1);
    CHECK(t.i_payload == std::vector<uint32_t>{2});
    CHECK(t.s_coord.size() == 2);
    CHECK(t.n_coord.size() == 2);
    for (uint32_t n : t.n_coord) {
        CHECK(static_cast<Opcode>(n) == Opcode::Mul);
    }
    CHECK(t.r_coord.size() == 4);
    CHECK(validate_oim(t).empty());
}

TEST_CASE("shared-operand products in Format C") {
    const OimTensor t = compile_firrtl(kSharedMul, with_format(OimFormat::C)).oim;
    CHECK(t.n_payload.size() == kNumOpcodes);
    CHECK(t.n_payload[static_cast<unsigned>(Opcode::Mul)] == 2);
    CHECK(sum(t.n_payload) == 2);
    CHECK(t.n_coord.empty());
    CHECK(t.i_payload.empty());
}

TEST_CASE("straight-through ports give an empty tensor") {
    for (OimFormat f : {OimFormat::B, OimFormat::C}) {
        const OimTensor t = compile_firrtl(
                                "circuit T :\n  module T :\n    input a : UInt<4>\n    output y : UInt<4>\n"
                                "    node n = a\n    y <= n\n",
                                with_format(f))
                                .oim;
        CHECK(t.num_ops() == 0);
        CHECK(t.num_layers == 0);
        CHECK(t.s_coord.empty());
        CHECK(t.r_coord.empty());
        CHECK(t.i_payload.empty());
        CHECK(t.n_coord.empty());
        CHECK(t.p_params.empty());
        CHECK(validate_oim(t).empty());
    }
}

TEST_CASE("closed forms and B/C decode on generated designs") {
    for (uint64_t seed = 1; seed <= 60; ++seed) {
        FuzzSpec spec;
        spec.seed = seed;
        spec.min_nodes = spec.max_nodes = 50;
        const CompiledDesign d = compile_firrtl(random_circuit(spec));
        const OimTensor& b = d.oim;
        const OimTensor c = relower(d, OimFormat::C);
        CHECK(b.s_coord.size() == sum(b.i_payload));
        CHECK(b.n_coord.size() == b.s_coord.size());
        std::size_t arity_sum = 0;
        for (std::size_t k = 0; k < b.num_ops(); ++k) {
            const auto op = static_cast<Opcode>(b.n_coord[k]);
            const std::span<const uint32_t> params(b.p_params.data() + b.p_offset[k], b.p_offset[k + 1] - b.p_offset[k]);
            arity_sum += arity(op, params);
        }
        CHECK(b.r_coord.size() == arity_sum);
        CHECK(c.n_payload.size() == c.num_layers * kNumOpcodes);
        CHECK(sum(c.n_payload) == c.s_coord.size());
        CHECK(decode_oim(b) == decode_oim(c));
        CHECK(validate_oim(b).empty());
        CHECK(validate_oim(c).empty());
    }
}

TEST_CASE("rank descriptors") {
    for (OimFormat f : {OimFormat::B, OimFormat::C}) {
        const OimTensor t = compile_firrtl(kSharedMul, with_format(f)).oim;
        REQUIRE(t.ranks.size() == 5);
        for (const auto& r : t.ranks) {
            CHECK((r.cbits > 0) == r.compressed);
            if (r.name == "O" || r.name == "R") {
                CHECK(r.pbits == 0);
            }
        }
        CHECK(t.ranks.front().name == "I");
        CHECK(t.ranks[1].name == (f == OimFormat::B ? "S" : "N"));
    }
}

TEST_CASE("minimal coordinate widths") {
    CHECK(minimal_bits(0) == 8);
    CHECK(minimal_bits(255) == 8);
    CHECK(minimal_bits(256) == 16);
    CHECK(minimal_bits(70000) == 32);
    CHECK(minimal_bits(uint64_t{1} << 40) == 64);
}

TEST_CASE("serialize, load, serialize is a fixed point") {
    for (OimFormat f : {OimFormat::B, OimFormat::C}) {
        FuzzSpec spec;
        spec.seed = 77;
        const OimTensor t = compile_firrtl(random_circuit(spec), with_format(f)).oim;
        const fs::path a = scratch_dir("rt_a"), b = scratch_dir("rt_b");
        serialize_oim(t, a);
        const OimTensor back = load_oim(a);
        CHECK(back == t);
        serialize_oim(back, b);
        CHECK(slurp(a / "meta.json") == slurp(b / "meta.json"));
        CHECK(slurp(a / "oim.json") == slurp(b / "oim.json"));
        fs::remove_all(a);
        fs::remove_all(b);
    }
}

TEST_CASE("product design meta.json") {
    const OimTensor t = compile_firrtl(
                            "circuit Product :\n  module Product :\n    input a : UInt<4>\n    input b : UInt<4>\n"
                            "    input c : UInt<4>\n    output y : UInt<8>\n    y <= mul(a, c)\n")
                            .oim;
    const nlohmann::json m = nlohmann::json::parse(meta_json(t));
    CHECK(m["num_slots"] == 4);
    CHECK(m["io"]["inputs"].size() == 3);
    CHECK(m["io"]["outputs"].size() == 1);
    CHECK(m["format"] == "B");
}

TEST_CASE("tampered files are rejected") {
    const OimTensor t = compile_firrtl(kSharedMul).oim;
    const std::string meta = meta_json(t);
    const std::string arrays = arrays_json(t);

    nlohmann::json a = nlohmann::json::parse(arrays);
    a["I_payload"] = {3};  // no longer sums to len(S_coord)
    CHECK_THROWS_AS(parse_oim(meta, a.dump()), SchemaError);

    nlohmann::json m = nlohmann::json::parse(meta);
    m["schema_version"] = kOimSchemaVersion + 1;
    CHECK_THROWS_AS(parse_oim(m.dump(), arrays), VersionError);

    CHECK_THROWS_AS(parse_oim("{", arrays), SchemaError);
    CHECK_THROWS_AS(parse_oim(meta, "[]"), SchemaError);

    nlohmann::json f = nlohmann::json::parse(meta);
    f["format"] = "D";
    CHECK_THROWS_AS(parse_oim(f.dump(), arrays), SchemaError);

    CHECK_THROWS_AS(load_oim(scratch_dir("missing")), IoError);
}

TEST_CASE("validate_oim diagnostics") {
    OimTensor t = compile_firrtl(kSharedMul).oim;
    REQUIRE(validate_oim(t).empty());
    t.s_coord[1] = t.num_slots;
    const auto diags = validate_oim(t);
    REQUIRE_FALSE(diags.empty());
    bool names_op = false;
    for (const auto& d : diags) {
        names_op = names_op || d.find("op 1") != std::string::npos;
    }
    CHECK(names_op);

    OimTensor c = compile_firrtl(kSharedMul, with_format(OimFormat::C)).oim;
    c.n_payload[static_cast<unsigned>(Opcode::Add)] += 1;
    CHECK_FALSE(validate_oim(c).empty());
}

TEST_CASE("array byte accounting") {
    const OimTensor t = compile_firrtl(kSharedMul).oim;
    // every coordinate and payload fits one byte: I_payload 1, S 2, N 2, R 4
    for (const auto& r : t.ranks) {
        CHECK(r.cbits <= 8);
        CHECK(r.pbits <= 8);
    }
    CHECK(array_bytes(t) == 9);
    // Format C: N_payload holds one count per opcode
    const OimTensor c = compile_firrtl(kSharedMul, with_format(OimFormat::C)).oim;
    CHECK(array_bytes(c) == kNumOpcodes + 2 + 4);
}
