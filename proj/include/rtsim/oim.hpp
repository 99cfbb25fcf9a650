#pragma once

// The operation-input-mask tensor OIM[I,S,N,O,R] in its two concrete
// compressed layouts.
//
//   Format B  [I,S,N,O,R]: I_payload (ops per layer), S_coord, N_coord, R_coord
//   Format C  [I,N,S,O,R]: N_payload (ops per layer x opcode), S_coord, R_coord
//
// O carries neither coordinates nor payloads: operand o of an op is simply
// the o-th R coordinate after the op's start. Arity comes from the opcode,
// or from P_params[0] for the variadic mux chain.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "rtsim/bitvec.hpp"
#include "rtsim/dfg.hpp"
#include "rtsim/opcode.hpp"

namespace rtsim {

enum class OimFormat : uint8_t { B, C };

std::string_view to_string(OimFormat f);

struct RankDescriptor {
    std::string name;
    bool compressed = false;
    uint8_t cbits = 0;  // 0: coordinates implicit in array position
    uint8_t pbits = 0;  // 0: no payload array
    friend bool operator==(const RankDescriptor&, const RankDescriptor&) = default;
};

struct OimRegister {
    uint32_t current = 0;
    uint32_t next = 0;
    std::optional<uint32_t> reset;
    u128 init = 0;
    friend bool operator==(const OimRegister&, const OimRegister&) = default;
};

struct OimConstant {
    uint32_t slot = 0;
    u128 value = 0;
    friend bool operator==(const OimConstant&, const OimConstant&) = default;
};

struct OimPort {
    std::string name;
    uint32_t slot = 0;
    friend bool operator==(const OimPort&, const OimPort&) = default;
};

struct OimTensor {
    OimFormat format = OimFormat::B;
    std::vector<RankDescriptor> ranks;  // in storage order
    uint32_t num_layers = 0;
    uint32_t num_slots = 0;

    std::vector<uint32_t> i_payload;  // B
    std::vector<uint32_t> n_coord;    // B
    std::vector<uint32_t> n_payload;  // C, num_layers * kNumOpcodes
    std::vector<uint32_t> s_coord;
    std::vector<uint32_t> r_coord;

    std::vector<uint32_t> p_offset;  // num_ops + 1 entries into p_params
    std::vector<uint32_t> p_params;

    std::vector<uint8_t> widths;      // per slot
    std::vector<uint8_t> signedness;  // per slot, 0/1
    std::vector<OimRegister> registers;
    std::vector<OimConstant> constants;
    std::vector<OimPort> inputs;
    std::vector<OimPort> outputs;
    std::vector<OimPort> signals;
    std::string top;

    std::size_t num_ops() const { return s_coord.size(); }
    friend bool operator==(const OimTensor&, const OimTensor&) = default;
};

/// Smallest of {8, 16, 32, 64} that holds `max_value`.
uint8_t minimal_bits(uint64_t max_value);

/// Throws CapacityError when ops or slots exceed 2^32.
OimTensor build_oim(const LayeredGraph& lg, const SlotAssignment& slots, OimFormat format);

/// Every structural invariant; empty when the tensor is well formed.
std::vector<std::string> validate_oim(const OimTensor& t);

/// (layer, opcode, output slot, operand slots, params)
using DecodedOp = std::tuple<uint32_t, uint32_t, uint32_t, std::vector<uint32_t>, std::vector<uint32_t>>;

/// The op multiset of a tensor, sorted. Identical for B and C of one design.
std::vector<DecodedOp> decode_oim(const OimTensor& t);

struct OpLayout {
    Opcode op;
    uint32_t layer;
    uint32_t r_begin;
    uint32_t arity;
};

/// Opcode, layer and R_coord extent of every op, in storage order.
std::vector<OpLayout> op_layout(const OimTensor& t);

/// Bytes the coordinate and payload arrays occupy at their chosen widths.
std::size_t array_bytes(const OimTensor& t);

inline constexpr int kOimSchemaVersion = 1;

/// Writes meta.json and oim.json. Output is byte-stable.
void serialize_oim(const OimTensor& t, const std::filesystem::path& dir);
std::string meta_json(const OimTensor& t);
std::string arrays_json(const OimTensor& t);

/// Throws IoError, SchemaError or VersionError.
OimTensor load_oim(const std::filesystem::path& dir);
OimTensor parse_oim(const std::string& meta, const std::string& arrays);

}  // namespace rtsim
