#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "rtsim/bitvec.hpp"
#include "rtsim/oim.hpp"

namespace rtsim {

/// Unrolling levels. SU and TI need per-design generated code and are
/// reserved tags only.
enum class KernelLevel : uint8_t { RU, OU, NU, PSU, IU, SU, TI };

inline constexpr KernelLevel kInterpreterLevels[] = {KernelLevel::RU, KernelLevel::OU, KernelLevel::NU,
                                                     KernelLevel::PSU, KernelLevel::IU};

std::string_view to_string(KernelLevel level);
std::optional<KernelLevel> kernel_level_from_name(std::string_view name);  // case-insensitive
OimFormat required_format(KernelLevel level);

struct KernelConfig {
    KernelLevel level = KernelLevel::NU;
    unsigned op_unroll = 8;          // PSU/IU block factor for op loops: 1, 2, 4, 8, 16
    unsigned writeback_unroll = 24;  // PSU/IU block factor for write-back: 1, 4, 8, 16, 24, 32
};

struct SignalState {
    std::vector<BitVec> li;        // one slot per signal; LI and LO share it
    std::vector<BitVec> reg_next;  // commit staging, one per register
    uint64_t cycle = 0;
};

/// Slots zero, constants loaded, registers at their init values.
SignalState init_state(const OimTensor& t);

/// Writes an input slot. Throws UnknownPort, NotPokeable, ValueOutOfRange.
void poke(SignalState& state, const OimTensor& t, std::string_view port, u128 value);

/// Reads an input, output, register or kept signal by name.
BitVec peek(const SignalState& state, const OimTensor& t, std::string_view port);

/// Simultaneous: every register takes its next (or init, under reset)
/// value computed from pre-commit slots.
void commit_registers(SignalState& state, const OimTensor& t);

class Kernel {
public:
    /// Throws FormatMismatch when the level cannot traverse the tensor's format.
    Kernel(const OimTensor& tensor, KernelConfig config);
    ~Kernel();
    Kernel(Kernel&&) noexcept;
    Kernel& operator=(Kernel&&) noexcept;

    /// Evaluates every layer, then commits registers.
    void step(SignalState& state);

    const KernelConfig& config() const { return config_; }

private:
    struct Impl;
    const OimTensor* tensor_;
    KernelConfig config_;
    std::unique_ptr<Impl> impl_;
};

void step_cycle(SignalState& state, const OimTensor& t, const KernelConfig& config);

/// Owns a tensor, a kernel and a state. Name lookups are hashed.
class Simulator {
public:
    Simulator(OimTensor tensor, KernelConfig config);

    void poke(std::string_view port, u128 value);
    BitVec peek(std::string_view port) const;
    void step();
    void run(uint64_t cycles);

    const OimTensor& tensor() const { return *tensor_; }
    const SignalState& state() const { return state_; }
    SignalState& state() { return state_; }
    uint64_t cycle() const { return state_.cycle; }

private:
    std::unique_ptr<OimTensor> tensor_;
    Kernel kernel_;
    SignalState state_;
    std::unordered_map<std::string, uint32_t> inputs_;
    std::unordered_map<std::string, uint32_t> readable_;
};

}  // namespace rtsim
