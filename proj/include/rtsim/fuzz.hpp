#pragma once

// Random design generation. Everything is a pure function of its seed.

#include <array>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "rtsim/bitvec.hpp"
#include "rtsim/opcode.hpp"

namespace rtsim {

/// mt19937_64 with fixed bounded-draw algorithms, so sequences do not
/// depend on the standard library's distribution implementations.
class Rng {
public:
    explicit Rng(uint64_t seed) : engine_(seed) {}

    uint64_t next() { return engine_(); }
    uint64_t below(uint64_t n);                 // uniform in [0, n)
    int64_t range(int64_t lo, int64_t hi);      // uniform in [lo, hi]
    double unit();                              // uniform in [0, 1)
    bool chance(double p) { return unit() < p; }
    u128 bits(unsigned width);                  // uniform over width bits

private:
    std::mt19937_64 engine_;
};

/// Decorrelates derived streams (structure vs. stimulus).
uint64_t mix_seed(uint64_t seed, uint64_t stream);

struct FuzzSpec {
    uint64_t seed = 1;
    unsigned min_nodes = 20;
    unsigned max_nodes = 200;
    unsigned max_depth = 8;
    unsigned min_width = 1;
    unsigned max_width = 64;
    double register_fraction = 0.1;  // registers per generated op
    unsigned num_inputs = 6;
    std::array<double, kNumOpcodes> opcode_weights = default_weights();
    double chain_bias = 0.35;  // chance a new mux extends the previous one's low branch
    double literal_probability = 0.1;

    static std::array<double, kNumOpcodes> default_weights();
};

/// Well-formed, acyclic lo-FIRRTL. The unoptimized graph of the result has
/// exactly the requested number of ops (drawn from [min_nodes, max_nodes]).
std::string random_circuit(const FuzzSpec& spec);

/// Layered xor/and/or network where each node reads the previous layer and
/// usually one much earlier value, so most edges skip layers.
struct DeepSpec {
    uint64_t seed = 1;
    unsigned depth = 24;
    unsigned nodes_per_layer = 12;
    unsigned num_inputs = 8;
    unsigned width = 16;
    double skip_probability = 0.8;
    double output_fraction = 0.15;
};

std::string deep_circuit(const DeepSpec& spec);

/// out = mux(s0, v0, mux(s1, v1, ... mux(s{k-1}, v{k-1}, d)))
std::string priority_mux_circuit(unsigned k, unsigned width);

/// Per-cycle uniform input values.
class PokeStream {
public:
    PokeStream(uint64_t seed, std::vector<unsigned> widths) : rng_(mix_seed(seed, 0x706f6b65)), widths_(std::move(widths)) {}
    std::vector<u128> next();

private:
    Rng rng_;
    std::vector<unsigned> widths_;
};

}  // namespace rtsim
