#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "phaselab/gates.hpp"

namespace phaselab {

enum class Topology { chain1d, grid2d };
enum class GateEnsemble {
    discrete_zxz,   // Z^p X^{1/2} Z^{-p}, p in {-1, -3/4, ..., 3/4}
    haar_1q,        // uniformly random SU(2)
    clifford_zxz,   // Z^p X^{1/2} Z^{-p}, p in {-1, -1/2, 0, 1/2}
};
enum class EntanglerKind { iswap, fsim };

struct NoiseInjection {
    double sigma_angle = 0.0;  // std-dev of the z and x exponents
    double axis_mean = -1.0;
    double axis_std = 1.0;
    bool per_layer = true;     // fresh gates each layer and each circuit
};

// Depolarizing rates. p2/p1 are exponential decay rates per 2q gate / per 1q
// layer of the traceless Pauli components (mixing probability
// 15(1-e^{-16 p2/15})/16 resp. 3(1-e^{-4 p1/3})/4, = p2/p1 to first order).
// epsilon is the error per qubit per cycle used by the analytics module.
struct NoiseModel {
    double p2 = 0.0;
    double p1 = 0.0;
    double epsilon = 0.0;
};

struct WeakLink {
    int cut_position = 0;  // left half = [0, cut), right half = [cut, n)
    int period_T = 0;      // cross-cut entangler fires at cycles T, 2T, ...
};

struct CircuitSpec {
    int n = 0;
    Topology topology = Topology::chain1d;
    int rows = 0, cols = 0;  // grid2d only
    std::vector<std::string> pattern;  // cycle c uses pattern[c mod size]
    int depth_cycles = 0;
    GateEnsemble gate_ensemble = GateEnsemble::discrete_zxz;
    EntanglerKind entangler = EntanglerKind::iswap;
    double fsim_theta = kPi / 2.0, fsim_phi = 0.0;
    std::optional<WeakLink> weak_link;
    std::optional<NoiseInjection> noise_inject;
    bool final_1q_layer = false;  // trailing 1q layer after the last cycle
    std::uint64_t seed = 0;
};

struct Gate {
    enum class Kind { one_qubit, two_qubit };
    Kind kind = Kind::one_qubit;
    int cycle = 0;                      // 1-based
    std::array<int, 2> qubits = {0, -1};
    Mat2 u1{};
    Mat4 u2{};
    double exponent_p = 0.0;            // discrete/clifford 1q gates only
    bool from_discrete_set = false;
    bool injected = false;
    std::string layer;                  // pattern label, "1q", "inject", "link"
};

struct Circuit {
    int n = 0;
    int depth_cycles = 0;
    CircuitSpec spec;
    std::vector<Gate> gates;
};

// Bond list for one pattern label on the spec's topology. Labels:
//   chain1d: A (even bonds), B (odd bonds)
//   grid2d staggered:     A/B vertical, C/D horizontal, keyed by (r+c) parity
//   grid2d non-staggered: E/F vertical keyed by row parity,
//                         G/H horizontal keyed by column parity
// The 2D lists follow data/patterns2d.json (version 1); the file encodes our
// reading of the pictorial definitions and is flagged as an assumption there.
std::vector<std::pair<int, int>> pattern_bonds(const CircuitSpec& spec, const std::string& label);

// All topology-adjacent bonds (used for validation and cut bookkeeping).
std::vector<std::pair<int, int>> all_bonds(const CircuitSpec& spec);

// True if the bond crosses the weak-link cut.
bool crosses_cut(const CircuitSpec& spec, std::pair<int, int> bond);

// The single cross-cut bond the weak link applies every period_T cycles.
std::pair<int, int> weak_link_bond(const CircuitSpec& spec);

void validate_spec(const CircuitSpec& spec);

// Deterministic in spec.seed: per-gate randomness comes from the substream
// (circuit seed) -> cycle -> qubit, so layer/qubit edits do not shift other
// gates' draws.
Circuit build_circuit(const CircuitSpec& spec);

// One extra random 1q gate per qubit after each 1q layer; fresh draws per
// (layer, qubit) from `seed`, independent of the circuit's own seed.
Circuit inject_noise_gates(const Circuit& circuit, const NoiseInjection& inj, std::uint64_t seed);

std::string circuit_to_json(const Circuit& c);
Circuit circuit_from_json(const std::string& text);
std::string spec_to_json(const CircuitSpec& spec);
CircuitSpec spec_from_json(const std::string& text);

}  // namespace phaselab
