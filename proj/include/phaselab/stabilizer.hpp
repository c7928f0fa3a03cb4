#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "phaselab/circuit.hpp"

namespace phaselab::stabilizer {

// A Pauli row: i^phase * prod_q X_q^{x_q} Z_q^{z_q}, bit-packed for n <= 64.
// Hermitian rows satisfy phase == popcount(x & z) (mod 2).
struct PauliRow {
    std::uint64_t x = 0;
    std::uint64_t z = 0;
    std::uint8_t phase = 0;  // exponent of i, mod 4
};

// Aaronson-Gottesman tableau: rows [0, n) destabilizers, [n, 2n) stabilizers.
struct Tableau {
    int n = 0;
    std::vector<PauliRow> rows;

    static Tableau zero_state(int n);  // stabilizers Z_q, destabilizers X_q
    bool is_valid() const;             // symplectic + Hermiticity checks
};

// Conjugation action of a gate, derived numerically from its unitary; throws
// std::runtime_error("non-Clifford gate encountered") when the matrix does
// not normalize the Pauli group.
struct Action1q {
    // lut[in] for in = x + 2z: packed output (x', z') plus phase increment
    std::uint8_t out_bits[4];
    std::uint8_t phase_add[4];
};
struct Action2q {
    // index (x1, z1, x2, z2) packed as x1 + 2 z1 + 4 x2 + 8 z2
    std::uint8_t out_bits[16];
    std::uint8_t phase_add[16];
};

Action1q action_from_mat2(const Mat2& u);
Action2q action_from_mat4(const Mat4& u);

void apply_1q(Tableau& tab, int q, const Action1q& a);
void apply_2q(Tableau& tab, int q1, int q2, const Action2q& a);

// Runs a Clifford-only circuit (clifford_zxz single-qubit set, iSWAP/fSim at
// Clifford angles); throws on any non-Clifford gate.
Tableau clifford_run(const Circuit& circuit);

// Probability |<bits|psi>|^2; always 0 or a power of two.
double amplitude_squared(const Tableau& tab, std::uint64_t bits);

// Born sample from the stabilizer state.
std::uint64_t sample_bitstring(Tableau tab, Rng& rng);

// log2 of the computational-basis support size (the rank of the stabilizer
// X block); every nonzero probability is 2^-k.
int support_rank(const Tableau& tab);

// Exact XEB of the state against itself: 2^(n-k) - 1.
double self_xeb(const Tableau& tab);

// Purity of the reduced state on `qubit_mask`; exactly 2^-S with integer S.
double reduced_purity(const Tableau& tab, std::uint64_t qubit_mask);

struct DecayPoint {
    int n = 0;
    int d = 0;
    double xeb = 0;
    double stderr_mean = 0;   // standard error of the ensemble mean
    double floor_ = 0;        // 1/sqrt(M) statistics resolution limit
};

struct DecayTable {
    std::vector<DecayPoint> points;
    int samples = 0;
};

struct LambdaFit {
    double log_lambda = 0;    // fitted slope of log(XEB - C(n)) vs d
    double stderr_slope = 0;
    double intercept = 0;
    int points_used = 0;
    double floor_ = 0;
};

// Ensemble XEB decay for Clifford circuits on the given shapes (one spec per
// system size; depth field is ignored in favour of d_list). Each of the M
// instances contributes its exact XEB at every depth.
DecayTable clifford_xeb_decay(const std::vector<CircuitSpec>& shapes,
                              const std::vector<int>& d_list, int samples_m,
                              std::uint64_t seed);

// Unweighted least squares of log(xeb - C(n)) against d over points at least
// 3x above the resolution floor. Throws if fewer than two usable points.
LambdaFit fit_lambda(const DecayTable& table);

double xeb_asymptote(int n);  // C(n) = (1 - 2^-n) / (1 + 2^-n)

}  // namespace phaselab::stabilizer
