#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "phaselab/circuit.hpp"

namespace phaselab::popdyn {

// Distribution P({v_i}, d) over per-qubit invariant configurations, v_i = 0
// for the identity invariant and 1 for the B invariant. Configuration index
// is the n-bit integer with bit i = v_i.
struct PopState {
    int n = 0;
    std::vector<double> w;  // 2^n weights

    double vacuum_weight() const { return w[0]; }
    double total() const;
};

// 4x4 update on (v_j, v_k), row = outgoing, column = incoming configuration
// in the order 00, 01, 10, 11.
using TransferOp = std::array<double, 16>;

// Column-stochastic iSWAP update.
TransferOp iswap_transfer();
// Update when the entangler is omitted (spoofing); diagonal {1, 0, 0, 1/3}.
TransferOp omitted_transfer();

// Equal weight 2^-n on every configuration.
PopState init_popstate(int n, int max_n = 28);

void apply_gate(PopState& state, int qj, int qk, const TransferOp& op);

// Noise decay per two-qubit gate: configurations with v_j or v_k set scale by
// exp(-16 p2 / 15); the pair vacuum is untouched.
void apply_noise(PopState& state, int qj, int qk, double p2);

// Per-qubit decay: configurations with v_q = 1 scale by `factor`.
void apply_qubit_decay(PopState& state, int q, double factor);

// XEB = 2^n sum_config 3^{-sum v} P(config) - 1.
double xeb_readout(const PopState& state);

enum class EvolveMode { normal, spoof_omit_cut };

// epsilon and p1 are both per-qubit-per-cycle error rates (the global
// fidelity decays as e^{-(epsilon + p1) n} per cycle) and add; B-carrying
// configurations decay by e^{-4(epsilon + p1)/3} per cycle, so that the
// thermal state, with B occupancy 3/4 per qubit, loses weight at exactly the
// fidelity rate. p2 is the per-entangler rate with pair factor e^{-16 p2/15}.
struct PopNoise {
    double epsilon = 0.0;
    double p1 = 0.0;
    double p2 = 0.0;
};

// Ensemble-average XEB trace for the circuit family described by `spec`
// (pattern schedule, optional weak link; gate ensemble is the Haar 1q /
// iSWAP family this two-state chain is exact for). Entry d of the result is
// XEB after d cycles, d = 0..d_max.
//
// spoof_omit_cut tracks the weak-link sector contributions (all-vacuum,
// single-sided, thermal) instead of the microscopic chain; with F = 1 the
// trace at d = mT is exactly 3/4^m.
std::vector<double> evolve(const CircuitSpec& spec, const PopNoise& noise, int d_max,
                           EvolveMode mode = EvolveMode::normal);

struct OrderParameterScan {
    std::vector<double> eps_n;            // scan variable f = epsilon * n
    std::vector<int> depths;
    std::vector<std::vector<double>> xeb;    // [eps][depth]
    std::vector<std::vector<double>> theta;  // exp(-eps n d)/XEB
};

OrderParameterScan order_parameter_scan(const CircuitSpec& spec,
                                        const std::vector<double>& eps_n_grid,
                                        const std::vector<int>& depths,
                                        EvolveMode mode = EvolveMode::normal);

struct CrossingEstimate {
    std::vector<double> per_pair;  // crossing f for consecutive depth pairs
    double mean = 0;
    double spread = 0;             // max pairwise deviation from the mean
};

// Pairwise piecewise-linear intersection of Theta(f) curves at consecutive
// depths. Throws if no depth pair crosses inside the grid.
CrossingEstimate crossing_from_scan(const OrderParameterScan& scan);

}  // namespace phaselab::popdyn
