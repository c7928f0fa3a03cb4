#pragma once

#include <vector>

#include "phaselab/circuit.hpp"
#include "phaselab/popdyn.hpp"

namespace phaselab::popdyn3 {

// Ensemble-average XEB engine for the discrete single-qubit gate set. The
// discrete twirl leaves a richer per-qubit invariant space than the Haar
// ensemble (three states instead of two), so the chain runs over 3^n
// configurations. The per-qubit basis, pair transfer matrix, noise kick and
// readout weights are derived numerically from the gate set at first use and
// the product-space closure is verified to 1e-9 (throws otherwise).
struct DiscreteEngine {
    int states = 0;                  // per-qubit invariant dimension (expect 3)
    std::vector<double> transfer;    // (states^2)^2 pair update, row-major out x in
    std::vector<double> twirl_site;  // states x states: one 1q layer on an idle qubit
    std::vector<double> noise_kick;  // states x states: N(lam) = I + lam * kick
    std::vector<double> readout;     // per-state readout weight
    std::vector<double> initial;     // per-qubit initial coefficients

    static const DiscreteEngine& instance();
};

// XEB trace (entries 0..d_max) for the discrete ensemble on the spec's
// schedule; memory 3^n, n <= 12. Per-qubit-per-cycle noise only (epsilon,
// p1); the traceless decay factor per cycle is e^{-eps - 4 p1/3}.
std::vector<double> evolve(const CircuitSpec& spec, const popdyn::PopNoise& noise, int d_max);

}  // namespace phaselab::popdyn3
