#pragma once

#include "phaselab/stabilizer.hpp"

namespace phaselab::spoofing {

struct SpoofScenario {
    double dim_left = 0, dim_right = 0;  // subsystem Hilbert dimensions
    double k_left = 0, k_right = 0;      // selected counts per subsystem
    double nu = 0;                        // entangling gates along the cut
    double log_lambda = 0;                // fitted per-cycle log decay of XEB - C(n)
    double depth = 0;
    double n_superposition = 1;          // terms in the left-right superposition
};

// Mean of the k-th order statistic of the scaled Porter-Thomas probabilities
// over a dimension-D population: exactly H_D - H_{k-1}; the k >= 100 fast
// path is the ln(D/k) asymptotic.
double order_statistic_mean(double dim, double k);
double order_statistic_mean_exact(double dim, double k);

struct LinearBound {
    double bound = 0;            // ln(D_L/k_L) ln(D_R/k_R) lambda^d
    double k_left_opt = 0;       // optimal split of k = k_L k_R
    double k_right_opt = 0;
    double bound_at_opt = 0;
};

// Upper bound on the linear XEB an adversary can reach from subsystem-product
// states plus order-statistics post-processing. Throws if any count exceeds
// its dimension.
LinearBound spoof_linear_bound(const SpoofScenario& sc);

// ln(1 + (1/N) ln(D_L/k_L) ln(D_R/k_R)); the logarithmic-XEB analogue.
double spoof_log_bound(const SpoofScenario& sc);

// Residual overlap kept when nu cut gates are omitted for d cycles: 4^{-nu d}.
double cut_contribution(double nu, double d);

// Slope fit of log(XEB - C(n)) from a stabilizer decay table.
stabilizer::LambdaFit fit_lambda_from_clifford(const stabilizer::DecayTable& table);

}  // namespace phaselab::spoofing
