#pragma once

#include <string>

namespace phaselab::entropy {

enum class Unit { bits, nats };

struct EntropyParams {
    double fidelity = 0;       // F
    double k_samples = 0;      // sample size k
    int n_qubits = 0;          // D = 2^n
    double c1 = 5.0;           // confidence on the ideal-sample count
    double c2 = 5.0;           // confidence on the log-probability sum
    double s_oversample = 1.0; // adversarial oversampling factor
    Unit unit = Unit::bits;
};

constexpr double kEulerGamma = 0.57721566490153286060651209008240243;

double to_unit(double nats, Unit unit);

// erfc(c1); reproduces the quoted confidence 1.5e-12 at c1 = 5.
double epsilon_from_c1(double c1);

// -k log2(1 - F) bits; saturates at k * n for F -> 1.
double honest_min_entropy_bits(const EntropyParams& p);

struct SmoothBound {
    double q = 0;        // kF - c1 sqrt(kF(1-F)), the certified ideal-sample count
    double bound = 0;    // q (ln D - 1 + gamma) - c2 sqrt(q pi^2 / 6), in `unit`
    double epsilon = 0;  // smoothing parameter from c1
    Unit unit = Unit::bits;
};

// Smooth min-entropy lower bound; throws if q < 1 (fidelity/confidence
// combination infeasible).
SmoothBound smooth_min_entropy(const EntropyParams& p);

struct MultisetBound {
    double bound = 0;                  // smooth bound minus the correction, in `unit`
    double correction = 0;             // log (sq)_q, exact via lgamma
    double correction_asymptotic = 0;  // q log(sq) - q
    Unit unit = Unit::bits;
};

// Oversampling correction: subtract log((s q)_q) from the smooth bound.
MultisetBound multiset_correction(const EntropyParams& p);

// natural log of the falling factorial (sq)_q = sq (sq-1) ... (sq-q+1)
double log_falling_factorial(double sq, double q);

std::string report_json(const EntropyParams& p);

}  // namespace phaselab::entropy
