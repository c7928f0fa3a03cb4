#include "phaselab/entropy.hpp"

#include <cmath>
#include <stdexcept>

#include <json.hpp>

namespace phaselab::entropy {

namespace {
constexpr double kLn2 = 0.693147180559945309417232121458;
constexpr double kPi = 3.14159265358979323846264338327950288;
}  // namespace

double to_unit(double nats, Unit unit) { return unit == Unit::nats ? nats : nats / kLn2; }

double epsilon_from_c1(double c1) { return std::erfc(c1); }

double honest_min_entropy_bits(const EntropyParams& p) {
    if (p.fidelity < 0 || p.fidelity > 1) throw std::invalid_argument("fidelity out of [0,1]");
    const double cap = p.k_samples * p.n_qubits;
    if (p.fidelity == 1.0) return cap;
    const double bits = -p.k_samples * std::log2(1.0 - p.fidelity);
    return std::min(bits, cap);
}

SmoothBound smooth_min_entropy(const EntropyParams& p) {
    SmoothBound out;
    out.unit = p.unit;
    const double kf = p.k_samples * p.fidelity;
    out.q = kf - p.c1 * std::sqrt(kf * (1.0 - p.fidelity));
    out.epsilon = epsilon_from_c1(p.c1);
    if (out.q < 1.0)
        throw std::runtime_error("smooth_min_entropy: fidelity/confidence combination infeasible");
    const double ln_d = p.n_qubits * kLn2;
    const double nats = out.q * (ln_d - 1.0 + kEulerGamma) -
                        p.c2 * std::sqrt(out.q * kPi * kPi / 6.0);
    out.bound = to_unit(nats, p.unit);
    return out;
}

double log_falling_factorial(double sq, double q) {
    if (q < 0 || sq < q) throw std::invalid_argument("falling factorial needs sq >= q >= 0");
    return std::lgamma(sq + 1.0) - std::lgamma(sq - q + 1.0);
}

MultisetBound multiset_correction(const EntropyParams& p) {
    const SmoothBound smooth = smooth_min_entropy(p);
    MultisetBound out;
    out.unit = p.unit;
    const double sq = p.s_oversample * smooth.q;
    out.correction = to_unit(log_falling_factorial(sq, smooth.q), p.unit);
    out.correction_asymptotic =
        to_unit(smooth.q * std::log(sq) - smooth.q, p.unit);
    out.bound = smooth.bound - out.correction;
    return out;
}

std::string report_json(const EntropyParams& p) {
    nlohmann::json j;
    const auto smooth = smooth_min_entropy(p);
    EntropyParams bits = p;
    bits.unit = Unit::bits;
    const auto smooth_bits = smooth_min_entropy(bits);
    const auto corrected_bits = multiset_correction(bits);
    j["q"] = smooth.q;
    j["epsilon"] = smooth.epsilon;
    j["honest_bits"] = honest_min_entropy_bits(p);
    j["smooth_bits"] = smooth_bits.bound;
    j["corrected_bits"] = corrected_bits.bound;
    return j.dump(2);
}

}  // namespace phaselab::entropy
