#include "phaselab/spoofing.hpp"

#include <cmath>
#include <stdexcept>

namespace phaselab::spoofing {

namespace {

// digamma via recurrence + asymptotic series
double digamma(double x) {
    double acc = 0;
    while (x < 8.0) {
        acc -= 1.0 / x;
        x += 1.0;
    }
    const double inv = 1.0 / x, inv2 = inv * inv;
    return acc + std::log(x) - 0.5 * inv -
           inv2 * (1.0 / 12.0 - inv2 * (1.0 / 120.0 - inv2 / 252.0));
}

double harmonic(double m) { return m <= 0 ? 0.0 : digamma(m + 1.0) + 0.57721566490153286060651209; }

}  // namespace

double order_statistic_mean_exact(double dim, double k) {
    if (k < 1 || k > dim) throw std::invalid_argument("order statistic needs 1 <= k <= D");
    return harmonic(dim) - harmonic(k - 1.0);
}

double order_statistic_mean(double dim, double k) {
    if (k < 1 || k > dim) throw std::invalid_argument("order statistic needs 1 <= k <= D");
    if (k >= 100.0) return std::log(dim / k);
    return order_statistic_mean_exact(dim, k);
}

LinearBound spoof_linear_bound(const SpoofScenario& sc) {
    if (sc.k_left < 1 || sc.k_right < 1 || sc.k_left > sc.dim_left || sc.k_right > sc.dim_right)
        throw std::invalid_argument("spoof_linear_bound: counts must satisfy 1 <= k <= D");
    const double decay = std::exp(sc.log_lambda * sc.depth);
    LinearBound out;
    out.bound = std::log(sc.dim_left / sc.k_left) * std::log(sc.dim_right / sc.k_right) * decay;
    // fixed k = k_L k_R: u + v = ln(D_L D_R / k) is constant, so the product
    // u v is maximal at u = v
    const double k_total = sc.k_left * sc.k_right;
    const double half = 0.5 * std::log(sc.dim_left * sc.dim_right / k_total);
    out.k_left_opt = sc.dim_left * std::exp(-half);
    out.k_right_opt = sc.dim_right * std::exp(-half);
    out.bound_at_opt = half * half * decay;
    return out;
}

double spoof_log_bound(const SpoofScenario& sc) {
    if (sc.n_superposition <= 0) throw std::invalid_argument("spoof_log_bound: N must be positive");
    const double prod = std::log(sc.dim_left / sc.k_left) * std::log(sc.dim_right / sc.k_right);
    return std::log1p(prod / sc.n_superposition);
}

double cut_contribution(double nu, double d) {
    return std::exp2(-2.0 * nu * d);
}

stabilizer::LambdaFit fit_lambda_from_clifford(const stabilizer::DecayTable& table) {
    return stabilizer::fit_lambda(table);
}

}  // namespace phaselab::spoofing
