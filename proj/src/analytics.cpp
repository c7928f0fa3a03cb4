#include "phaselab/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace phaselab::analytics {

namespace {

constexpr double kLn2 = 0.693147180559945309417232121458;

double logsumexp2(double a, double b) {
    const double hi = std::max(a, b), lo = std::min(a, b);
    if (!std::isfinite(hi)) return hi;
    return hi + std::log1p(std::exp(lo - hi));
}

}  // namespace

double weak_link_xeb(double f_per_layer, double period_T, double m) {
    if (f_per_layer <= 0 || f_per_layer > 1)
        throw std::invalid_argument("weak_link_xeb: F must be in (0, 1]");
    const double global = std::pow(f_per_layer, m * period_T);
    const double half = std::pow(0.25 * std::pow(f_per_layer, period_T / 2.0), m);
    return global + 2.0 * half;
}

double weak_link_split_xeb(double f_left, double f_right, double period_T, double d,
                           double lambda) {
    if (f_left <= 0 || f_left > 1 || f_right <= 0 || f_right > 1)
        throw std::invalid_argument("weak_link_split_xeb: fidelities must be in (0, 1]");
    const double link = std::pow(lambda, d / period_T);
    return link * std::pow(f_left, d) + link * std::pow(f_right, d) +
           std::pow(f_left * f_right, d);
}

double log1p_xeb_1d(double n, double d, double epsilon) {
    // XEB + 1 = 2 e^{-eps n d / 2} (cosh(n delta) + (2^-d / delta) sinh(n delta)),
    // delta = sqrt(eps^2 d^2 / 4 + 2^{-2d}); evaluated through e^{n delta}.
    const double two_md = std::exp2(-d);
    const double delta = std::sqrt(0.25 * epsilon * epsilon * d * d + two_md * two_md);
    const double y = n * delta;
    const double em2y = std::exp(-2.0 * y);
    const double bracket = 0.5 * (1.0 + em2y) + (two_md / delta) * 0.5 * (1.0 - em2y);
    return kLn2 - 0.5 * epsilon * n * d + y + std::log(bracket);
}

double xeb_1d(double n, double d, double epsilon) {
    return std::expm1(log1p_xeb_1d(n, d, epsilon));
}

double log1p_xeb_1d_shallow(double n, double alpha, double f) {
    // XEB + 1 = n^{-f alpha / ln4} 2 e^{n^{1-alpha}}
    const double ln_n = std::log(n);
    return -(f * alpha / (2.0 * kLn2)) * ln_n + kLn2 + std::exp((1.0 - alpha) * ln_n);
}

double log_xeb_1d_deep(double n, double alpha, double f) {
    // XEB = n^{-f alpha / ln2} + 2 n^{1-alpha} / (f alpha log2 n)
    const double ln_n = std::log(n);
    const double a = -(f * alpha / kLn2) * ln_n;
    const double b = kLn2 + (1.0 - alpha) * ln_n - std::log(f * alpha * ln_n / kLn2);
    return logsumexp2(a, b);
}

double critical_line(double alpha, int dimension, Boundary boundary) {
    if (alpha <= 1.0)
        throw std::domain_error("critical line terminates at alpha = 1");
    const double base = (alpha - 1.0) / alpha;
    if (dimension == 1) return base * kLn2;
    if (dimension == 2) return boundary == Boundary::none ? base * 2.0 * kLn2 : base * kLn2;
    throw std::invalid_argument("dimension must be 1 or 2");
}

double log1p_xeb_2d(double n, double d, double epsilon, Boundary boundary, double c_r) {
    // XEB + 1 = BF * (exp[e^{-eps d} n 4^-d] + e^{-eps n d} exp[e^{eps d} n 4^-d]),
    // log BF = c_r sqrt(n) e^{-eps d} 4^{-d r / 4}.
    const double dilute = n * std::exp2(-2.0 * d);
    const double vacuum_term = std::exp(-epsilon * d) * dilute;
    const double thermal_term = -epsilon * n * d + std::exp(epsilon * d) * dilute;
    double log_bf = 0.0;
    if (boundary != Boundary::none) {
        const double r = boundary == Boundary::regular_r3 ? 3.0 : 2.0;
        log_bf = c_r * std::sqrt(n) * std::exp(-epsilon * d) * std::exp2(-d * r / 2.0);
    }
    return log_bf + logsumexp2(vacuum_term, thermal_term);
}

double xeb_2d(double n, double d, double epsilon, Boundary boundary, double c_r) {
    return std::expm1(log1p_xeb_2d(n, d, epsilon, boundary, c_r));
}

double alpha_of(double n, double d, int dimension) {
    if (dimension == 1) return d / std::log2(n);
    if (dimension == 2) return d / (std::log2(n) / 2.0);
    throw std::invalid_argument("dimension must be 1 or 2");
}

Classified phase_classify(const PhasePoint& p) {
    Classified out;
    out.scaling.f = p.epsilon * p.n;
    out.scaling.alpha = alpha_of(p.n, p.d, p.dimension);
    const double log1p_xeb = p.dimension == 1
                                 ? log1p_xeb_1d(p.n, p.d, p.epsilon)
                                 : log1p_xeb_2d(p.n, p.d, p.epsilon, p.boundary);
    out.scaling.theta = std::exp(-p.epsilon * p.n * p.d) / std::expm1(log1p_xeb);
    if (out.scaling.alpha <= 1.0) {
        out.region = Region::pre_anticoncentration;
        return out;
    }
    const double fc = critical_line(out.scaling.alpha, p.dimension,
                                    p.dimension == 2 ? p.boundary : Boundary::none);
    out.region = out.scaling.f < fc ? Region::weak_noise : Region::strong_noise;
    return out;
}

std::string region_name(Region r) {
    switch (r) {
        case Region::weak_noise: return "weak_noise";
        case Region::strong_noise: return "strong_noise";
        case Region::pre_anticoncentration: return "pre_anticoncentration";
    }
    return "?";
}

}  // namespace phaselab::analytics
