#pragma once

#include <array>
#include <complex>
#include <cmath>

#include "phaselab/rng.hpp"

namespace phaselab {

using cplx = std::complex<double>;
using Mat2 = std::array<cplx, 4>;    // row-major 2x2
using Mat4 = std::array<cplx, 16>;   // row-major 4x4, basis |00>,|01>,|10>,|11>

constexpr double kPi = 3.14159265358979323846264338327950288;

inline Mat2 mat2_mul(const Mat2& a, const Mat2& b) {
    return {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3],
            a[2] * b[0] + a[3] * b[2], a[2] * b[1] + a[3] * b[3]};
}

// Z^p = diag(1, e^{i pi p})
inline Mat2 z_pow(double p) {
    return {cplx(1, 0), cplx(0, 0), cplx(0, 0), std::polar(1.0, kPi * p)};
}

inline Mat2 sqrt_x() {
    return {cplx(0.5, 0.5), cplx(0.5, -0.5), cplx(0.5, -0.5), cplx(0.5, 0.5)};
}

// Z^p X^{1/2} Z^{-p}; the experiment's single-qubit ensemble with
// p in {-1, -3/4, ..., 3/4}.
inline Mat2 discrete_1q(double p) {
    return mat2_mul(z_pow(p), mat2_mul(sqrt_x(), z_pow(-p)));
}

inline const std::array<double, 8>& discrete_exponents() {
    static const std::array<double, 8> ps = {-1.0, -0.75, -0.5, -0.25, 0.0, 0.25, 0.5, 0.75};
    return ps;
}

// Clifford subset of the discrete ensemble.
inline const std::array<double, 4>& clifford_exponents() {
    static const std::array<double, 4> ps = {-1.0, -0.5, 0.0, 0.5};
    return ps;
}

// Haar-random SU(2) member: two normalized complex Gaussian columns with
// Gram-Schmidt. Moments are checked in tests (E|u00|^2 = 1/2, E|u00|^4 = 1/3).
inline Mat2 haar_1q(Rng& rng) {
    cplx a(rng.next_normal(), rng.next_normal());
    cplx b(rng.next_normal(), rng.next_normal());
    double norm = std::sqrt(std::norm(a) + std::norm(b));
    a /= norm;
    b /= norm;
    // second column orthogonal to (a, b): (-conj(b), conj(a)) times random phase
    const cplx phase = std::polar(1.0, 2.0 * kPi * rng.next_double());
    return {a, -std::conj(b) * phase, b, std::conj(a) * phase};
}

// Injected noise gate U = Z^z Z^a X^x Z^{-a}; z, x ~ N(0, sigma),
// a ~ N(axis_mean, axis_std).
inline Mat2 noise_inject_1q(double sigma, double axis_mean, double axis_std, Rng& rng) {
    const double z = sigma * rng.next_normal();
    const double x = sigma * rng.next_normal();
    const double a = axis_mean + axis_std * rng.next_normal();
    // X^x = e^{i pi x/2} Rx(pi x)
    const double half = kPi * x / 2.0;
    const cplx ph = std::polar(1.0, half);
    const Mat2 xpow = {ph * cplx(std::cos(half), 0), ph * cplx(0, -std::sin(half)),
                       ph * cplx(0, -std::sin(half)), ph * cplx(std::cos(half), 0)};
    return mat2_mul(z_pow(z), mat2_mul(z_pow(a), mat2_mul(xpow, z_pow(-a))));
}

// fSim(theta, phi): |01>,|10> block [[cos t, -i sin t], [-i sin t, cos t]],
// |11> phase e^{-i phi}. fSim(pi/2, 0) = exp(-i pi/4 (XX + YY)) = iSWAP here.
inline Mat4 fsim(double theta, double phi) {
    Mat4 m{};
    m[0] = cplx(1, 0);
    m[5] = cplx(std::cos(theta), 0);
    m[6] = cplx(0, -std::sin(theta));
    m[9] = cplx(0, -std::sin(theta));
    m[10] = cplx(std::cos(theta), 0);
    m[15] = std::polar(1.0, -phi);
    return m;
}

inline Mat4 iswap() { return fsim(kPi / 2.0, 0.0); }

// Hardware-like preset (median measured angles).
inline Mat4 fsim_sycamore_preset() { return fsim(0.495 * kPi, 0.09 * kPi); }

}  // namespace phaselab
