#pragma once

#include <optional>
#include <string>

namespace phaselab::analytics {

enum class Boundary { none, regular_r3, sycamore_r2 };
enum class Region { weak_noise, strong_noise, pre_anticoncentration };

struct PhasePoint {
    double n = 0;
    double d = 0;
    double epsilon = 0;
    std::optional<double> period_T;
    int dimension = 1;  // 1 or 2
    Boundary boundary = Boundary::none;
};

struct ScalingPoint {
    double f = 0;      // epsilon * n
    double alpha = 0;  // d / log2 n (1D), d / log4 n (2D)
    double theta = 0;  // exp(-eps n d) / XEB
};

// Weak-link model: XEB(mT) = F^{mT} + 2 (F^{T/2}/4)^m.
double weak_link_xeb(double f_per_layer, double period_T, double m);

// Split left/right fidelities: lambda^{d/T} F_L^d + lambda^{d/T} F_R^d +
// (F_L F_R)^d. Valid for d >= T; d = 0 returns the out-of-model value 3.
double weak_link_split_xeb(double f_left, double f_right, double period_T, double d,
                           double lambda = 0.25);

// 1D transfer-matrix solution in the continuum limit; log-space internals so
// n up to 2^20 and beyond evaluate without overflow.
double log1p_xeb_1d(double n, double d, double epsilon);
double xeb_1d(double n, double d, double epsilon);

// Asymptotic branches (log of XEB + 1 for the shallow branch, log of XEB for
// the deep ones); used for continuity/non-analyticity checks.
double log1p_xeb_1d_shallow(double n, double alpha, double f);  // alpha < 1
double log_xeb_1d_deep(double n, double alpha, double f);       // alpha > 1

// Critical line f_c(alpha); throws std::domain_error for alpha <= 1.
double critical_line(double alpha, int dimension, Boundary boundary);

// 2D dilute expansion, optional boundary correction factor
// exp(c_r sqrt(n) e^{-eps d} 4^{-d r / 4}).
double log1p_xeb_2d(double n, double d, double epsilon, Boundary boundary = Boundary::none,
                    double c_r = 4.0);
double xeb_2d(double n, double d, double epsilon, Boundary boundary = Boundary::none,
              double c_r = 4.0);

double alpha_of(double n, double d, int dimension);

struct Classified {
    Region region;
    ScalingPoint scaling;
};

Classified phase_classify(const PhasePoint& p);

std::string region_name(Region r);

}  // namespace phaselab::analytics
