#pragma once

#include <cstddef>
#include <vector>

#include "phaselab/statevec.hpp"

namespace phaselab::schmidt {

struct SchmidtSpectrum {
    std::vector<double> values;  // singular values, descending
    std::size_t d1 = 0, d2 = 0;  // d1 <= d2

    double aspect() const { return double(d1) / double(d2); }
    double purity() const;                       // sum s^4
    double fidelity_at(std::size_t chi) const;   // sum of the chi largest s^2
};

// SVD across the cut: left block = qubits [0, cut).
SchmidtSpectrum schmidt_decompose(const StateVector& psi, int cut);

// Marchenko-Pastur density of normalized singular values, aspect ratio
// lambda = D1/D2 <= 1, support [1 - sqrt(lambda), 1 + sqrt(lambda)].
double mp_density(double s, double lambda);

// C_lambda(s') = integral from s' to lambda_+ of the density (fraction of
// values above s').
double mp_cdf_from_above(double s, double lambda);

// Inverse of the above: the normalized singular value at fraction r. Closed
// form 2 cos(A^{-1}(pi r)/2) at lambda = 1, bisection otherwise.
double mp_singular_value(double r, double lambda);

// F_lambda(r) = integral_0^r s(r')^2 dr'; the Haar-limit fidelity kept by a
// fraction r of singular values.
double mp_fidelity(double r, double lambda);
double mp_fidelity_inverse(double f, double lambda);

// k-th moment of s under the MP density (numerical; s^4 at lambda=1 is 2).
double mp_moment(int k, double lambda);

struct FidelityBound {
    double jensen = 0;  // sqrt(chi * purity)
    double haar = 0;    // F_lambda(chi * purity)
};

FidelityBound fidelity_bound(const SchmidtSpectrum& spectrum, std::size_t chi);

struct ChiRequirement {
    double chi_analytic = 0;  // F / purity
    double chi_numeric = 0;   // F_lambda^{-1}(sqrt F) / purity
};

ChiRequirement chi_requirement(double target_f, double purity, double lambda);

struct TruncatedXeb {
    double true_f = 0;  // fidelity of the chi-truncated state
    double xeb = 0;     // exact-overlap linear XEB of truncated vs ideal
};

TruncatedXeb truncated_state_xeb(const StateVector& psi, int cut, std::size_t chi);

// Kolmogorov-Smirnov statistic of a spectrum against the MP law.
double mp_ks_statistic(const SchmidtSpectrum& spectrum);

}  // namespace phaselab::schmidt
