#pragma once

#include <cstdint>
#include <vector>

#include "phaselab/statevec.hpp"

namespace phaselab::xeb {

struct Estimate {
    double value = 0;
    double stderr_mean = 0;
    std::size_t count = 0;
};

// Linear XEB: mean of D p(s) - 1 over the sample.
Estimate linear_xeb(const SampleSet& samples);

// Logarithmic XEB, convention <ln(D p)> + gamma: 0 on uniform bitstrings,
// 1 on ideal Porter-Thomas samples. Throws on a zero probability.
Estimate log_xeb(const SampleSet& samples);

struct TxebParams {
    double t = 4.0;  // truncate ideal probabilities above t/D
};

struct TxebResult {
    double txeb = 0;        // mean of D p 1_{D p <= t}
    double fidelity = 0;    // tXEB estimator of F
    double stderr_f = 0;    // empirical standard error of `fidelity`
    double var_f0 = 0;      // closed-form per-sample variance in the F->0 limit
    bool low_t_warning = false;  // t < 2: variance blows up
    std::size_t count = 0;
};

TxebResult truncated_xeb(const SampleSet& samples, const TxebParams& params);

// Closed-form per-sample variance of the tXEB fidelity estimator at F = 0.
double txeb_variance_f0(double t);

struct CollisionStats {
    double b = 0;                 // beta / D
    std::vector<double> m_c;      // expected count of strings seen exactly c times, c = 1..c_max
    std::vector<double> a_c;      // expected ideal probability of such strings
    double m_unique = 0;          // expected number of distinct strings
    int c_max = 0;
};

// Expected multiplicity profile of a beta-sample from a Porter-Thomas state.
// c_max = 0 picks the smallest c with M_c < 1e-3; M_c = D b^c / (1+b)^{c+1},
// A_c = (c+1) / (D (1+b)).
CollisionStats collision_stats(double beta, double d_dim, int c_max = 0);

// Expected linear XEB after deduplicating an honest beta-sample: 1 / (1 + b).
double unique_sample_xeb_shift(double beta, double d_dim);

// XEB contribution available to an adversary postselecting double hits when
// oversampling s q strings: 6 s^2 q / D.
double postselection_xeb_bias(double s, double q, double d_dim);

struct HammingFilterParams {
    int threshold = 15;       // maximum allowed pairwise Hamming distance
    double e01 = 0, e10 = 0;  // readout asymmetries, bias b = e01 - e10
    int bootstrap_rounds = 16;
    std::uint64_t seed = 0;
};

struct HammingFilterResult {
    std::vector<std::vector<std::uint32_t>> kept;  // surviving indices per round
    std::vector<double> round_xeb;
    Estimate mean_xeb;  // mean over rounds
};

// Greedy elimination in a fresh random order per bootstrap round; every
// surviving pair is strictly farther than `threshold`.
HammingFilterResult hamming_filter(const SampleSet& samples, const HammingFilterParams& params);

// Probability that two independent samples collide within the threshold,
// binomial with per-bit disagreement 2 p_b (1 - p_b), p_b = (1 - b)/2.
double hamming_collision_probability(int n, int threshold, double bias_b = 0.0);

struct PorterThomasReport {
    double ks_stat = 0;
    double ks_pvalue = 0;
    double mean_dp = 0;
    std::vector<double> hist_edges;   // in units of D p
    std::vector<double> hist_counts;
};

// Kolmogorov-Smirnov test of the sampled ideal probabilities against the
// closed-form null for sampling from a Porter-Thomas state: the scaled
// probability x = D p of a sampled string has CDF 1 - (1 + x) e^{-x}.
PorterThomasReport porter_thomas_checks(const SampleSet& samples);

// Survival function of the Kolmogorov distribution (used for the p-value).
double kolmogorov_pvalue(double stat, std::size_t count);

}  // namespace phaselab::xeb
