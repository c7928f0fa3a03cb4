#include <doctest.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>

#include "phaselab/rng.hpp"
#include "phaselab/xeb.hpp"

using namespace phaselab;
using namespace phaselab::xeb;

namespace {

// synthetic Porter-Thomas state: D normalized exponential probabilities
std::vector<double> pt_state(int n, std::uint64_t seed) {
    Rng rng = Rng(seed).substream(0x9e);
    std::vector<double> p(std::size_t(1) << n);
    double total = 0;
    for (auto& v : p) {
        v = rng.next_exponential();
        total += v;
    }
    for (auto& v : p) v /= total;
    return p;
}

// sample k strings from `dist`, report `ideal` probabilities
SampleSet draw(const std::vector<double>& dist, const std::vector<double>& ideal, int n,
               std::size_t k, std::uint64_t seed) {
    std::vector<double> cdf(dist.size());
    double acc = 0;
    for (std::size_t i = 0; i < dist.size(); ++i) {
        acc += dist[i];
        cdf[i] = acc;
    }
    SampleSet out;
    out.n = n;
    Rng rng = Rng(seed).substream(0x51);
    for (std::size_t i = 0; i < k; ++i) {
        const double u = rng.next_double() * acc;
        const std::size_t idx =
            std::min<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin(),
                                  dist.size() - 1);
        out.bitstrings.push_back(idx);
        out.probs.push_back(ideal[idx]);
    }
    return out;
}

std::vector<double> uniform_dist(int n) {
    return std::vector<double>(std::size_t(1) << n, std::ldexp(1.0, -n));
}

}  // namespace

TEST_CASE("linear XEB on ideal, uniform and mixed samplers") {
    const int n = 12;
    const auto ideal = pt_state(n, 1);
    const double state_xeb = [&] {
        double s = 0;
        for (double p : ideal) s += p * p;
        return std::ldexp(s, n) - 1.0;
    }();

    const auto honest = draw(ideal, ideal, n, 40000, 2);
    const auto est = linear_xeb(honest);
    CHECK(std::abs(est.value - state_xeb) < 3.5 * est.stderr_mean);
    CHECK(std::abs(est.value - 1.0) < 0.1);

    const auto spoofless = draw(uniform_dist(n), ideal, n, 40000, 3);
    const auto zero = linear_xeb(spoofless);
    CHECK(std::abs(zero.value) < 3.5 * zero.stderr_mean);

    // depolarized-fraction model with fidelity phi
    const double phi = 0.37;
    std::vector<double> mix(ideal.size());
    for (std::size_t i = 0; i < mix.size(); ++i)
        mix[i] = phi * ideal[i] + (1.0 - phi) / double(mix.size());
    const auto mixed = draw(mix, ideal, n, 60000, 4);
    const auto phi_est = linear_xeb(mixed);
    CHECK(std::abs(phi_est.value - phi * state_xeb) < 3.5 * phi_est.stderr_mean);
}

TEST_CASE("log XEB convention: 0 on uniform, 1 on ideal") {
    const int n = 12;
    const auto ideal = pt_state(n, 7);
    const auto honest = log_xeb(draw(ideal, ideal, n, 60000, 8));
    CHECK(std::abs(honest.value - 1.0) < 4.0 * honest.stderr_mean + 0.01);
    const auto uniform = log_xeb(draw(uniform_dist(n), ideal, n, 60000, 9));
    CHECK(std::abs(uniform.value) < 4.0 * uniform.stderr_mean + 0.01);

    SampleSet zero;
    zero.n = 2;
    zero.bitstrings = {0};
    zero.probs = {0.0};
    CHECK_THROWS_AS((void)log_xeb(zero), std::runtime_error);
}

TEST_CASE("tXEB closed-form variance table") {
    CHECK(std::abs(txeb_variance_f0(10.0) - 1.00557) < 5e-6);
    CHECK(std::abs(txeb_variance_f0(7.0) - 1.06288) < 5e-6);
    CHECK(std::abs(txeb_variance_f0(5.0) - 1.32601) < 5e-6);
    CHECK(std::abs(txeb_variance_f0(4.0) - 1.84472) < 5e-6);
    CHECK(std::abs(txeb_variance_f0(3.0) - 4.11632) < 5e-6);
    CHECK(std::abs(txeb_variance_f0(2.5) - 10.144) < 5e-4);
    CHECK(std::abs(txeb_variance_f0(2.0) - 105.982) < 5e-3);
}

TEST_CASE("tXEB at F = 0: Monte-Carlo variance matches the closed form") {
    const int n = 16;
    const auto ideal = pt_state(n, 21);
    const auto samples = draw(uniform_dist(n), ideal, n, 1000000, 22);
    const auto res = truncated_xeb(samples, TxebParams{4.0});
    CHECK(std::abs(res.fidelity) < 4.0 * res.stderr_f);
    const double mc_var = res.stderr_f * res.stderr_f * double(res.count);
    CHECK(std::abs(mc_var / txeb_variance_f0(4.0) - 1.0) < 0.05);
}

TEST_CASE("tXEB large-t limit reduces to the linear estimator") {
    const int n = 12;
    const auto ideal = pt_state(n, 31);
    const auto samples = draw(ideal, ideal, n, 50000, 32);
    const auto lin = linear_xeb(samples);
    const auto trunc = truncated_xeb(samples, TxebParams{30.0});
    CHECK(trunc.fidelity ==
          doctest::Approx(lin.value).epsilon(std::max(1e-9, 3 * lin.stderr_mean)));
    // synthetic: tXEB mean of 1.5 maps to F = 0.5 as t -> infinity
    const double t = 30.0;
    const double f = (1.5 - 1.0 + std::exp(-t) * (1.0 + t)) /
                     (1.0 - std::exp(-t) * (1.0 + t + t * t));
    CHECK(f == doctest::Approx(0.5).epsilon(1e-9));

    CHECK_THROWS_AS((void)truncated_xeb(samples, TxebParams{1.5}), std::invalid_argument);
    CHECK(truncated_xeb(samples, TxebParams{1.9}).low_t_warning);
}

TEST_CASE("collision statistics closed forms") {
    const double d_dim = std::exp2(16);
    auto st = collision_stats(d_dim, d_dim);  // b = 1
    CHECK(st.m_c[0] == doctest::Approx(d_dim / 4.0));
    CHECK(st.m_unique == doctest::Approx(d_dim / 2.0));

    // b -> 0: A_1 -> 2/D, the Porter-Thomas mean of observed strings
    auto small = collision_stats(8.0, d_dim, 3);
    CHECK(small.a_c[0] == doctest::Approx(2.0 / d_dim).epsilon(1e-3));

    // default c_max stops once M_c < 1e-3
    CHECK(st.m_c.back() < 1e-3);
    CHECK(st.m_c[st.m_c.size() - 2] >= 1e-3);
}

TEST_CASE("collision profile against uniform Monte-Carlo") {
    const int n = 14;
    const double d_dim = std::exp2(n);
    const std::size_t beta = std::size_t(d_dim);
    const int trials = 20;
    double frac_once = 0;
    Rng rng(77);
    std::vector<std::uint16_t> counts(static_cast<std::size_t>(d_dim));
    for (int t = 0; t < trials; ++t) {
        std::fill(counts.begin(), counts.end(), 0);
        for (std::size_t i = 0; i < beta; ++i) counts[rng.next_below(beta)]++;
        std::size_t once = 0;
        for (auto c : counts) once += c == 1;
        frac_once += double(once) / d_dim;
    }
    frac_once /= trials;
    CHECK(std::abs(frac_once - 0.25) < 0.005);
}

TEST_CASE("unique-sample XEB shift") {
    CHECK(unique_sample_xeb_shift(0.0001, std::exp2(16)) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(unique_sample_xeb_shift(std::exp2(16), std::exp2(16)) == doctest::Approx(0.5));
    CHECK(postselection_xeb_bias(2, 100, 1e6) == doctest::Approx(6.0 * 4 * 100 / 1e6));

    // Monte-Carlo: dedupe a beta = D sample of a Porter-Thomas state
    const int n = 14;
    const auto ideal = pt_state(n, 55);
    const auto samples = draw(ideal, ideal, n, std::size_t(std::exp2(n)), 56);
    std::map<std::uint64_t, double> unique;
    for (std::size_t i = 0; i < samples.bitstrings.size(); ++i)
        unique[samples.bitstrings[i]] = samples.probs[i];
    double xeb_u = 0;
    for (const auto& [bits, p] : unique) xeb_u += std::exp2(n) * p - 1.0;
    xeb_u /= double(unique.size());
    CHECK(std::abs(xeb_u - 0.5) < 0.02);
}

TEST_CASE("hamming collision probability") {
    const double ph = hamming_collision_probability(70, 15);
    CHECK(std::abs(ph - 8.26e-7) < 0.005e-7);
    // readout bias only increases it
    CHECK(hamming_collision_probability(70, 15, 0.1) > ph);
    CHECK(hamming_collision_probability(70, 15, -0.1) > ph);
}

TEST_CASE("hamming filter keeps no close pairs and threshold n keeps one") {
    const int n = 16;
    const auto ideal = pt_state(n, 61);
    auto samples = draw(ideal, ideal, n, 400, 62);
    HammingFilterParams params;
    params.threshold = 3;
    params.bootstrap_rounds = 25;
    params.seed = 5;
    const auto res = hamming_filter(samples, params);
    CHECK(res.kept.size() == 25);
    for (const auto& round : res.kept) {
        for (std::size_t i = 0; i < round.size(); ++i)
            for (std::size_t j = i + 1; j < round.size(); ++j) {
                const auto d = std::popcount(samples.bitstrings[round[i]] ^
                                             samples.bitstrings[round[j]]);
                CHECK(d > params.threshold);
            }
    }
    params.threshold = n;
    const auto all = hamming_filter(samples, params);
    CHECK(all.kept.front().size() == 1);
}

TEST_CASE("porter-thomas checks") {
    const int n = 12;
    const auto ideal = pt_state(n, 71);

    // ideal sampler: p-values should not be extreme, and spread over trials
    std::vector<double> pvals;
    for (int t = 0; t < 40; ++t)
        pvals.push_back(porter_thomas_checks(draw(ideal, ideal, n, 4000, 100 + t)).ks_pvalue);
    std::sort(pvals.begin(), pvals.end());
    CHECK(pvals.front() > 1e-4);
    CHECK(pvals.back() > 0.5);
    const double median = pvals[pvals.size() / 2];
    CHECK(median > 0.05);
    CHECK(median < 0.995);

    // all-equal probabilities are rejected outright
    SampleSet flat;
    flat.n = n;
    for (int i = 0; i < 3000; ++i) {
        flat.bitstrings.push_back(std::uint64_t(i));
        flat.probs.push_back(std::ldexp(1.0, -n));
    }
    CHECK(porter_thomas_checks(flat).ks_pvalue < 1e-6);

    // fidelity mixture: mean D p = 1 + phi
    const double phi = 0.42;
    std::vector<double> mix(ideal.size());
    for (std::size_t i = 0; i < mix.size(); ++i)
        mix[i] = phi * ideal[i] + (1.0 - phi) / double(mix.size());
    const auto rep = porter_thomas_checks(draw(mix, ideal, n, 200000, 141));
    CHECK(std::abs(rep.mean_dp - (1.0 + phi)) < 0.02);
}

TEST_CASE("estimator consistency on ideal samples") {
    const int n = 12;
    const auto ideal = pt_state(n, 81);
    const auto samples = draw(ideal, ideal, n, 60000, 82);
    const auto lin = linear_xeb(samples);
    const auto tx = truncated_xeb(samples, TxebParams{30.0});
    const double combined = std::sqrt(lin.stderr_mean * lin.stderr_mean + tx.stderr_f * tx.stderr_f);
    CHECK(std::abs(lin.value - tx.fidelity) < std::max(3.0 * combined, 1e-9));
}
