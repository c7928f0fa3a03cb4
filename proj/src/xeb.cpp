#include "phaselab/xeb.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "phaselab/rng.hpp"

namespace phaselab::xeb {

namespace {

constexpr double kEulerGamma = 0.57721566490153286060651209008240243;

Estimate mean_stderr(const std::vector<double>& xs) {
    Estimate e;
    e.count = xs.size();
    if (xs.empty()) throw std::invalid_argument("empty sample");
    double s = 0;
    for (double x : xs) s += x;
    e.value = s / double(xs.size());
    double ss = 0;
    for (double x : xs) ss += (x - e.value) * (x - e.value);
    e.stderr_mean = xs.size() > 1 ? std::sqrt(ss / double(xs.size() - 1) / double(xs.size())) : 0.0;
    return e;
}

}  // namespace

Estimate linear_xeb(const SampleSet& samples) {
    const double d_dim = std::ldexp(1.0, samples.n);
    std::vector<double> xs(samples.probs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = d_dim * samples.probs[i] - 1.0;
    return mean_stderr(xs);
}

Estimate log_xeb(const SampleSet& samples) {
    const double d_dim = std::ldexp(1.0, samples.n);
    std::vector<double> xs(samples.probs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (samples.probs[i] <= 0.0)
            throw std::runtime_error("log_xeb: zero probability in sample");
        xs[i] = std::log(d_dim * samples.probs[i]) + kEulerGamma;
    }
    return mean_stderr(xs);
}

double txeb_variance_f0(double t) {
    const double emt = std::exp(-t);
    const double denom = 1.0 - emt * (1.0 + t + t * t);
    const double numer = 1.0 - emt * t * t - emt * emt * (1.0 + 2.0 * t + t * t);
    return numer / (denom * denom);
}

TxebResult truncated_xeb(const SampleSet& samples, const TxebParams& params) {
    const double t = params.t;
    const double emt = std::exp(-t);
    const double denom = 1.0 - emt * (1.0 + t + t * t);
    if (denom <= 0.0)
        throw std::invalid_argument("truncated_xeb: t below denominator-positivity threshold");
    const double d_dim = std::ldexp(1.0, samples.n);
    std::vector<double> fs(samples.probs.size());
    double txeb_sum = 0;
    for (std::size_t i = 0; i < fs.size(); ++i) {
        const double x = d_dim * samples.probs[i];
        const double ft = x <= t ? x : 0.0;
        txeb_sum += ft;
        fs[i] = (ft - 1.0 + emt * (1.0 + t)) / denom;
    }
    const auto est = mean_stderr(fs);
    TxebResult out;
    out.txeb = txeb_sum / double(fs.size());
    out.fidelity = est.value;
    out.stderr_f = est.stderr_mean;
    out.var_f0 = txeb_variance_f0(t);
    out.low_t_warning = t < 2.0;
    out.count = fs.size();
    return out;
}

CollisionStats collision_stats(double beta, double d_dim, int c_max) {
    if (beta <= 0 || d_dim <= 0) throw std::invalid_argument("collision_stats: beta, D > 0");
    CollisionStats st;
    st.b = beta / d_dim;
    st.m_unique = d_dim * beta / (d_dim + beta);
    const int cap = c_max > 0 ? c_max : 64;
    for (int c = 1; c <= cap; ++c) {
        const double mc = d_dim * std::pow(st.b, c) / std::pow(1.0 + st.b, c + 1);
        st.m_c.push_back(mc);
        st.a_c.push_back((c + 1) / (d_dim * (1.0 + st.b)));
        if (c_max == 0 && mc < 1e-3) break;
    }
    st.c_max = int(st.m_c.size());
    return st;
}

double unique_sample_xeb_shift(double beta, double d_dim) {
    return 1.0 / (1.0 + beta / d_dim);
}

double postselection_xeb_bias(double s, double q, double d_dim) {
    return 6.0 * s * s * q / d_dim;
}

HammingFilterResult hamming_filter(const SampleSet& samples, const HammingFilterParams& params) {
    if (params.threshold < 0 || params.threshold > samples.n)
        throw std::invalid_argument("hamming_filter: threshold out of range");
    if (samples.bitstrings.empty()) throw std::invalid_argument("hamming_filter: empty sample");
    const double d_dim = std::ldexp(1.0, samples.n);
    HammingFilterResult out;
    Rng root(params.seed);
    for (int round = 0; round < params.bootstrap_rounds; ++round) {
        std::vector<std::uint32_t> order(samples.bitstrings.size());
        std::iota(order.begin(), order.end(), 0);
        Rng rng = root.substream(round);
        for (std::size_t i = order.size(); i > 1; --i)
            std::swap(order[i - 1], order[rng.next_below(i)]);
        std::vector<std::uint32_t> kept;
        std::vector<std::uint64_t> kept_bits;
        for (const auto idx : order) {
            const std::uint64_t s = samples.bitstrings[idx];
            bool ok = true;
            for (const auto k : kept_bits)
                if (std::popcount(s ^ k) <= params.threshold) {
                    ok = false;
                    break;
                }
            if (ok) {
                kept.push_back(idx);
                kept_bits.push_back(s);
            }
        }
        if (kept.empty()) throw std::runtime_error("hamming_filter: empty survivor set");
        double x = 0;
        for (const auto idx : kept) x += d_dim * samples.probs[idx] - 1.0;
        out.round_xeb.push_back(x / double(kept.size()));
        out.kept.push_back(std::move(kept));
    }
    out.mean_xeb = mean_stderr(out.round_xeb);
    return out;
}

double hamming_collision_probability(int n, int threshold, double bias_b) {
    const double pb = (1.0 - bias_b) / 2.0;
    const double q = 2.0 * pb * (1.0 - pb);  // per-bit disagreement probability
    double total = 0;
    for (int c = 0; c <= threshold; ++c) {
        const double log_term = std::lgamma(n + 1.0) - std::lgamma(c + 1.0) -
                                std::lgamma(n - c + 1.0) + c * std::log(q) +
                                (n - c) * std::log1p(-q);
        total += std::exp(log_term);
    }
    return total;
}

double kolmogorov_pvalue(double stat, std::size_t count) {
    const double sqrt_k = std::sqrt(double(count));
    const double lambda = (sqrt_k + 0.12 + 0.11 / sqrt_k) * stat;
    double sum = 0;
    for (int j = 1; j <= 100; ++j) {
        const double term = 2.0 * ((j % 2) ? 1.0 : -1.0) * std::exp(-2.0 * j * j * lambda * lambda);
        sum += term;
        if (std::abs(term) < 1e-12) break;
    }
    return std::clamp(sum, 0.0, 1.0);
}

PorterThomasReport porter_thomas_checks(const SampleSet& samples) {
    const double d_dim = std::ldexp(1.0, samples.n);
    std::vector<double> xs(samples.probs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = d_dim * samples.probs[i];
    std::sort(xs.begin(), xs.end());
    PorterThomasReport rep;
    rep.mean_dp = std::accumulate(xs.begin(), xs.end(), 0.0) / double(xs.size());
    const double k = double(xs.size());
    double dmax = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double cdf = 1.0 - (1.0 + xs[i]) * std::exp(-xs[i]);
        dmax = std::max(dmax, std::abs(double(i + 1) / k - cdf));
        dmax = std::max(dmax, std::abs(cdf - double(i) / k));
    }
    rep.ks_stat = dmax;
    rep.ks_pvalue = kolmogorov_pvalue(dmax, xs.size());
    const int bins = 32;
    const double hi = std::max(8.0, xs.back());
    rep.hist_edges.resize(bins + 1);
    rep.hist_counts.assign(bins, 0.0);
    for (int b = 0; b <= bins; ++b) rep.hist_edges[b] = hi * b / bins;
    for (double x : xs) {
        const int b = std::min(bins - 1, int(x / hi * bins));
        rep.hist_counts[b] += 1.0;
    }
    return rep;
}

}  // namespace phaselab::xeb
