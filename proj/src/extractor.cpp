#include "phaselab/extractor.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

#include "phaselab/parallel.hpp"

namespace phaselab::extractor {

using u128 = unsigned __int128;

BitVec BitVec::zeros(std::size_t n) {
    BitVec v;
    v.nbits = n;
    v.words.assign((n + 63) / 64, 0);
    return v;
}

BitVec BitVec::random(std::size_t n, Rng& rng) {
    BitVec v = zeros(n);
    for (auto& w : v.words) w = rng.next_u64();
    if (n & 63) v.words.back() &= (~std::uint64_t(0)) >> (64 - (n & 63));
    return v;
}

BitVec BitVec::from_bytes(const std::vector<std::uint8_t>& bytes, std::size_t nbits) {
    if (bytes.size() * 8 < nbits) throw std::invalid_argument("from_bytes: too few bytes");
    BitVec v = zeros(nbits);
    for (std::size_t i = 0; i < nbits; ++i)
        if (bytes[i >> 3] >> (i & 7) & 1) v.set(i, 1);
    return v;
}

std::vector<std::uint8_t> BitVec::to_bytes() const {
    std::vector<std::uint8_t> out((nbits + 7) / 8, 0);
    for (std::size_t i = 0; i < nbits; ++i)
        if (get(i)) out[i >> 3] |= std::uint8_t(1) << (i & 7);
    return out;
}

namespace {

int degree_of(u128 p) {
    if (p == 0) return -1;
    const std::uint64_t hi = std::uint64_t(p >> 64);
    if (hi) return 127 - std::countl_zero(hi);
    return 63 - std::countl_zero(std::uint64_t(p));
}

// polynomial multiply mod f (f monic of degree w, tail bits in `red`)
u128 polymulmod(u128 a, u128 b, int w, u128 red) {
    u128 r = 0;
    const u128 top = u128(1) << (w - 1);
    const u128 mask = (w == 128) ? ~u128(0) : ((u128(1) << w) - 1);
    a &= mask;
    while (b) {
        if (b & 1) r ^= a;
        b >>= 1;
        const bool carry = (a & top) != 0;
        a = (a << 1) & mask;
        if (carry) a ^= red;
    }
    return r;
}

u128 poly_gcd(u128 a, u128 b) {
    while (b != 0) {
        const int db = degree_of(b);
        int da = degree_of(a);
        while (da >= db) {  // a mod b
            a ^= b << (da - db);
            da = degree_of(a);
        }
        std::swap(a, b);
    }
    return a;
}

// Rabin irreducibility for f = x^w + tail (degree w)
bool irreducible(int w, u128 tail) {
    // x^(2^w) == x mod f
    u128 r = 2;  // the polynomial x
    for (int i = 0; i < w; ++i) r = polymulmod(r, r, w, tail);
    if (r != 2) return false;
    // gcd(x^(2^(w/p)) - x, f) == 1 for every distinct prime p | w
    const u128 f = (u128(1) << w) ^ tail;
    int rem = w;
    for (int p = 2; p <= rem; ++p) {
        if (rem % p) continue;
        while (rem % p == 0) rem /= p;
        u128 y = 2;
        for (int i = 0; i < w / p; ++i) y = polymulmod(y, y, w, tail);
        if (poly_gcd(y ^ u128(2), f) != 1) return false;
    }
    return true;
}

bool is_prime(std::size_t v) {
    if (v < 2) return false;
    for (std::size_t p = 2; p * p <= v; ++p)
        if (v % p == 0) return false;
    return true;
}

std::size_t next_prime(std::size_t v) {
    while (!is_prime(v)) ++v;
    return v;
}

}  // namespace

GF2Ext::GF2Ext(int w) : w_(w), red_(0) {
    if (w < 2 || w > 120) throw std::invalid_argument("GF2Ext supports 2 <= w <= 120");
    // trinomials x^w + x^k + 1, then pentanomials, lexicographic
    for (int k = 1; k < w && red_ == 0; ++k) {
        const u128 tail = (u128(1) << k) | 1;
        if (irreducible(w, tail)) red_ = tail;
    }
    for (int a = 3; a < w && red_ == 0; ++a)
        for (int b = 2; b < a && red_ == 0; ++b)
            for (int c = 1; c < b && red_ == 0; ++c) {
                const u128 tail = (u128(1) << a) | (u128(1) << b) | (u128(1) << c) | 1;
                if (irreducible(w, tail)) red_ = tail;
            }
    if (red_ == 0) throw std::runtime_error("no low-weight irreducible polynomial found");
}

u128 GF2Ext::mul(u128 a, u128 b) const { return polymulmod(a, b, w_, red_); }

WeakDesign WeakDesign::plan(std::size_t t, std::size_t m) {
    WeakDesign d;
    d.t = t;
    d.m = m;
    d.q = next_prime(t);
    d.degree = 1;
    double count = double(d.q);
    while (count < double(m)) {
        count *= double(d.q);
        d.degree += 1;
    }
    return d;
}

void WeakDesign::set_indices(std::size_t i, std::vector<std::uint32_t>& out) const {
    out.resize(t);
    // base-q digits of i are the polynomial coefficients
    std::uint64_t digits[16];
    std::size_t rem = i;
    for (int j = 0; j < degree; ++j) {
        digits[j] = rem % q;
        rem /= q;
    }
    for (std::size_t a = 0; a < t; ++a) {
        std::uint64_t acc = 0;
        for (int j = degree - 1; j >= 0; --j) acc = (acc * a + digits[j]) % q;
        out[a] = std::uint32_t(a * q + acc);
    }
}

TrevisanPlan plan_trevisan(std::size_t input_bits, std::size_t m, double eps_total) {
    if (m < 1 || input_bits < 2) throw std::invalid_argument("plan_trevisan: bad sizes");
    if (eps_total <= 0 || eps_total >= 1) throw std::invalid_argument("plan_trevisan: bad epsilon");
    TrevisanPlan plan;
    plan.input_bits = input_bits;
    plan.m = m;
    plan.eps_total = eps_total;
    plan.eps1 = eps_total / double(m);
    plan.field_w = int(std::ceil(std::log2(double(input_bits)) + 2.0 * std::log2(2.0 / plan.eps1)));
    plan.n_coeffs = (input_bits + plan.field_w - 1) / plan.field_w;
    plan.design = WeakDesign::plan(2 * std::size_t(plan.field_w), m);
    plan.entropy_required_bits = WeakDesign::overlap_parameter() * double(m) +
                                 4.0 * std::log2(1.0 / plan.eps1) + 6.0;
    return plan;
}

int one_bit_extract(const BitVec& input, const GF2Ext& field, std::size_t n_coeffs,
                    const BitVec& seed2w) {
    const int w = field.width();
    if (seed2w.nbits != 2 * std::size_t(w)) throw std::invalid_argument("one_bit_extract: seed size");
    u128 alpha = 0, mask = 0;
    for (int i = 0; i < w; ++i) {
        if (seed2w.get(std::size_t(i))) alpha |= u128(1) << i;
        if (seed2w.get(std::size_t(w + i))) mask |= u128(1) << i;
    }
    // Horner over the input coefficients, highest first
    u128 val = 0;
    for (std::size_t j = n_coeffs; j-- > 0;) {
        u128 coeff = 0;
        const std::size_t base = j * std::size_t(w);
        for (int b = 0; b < w; ++b) {
            const std::size_t bit = base + std::size_t(b);
            if (bit < input.nbits && input.get(bit)) coeff |= u128(1) << b;
        }
        val = field.mul(val, alpha) ^ coeff;
    }
    const u128 prod = val & mask;
    const int par = (std::popcount(std::uint64_t(prod)) + std::popcount(std::uint64_t(prod >> 64))) & 1;
    return par;
}

BitVec trevisan_extract(const BitVec& input, const TrevisanPlan& plan, const BitVec& seed,
                        double claimed_entropy_bits) {
    if (input.nbits != plan.input_bits) throw std::invalid_argument("trevisan: input length mismatch");
    if (seed.nbits != plan.seed_bits()) throw std::invalid_argument("trevisan: insufficient seed");
    if (claimed_entropy_bits >= 0 && claimed_entropy_bits < plan.entropy_required_bits)
        throw std::runtime_error("trevisan: output length exceeds the entropy budget");
    const GF2Ext field(plan.field_w);
    BitVec out = BitVec::zeros(plan.m);
    const std::size_t t = plan.design.t;
    parallel_for(plan.m, [&](std::size_t i) {
        std::vector<std::uint32_t> idx;
        plan.design.set_indices(i, idx);
        BitVec slice = BitVec::zeros(t);
        for (std::size_t a = 0; a < t; ++a) slice.set(a, seed.get(idx[a]));
        if (one_bit_extract(input, field, plan.n_coeffs, slice)) out.set(i, 1);
    });
    return out;
}

ComposedParams compose_params(const CompositionPlan& plan) {
    if (plan.eps_i.size() != plan.rounds)
        throw std::invalid_argument("compose_params: need one eps_i per round");
    ComposedParams out;
    const double two_t = std::ldexp(1.0, int(plan.rounds));
    out.m_total = std::size_t(two_t) * plan.m;
    out.k_bits = plan.k_bits + (two_t - 1.0) * double(plan.m);
    out.eps = two_t * plan.eps_base;
    for (std::size_t i = 0; i < plan.rounds; ++i) {
        out.k_bits += std::log2(1.0 / plan.eps_i[i]);
        out.eps += std::ldexp(1.0, int(plan.rounds - i - 1)) * plan.eps_i[i];
    }
    return out;
}

BitVec composed_extract(const BitVec& input, const TrevisanPlan& base, std::size_t rounds,
                        const BitVec& seed) {
    const std::size_t copies = std::size_t(1) << rounds;
    if (seed.nbits != copies * base.seed_bits())
        throw std::invalid_argument("composed_extract: seed must hold 2^t base seeds");
    BitVec out = BitVec::zeros(copies * base.m);
    for (std::size_t c = 0; c < copies; ++c) {
        BitVec slice = BitVec::zeros(base.seed_bits());
        for (std::size_t i = 0; i < slice.nbits; ++i)
            slice.set(i, seed.get(c * base.seed_bits() + i));
        const BitVec part = trevisan_extract(input, base, slice);
        for (std::size_t i = 0; i < part.nbits; ++i) out.set(c * base.m + i, part.get(i));
    }
    return out;
}

PipelineResult pipeline(const SampleSet& samples, double entropy_bound_bits, double eps_total,
                        std::uint64_t seed_value, double margin_bits) {
    if (samples.bitstrings.empty()) throw std::invalid_argument("pipeline: no samples");
    if (entropy_bound_bits <= 0) throw std::runtime_error("pipeline: refusing to extract from a zero-entropy report");
    const std::size_t n_bits = samples.bitstrings.size() * std::size_t(samples.n);
    BitVec raw = BitVec::zeros(n_bits);
    for (std::size_t s = 0; s < samples.bitstrings.size(); ++s)
        for (int b = 0; b < samples.n; ++b)
            if (samples.bitstrings[s] >> b & 1) raw.set(s * std::size_t(samples.n) + std::size_t(b), 1);

    const double budget = entropy_bound_bits - margin_bits;
    // m <= (k - 4 log2(m/eps) - 6) / r, solved by fixed point
    double m_est = budget / WeakDesign::overlap_parameter();
    for (int it = 0; it < 8 && m_est >= 1; ++it)
        m_est = (budget - 4.0 * std::log2(std::max(2.0, m_est) / eps_total) - 6.0) /
                WeakDesign::overlap_parameter();
    if (!(m_est >= 1.0)) throw std::runtime_error("pipeline: entropy bound below the minimum viable output");
    const std::size_t m = std::size_t(m_est);
    const TrevisanPlan plan = plan_trevisan(n_bits, m, eps_total);
    Rng rng = Rng(seed_value).substream(0x5eed);
    const BitVec seed = BitVec::random(plan.seed_bits(), rng);
    PipelineResult out;
    out.bits = trevisan_extract(raw, plan, seed, entropy_bound_bits - margin_bits);

    nlohmann::json audit;
    audit["input_bits"] = n_bits;
    audit["entropy_bound_bits"] = entropy_bound_bits;
    audit["margin_bits"] = margin_bits;
    audit["entropy_required_bits"] = plan.entropy_required_bits;
    audit["output_bits"] = m;
    audit["eps_total"] = eps_total;
    audit["eps_per_bit"] = plan.eps1;
    audit["field_bits"] = plan.field_w;
    audit["rs_coefficients"] = plan.n_coeffs;
    audit["design_q"] = plan.design.q;
    audit["design_degree"] = plan.design.degree;
    audit["seed_bits"] = plan.seed_bits();
    audit["seed_stream"] = seed_value;
    audit["overlap_parameter"] = WeakDesign::overlap_parameter();
    out.audit_json = audit.dump(2);
    return out;
}

}  // namespace phaselab::extractor
