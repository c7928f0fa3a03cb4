#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "phaselab/rng.hpp"
#include "phaselab/statevec.hpp"

namespace phaselab::extractor {

struct BitVec {
    std::size_t nbits = 0;
    std::vector<std::uint64_t> words;

    static BitVec zeros(std::size_t n);
    static BitVec random(std::size_t n, Rng& rng);
    static BitVec from_bytes(const std::vector<std::uint8_t>& bytes, std::size_t nbits);
    std::vector<std::uint8_t> to_bytes() const;

    int get(std::size_t i) const { return int(words[i >> 6] >> (i & 63)) & 1; }
    void set(std::size_t i, int v) {
        const std::uint64_t m = std::uint64_t(1) << (i & 63);
        if (v) words[i >> 6] |= m;
        else words[i >> 6] &= ~m;
    }
    bool operator==(const BitVec&) const = default;
};

// GF(2^w), w <= 120; the reduction polynomial is the lexicographically first
// irreducible trinomial/pentanomial, found by Rabin's test at construction.
class GF2Ext {
public:
    explicit GF2Ext(int w);
    unsigned __int128 mul(unsigned __int128 a, unsigned __int128 b) const;
    int width() const { return w_; }
    unsigned __int128 modulus_tail() const { return red_; }  // bits below x^w

private:
    int w_;
    unsigned __int128 red_;
};

// Polynomial weak design over GF(q), q = first prime >= t: the i-th set is
// {a q + p_i(a) : a = 0..t-1} with p_i the base-q digit polynomial of i.
// Distinct degree-<c polynomials collide on fewer than c points, and the
// overlap parameter r = 2e is property-checked in the tests.
struct WeakDesign {
    std::size_t t = 0;       // set size (bits consumed per output bit)
    std::size_t q = 0;       // prime universe side
    std::size_t m = 0;       // number of sets
    int degree = 0;          // digit-polynomial length c, q^c >= m

    static WeakDesign plan(std::size_t t, std::size_t m);
    std::size_t seed_bits() const { return q * q; }
    void set_indices(std::size_t i, std::vector<std::uint32_t>& out) const;
    static double overlap_parameter() { return 2.0 * 2.71828182845904523536; }
};

struct TrevisanPlan {
    std::size_t input_bits = 0;
    std::size_t m = 0;            // output length
    double eps_total = 0;
    double eps1 = 0;              // per-bit error, eps_total / m
    int field_w = 0;              // ceil(log2 n + 2 log2(2/eps1))
    std::size_t n_coeffs = 0;     // ceil(n / w) Reed-Solomon coefficients
    WeakDesign design;
    // Entropy the input must carry: r m + 4 log2(1/eps1) + 6 bits.
    double entropy_required_bits = 0;

    std::size_t seed_bits() const { return design.seed_bits(); }
};

TrevisanPlan plan_trevisan(std::size_t input_bits, std::size_t m, double eps_total);

// Deterministic in (input, seed); output is exactly plan.m bits. Throws on a
// wrong seed length or when claimed_entropy_bits (if >= 0) is insufficient.
BitVec trevisan_extract(const BitVec& input, const TrevisanPlan& plan, const BitVec& seed,
                        double claimed_entropy_bits = -1.0);

// One output bit: Reed-Solomon encode the input over GF(2^w), evaluate at the
// seed point, then take the Hadamard inner product with the seed mask.
int one_bit_extract(const BitVec& input, const GF2Ext& field, std::size_t n_coeffs,
                    const BitVec& seed2w);

struct CompositionPlan {
    double k_bits = 0;      // base extractor entropy requirement
    double eps_base = 0;    // base extractor error
    std::size_t m = 0;      // base output length
    std::size_t rounds = 0; // t: output doubles per round
    std::vector<double> eps_i;  // one entropy-splitting error per round
};

struct ComposedParams {
    double k_bits = 0;
    double eps = 0;
    std::size_t m_total = 0;
};

// Output-extension accounting: t rounds turn a (k, eps) m-bit extractor into
// a (k + (2^t - 1) m + sum log2(1/eps_i), 2^t eps + sum 2^{t-i} eps_i)
// extractor with 2^t m bits.
ComposedParams compose_params(const CompositionPlan& plan);

// Runs the base extractor 2^rounds times on fresh seed slices.
BitVec composed_extract(const BitVec& input, const TrevisanPlan& base, std::size_t rounds,
                        const BitVec& seed);

struct PipelineResult {
    BitVec bits;
    std::string audit_json;
};

// Raw sample bits -> extractor, with the output length budgeted from the
// entropy bound minus a safety margin. The seed is drawn from the explicit
// Rng stream `seed_value`.
PipelineResult pipeline(const SampleSet& samples, double entropy_bound_bits, double eps_total,
                        std::uint64_t seed_value, double margin_bits = 64.0);

}  // namespace phaselab::extractor
