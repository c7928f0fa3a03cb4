#include <doctest.h>

#include <cmath>
#include <set>

#include "phaselab/extractor.hpp"

using namespace phaselab;
using namespace phaselab::extractor;

namespace {

using u128 = unsigned __int128;

// full multiplicative-order check: a * a^(2^w - 2) == 1 exercises the field
bool has_inverse(const GF2Ext& f, u128 a) {
    u128 acc = 1, base = a;
    // exponent 2^w - 2 = 111...10 in binary (w-1 ones then a zero)
    for (int bit = 0; bit < f.width(); ++bit) {
        if (bit > 0) acc = f.mul(acc, base);
        base = f.mul(base, base);
    }
    return f.mul(acc, a) == 1;
}

}  // namespace

TEST_CASE("field arithmetic over several widths") {
    for (int w : {8, 16, 24, 32, 48, 63, 81, 100}) {
        GF2Ext f(w);
        Rng rng(w);
        const u128 mask = (w == 128) ? ~u128(0) : ((u128(1) << w) - 1);
        for (int trial = 0; trial < 20; ++trial) {
            u128 a = (u128(rng.next_u64()) << 64 | rng.next_u64()) & mask;
            u128 b = (u128(rng.next_u64()) << 64 | rng.next_u64()) & mask;
            u128 c = (u128(rng.next_u64()) << 64 | rng.next_u64()) & mask;
            if (a == 0) a = 1;
            CHECK(f.mul(a, b) == f.mul(b, a));
            CHECK(f.mul(a, f.mul(b, c)) == f.mul(f.mul(a, b), c));
            CHECK(f.mul(a, b ^ c) == (f.mul(a, b) ^ f.mul(a, c)));
            CHECK(f.mul(a, 1) == a);
        }
        CHECK(has_inverse(f, 2));  // x has an inverse only in a field
        CHECK(has_inverse(f, 3));
    }
}

TEST_CASE("weak design: set sizes, range and the 2e overlap bound") {
    for (const auto& [t, m] : std::vector<std::pair<std::size_t, std::size_t>>{
             {20, 200}, {34, 500}, {162, 300}}) {
        const auto design = WeakDesign::plan(t, m);
        CHECK(design.q >= t);
        std::vector<std::vector<std::uint32_t>> sets(m);
        std::vector<std::uint32_t> idx;
        for (std::size_t i = 0; i < m; ++i) {
            design.set_indices(i, idx);
            CHECK(idx.size() == t);
            std::set<std::uint32_t> uniq(idx.begin(), idx.end());
            CHECK(uniq.size() == t);
            for (auto v : uniq) CHECK(v < design.seed_bits());
            sets[i].assign(idx.begin(), idx.end());
            std::sort(sets[i].begin(), sets[i].end());
        }
        const double r = WeakDesign::overlap_parameter();
        for (std::size_t i = 1; i < m; ++i) {
            double total = 0;
            for (std::size_t j = 0; j < i; ++j) {
                std::size_t inter = 0;
                std::size_t a = 0, b = 0;
                while (a < t && b < t) {
                    if (sets[i][a] < sets[j][b]) ++a;
                    else if (sets[i][a] > sets[j][b]) ++b;
                    else { ++inter; ++a; ++b; }
                }
                total += std::exp2(double(inter));
            }
            CHECK(total <= r * double(i) + 1e-9);
        }
    }
}

TEST_CASE("plan arithmetic for the benchmark setting") {
    const auto plan = plan_trevisan(std::size_t(1) << 15, 4096, 1e-6);
    CHECK(plan.eps1 == doctest::Approx(1e-6 / 4096.0));
    // w = ceil(log2 n + 2 log2(2 / eps1))
    const double w_exact = 15.0 + 2.0 * std::log2(2.0 / plan.eps1);
    CHECK(plan.field_w == int(std::ceil(w_exact)));
    CHECK(plan.design.t == 2 * std::size_t(plan.field_w));
    CHECK(plan.seed_bits() == plan.design.q * plan.design.q);
    CHECK(plan.entropy_required_bits ==
          doctest::Approx(2.0 * 2.71828182845904523536 * 4096.0 +
                          4.0 * std::log2(1.0 / plan.eps1) + 6.0));
}

TEST_CASE("determinism, output length, seed sensitivity") {
    Rng rng(11);
    const std::size_t n = 1 << 12;
    const auto input = BitVec::random(n, rng);
    const auto plan = plan_trevisan(n, 256, 1e-4);
    const auto seed = BitVec::random(plan.seed_bits(), rng);
    const auto out1 = trevisan_extract(input, plan, seed);
    const auto out2 = trevisan_extract(input, plan, seed);
    CHECK(out1.nbits == 256);
    CHECK(out1 == out2);

    auto seed2 = seed;
    seed2.set(0, 1 - seed2.get(0));
    CHECK(trevisan_extract(input, plan, seed2) != out1);

    auto input2 = input;
    input2.set(5, 1 - input2.get(5));
    CHECK(trevisan_extract(input2, plan, seed) != out1);

    BitVec short_seed = BitVec::zeros(plan.seed_bits() - 1);
    CHECK_THROWS_AS((void)trevisan_extract(input, plan, short_seed), std::invalid_argument);
    CHECK_THROWS_AS((void)trevisan_extract(input, plan, seed, 10.0), std::runtime_error);
}

TEST_CASE("4096-bit extraction") {
    Rng rng(21);
    const std::size_t n = 1 << 15;
    const auto input = BitVec::random(n, rng);
    const auto plan = plan_trevisan(n, 4096, 1e-6);
    CHECK(plan.entropy_required_bits < double(n));
    const auto seed = BitVec::random(plan.seed_bits(), rng);
    const auto out = trevisan_extract(input, plan, seed, double(n));
    CHECK(out.nbits == 4096);
    // sanity: output is not constant
    std::size_t ones = 0;
    for (std::size_t i = 0; i < out.nbits; ++i) ones += std::size_t(out.get(i));
    CHECK(ones > 1700);
    CHECK(ones < 2400);
}

TEST_CASE("one-bit extractor battery at full entropy") {
    // one full-entropy input, 10^4 fresh seeds, 1% significance thresholds
    Rng rng(31);
    const std::size_t n = 1 << 10;
    const auto input = BitVec::random(n, rng);
    const GF2Ext field(24);
    const std::size_t l = (n + 23) / 24;
    const int k = 10000;
    std::vector<int> bits(k);
    for (int i = 0; i < k; ++i) {
        const auto seed = BitVec::random(48, rng);
        bits[i] = one_bit_extract(input, field, l, seed);
    }
    // frequency test
    double ones = 0;
    for (int b : bits) ones += b;
    const double z_freq = std::abs(ones - k / 2.0) / std::sqrt(k / 4.0);
    CHECK(z_freq < 2.5758);  // 1% two-sided

    // runs test (Wald-Wolfowitz)
    int runs = 1;
    for (int i = 1; i < k; ++i) runs += bits[i] != bits[i - 1];
    const double pi = ones / k;
    const double expected = 2.0 * k * pi * (1 - pi) + 1;
    const double var = 2.0 * k * pi * (1 - pi) * (2.0 * k * pi * (1 - pi) - 1) / (k - 1);
    CHECK(std::abs(runs - expected) / std::sqrt(var) < 2.5758);

    // serial (overlapping pairs) chi-square, 3 dof at 1%: 11.345
    double c[2][2] = {{0, 0}, {0, 0}};
    for (int i = 0; i + 1 < k; ++i) c[bits[i]][bits[i + 1]] += 1;
    double chi2 = 0;
    const double e = (k - 1) / 4.0;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) chi2 += (c[a][b] - e) * (c[a][b] - e) / e;
    CHECK(chi2 < 11.345);
}

TEST_CASE("composition accounting is exact") {
    CompositionPlan plan;
    plan.k_bits = 1000;
    plan.eps_base = 1e-8;
    plan.m = 64;

    plan.rounds = 0;
    const auto same = compose_params(plan);
    CHECK(same.k_bits == doctest::Approx(1000.0));
    CHECK(same.eps == doctest::Approx(1e-8));
    CHECK(same.m_total == 64);

    plan.rounds = 1;
    plan.eps_i = {1e-9};
    const auto once = compose_params(plan);
    CHECK(once.k_bits == doctest::Approx(1000.0 + 64.0 + std::log2(1e9)));
    CHECK(once.eps == doctest::Approx(2e-8 + 1e-9));
    CHECK(once.m_total == 128);

    plan.rounds = 2;
    plan.eps_i = {1e-9, 1e-10};
    const auto twice = compose_params(plan);
    CHECK(twice.m_total == 256);
    CHECK(twice.k_bits ==
          doctest::Approx(1000.0 + 3 * 64.0 + std::log2(1e9) + std::log2(1e10)));
    CHECK(twice.eps == doctest::Approx(4e-8 + 2e-9 + 1e-10));

    plan.eps_i = {1e-9};
    CHECK_THROWS_AS((void)compose_params(plan), std::invalid_argument);
}

TEST_CASE("composed extraction concatenates base outputs") {
    Rng rng(41);
    const std::size_t n = 1 << 11;
    const auto input = BitVec::random(n, rng);
    const auto base = plan_trevisan(n, 32, 1e-3);
    const auto seed = BitVec::random(4 * base.seed_bits(), rng);
    const auto full = composed_extract(input, base, 2, seed);
    CHECK(full.nbits == 4 * 32);
    for (std::size_t c = 0; c < 4; ++c) {
        BitVec slice = BitVec::zeros(base.seed_bits());
        for (std::size_t i = 0; i < slice.nbits; ++i)
            slice.set(i, seed.get(c * base.seed_bits() + i));
        const auto part = trevisan_extract(input, base, slice);
        for (std::size_t i = 0; i < part.nbits; ++i) CHECK(full.get(c * 32 + i) == part.get(i));
    }
}

TEST_CASE("pipeline budgets the output from the entropy bound") {
    SampleSet samples;
    samples.n = 16;
    Rng rng(51);
    for (int i = 0; i < 2000; ++i) {
        samples.bitstrings.push_back(rng.next_u64() & 0xFFFF);
        samples.probs.push_back(1.0 / 65536.0);
    }
    const double bound = 9000.0;
    const auto result = pipeline(samples, bound, 1e-6, 61);
    CHECK(result.bits.nbits > 1000);
    CHECK(result.bits.nbits < 2000);
    CHECK(result.audit_json.find("entropy_required_bits") != std::string::npos);

    // a smaller certified bound shrinks the output
    const auto smaller = pipeline(samples, 4000.0, 1e-6, 61);
    CHECK(smaller.bits.nbits < result.bits.nbits);

    CHECK_THROWS_AS((void)pipeline(samples, 0.0, 1e-6, 61), std::runtime_error);
    CHECK_THROWS_AS((void)pipeline(samples, 80.0, 1e-6, 61), std::runtime_error);
}
