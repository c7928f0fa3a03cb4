#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <numeric>

#include "phaselab/statevec.hpp"

using namespace phaselab;

namespace {

CircuitSpec chain_spec(int n, int d, GateEnsemble ens, std::uint64_t seed, bool final_layer = false) {
    CircuitSpec s;
    s.n = n;
    s.topology = Topology::chain1d;
    s.pattern = {"A", "B"};
    s.depth_cycles = d;
    s.gate_ensemble = ens;
    s.final_1q_layer = final_layer;
    s.seed = seed;
    return s;
}

}  // namespace

TEST_CASE("empty circuit leaves |0...0>") {
    Circuit c;
    c.n = 3;
    const auto psi = run_ideal(c);
    CHECK(std::abs(psi.amp[0] - cplx(1, 0)) < 1e-15);
    CHECK(psi.norm2() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("sqrt(X) splits |0> evenly; iSWAP moves |01> to |10> up to phase i") {
    StateVector psi = StateVector::zero_state(1);
    apply_1q(psi, 0, sqrt_x());
    auto p = probabilities(psi);
    CHECK(p[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(p[1] == doctest::Approx(0.5).epsilon(1e-12));

    StateVector two = StateVector::zero_state(2);
    apply_1q(two, 0, Mat2{cplx(0, 0), cplx(1, 0), cplx(1, 0), cplx(0, 0)});  // X on qubit 0
    apply_gate_2q(two, 0, 1, iswap());  // |01> in |q1 q0| reading: q0 = 1
    const auto probs = probabilities(two);
    CHECK(probs[2] == doctest::Approx(1.0).epsilon(1e-12));  // index 2 = q1 set
    CHECK(std::abs(two.amp[2].real()) < 1e-12);              // amplitude is +-i
    CHECK(std::abs(std::abs(two.amp[2].imag()) - 1.0) < 1e-12);
}

TEST_CASE("norm is preserved through a deep random circuit") {
    const auto c = build_circuit(chain_spec(10, 30, GateEnsemble::haar_1q, 5));
    const auto psi = run_ideal(c);
    CHECK(std::abs(psi.norm2() - 1.0) < 1e-10);
}

TEST_CASE("density matrix: p1=p2=0 reproduces the pure state") {
    const auto c = build_circuit(chain_spec(5, 6, GateEnsemble::discrete_zxz, 3));
    const auto psi = run_ideal(c);
    const auto rho = run_depolarizing(c, NoiseModel{});
    CHECK(rho.trace_real() == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(state_fidelity(rho, psi) == doctest::Approx(1.0).epsilon(1e-9));
    // Hermiticity
    const std::size_t d = std::size_t(1) << rho.n;
    for (std::size_t r = 0; r < d; ++r)
        for (std::size_t cidx = r; cidx < d; ++cidx)
            CHECK(std::abs(rho.rho[r * d + cidx] - std::conj(rho.rho[cidx * d + r])) < 1e-10);
}

TEST_CASE("fully depolarized state has XEB 0 against any circuit") {
    const auto c = build_circuit(chain_spec(4, 5, GateEnsemble::haar_1q, 9));
    const auto ideal = probabilities(run_ideal(c));
    DensityMatrix rho = DensityMatrix::zero_state(4);
    const std::size_t d = 16;
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) rho.rho[i * d + j] = i == j ? cplx(1.0 / d, 0) : cplx(0, 0);
    for (const auto& g : c.gates) {
        if (g.kind == Gate::Kind::one_qubit) apply_1q(rho, g.qubits[0], g.u1);
        else apply_2q(rho, g.qubits[0], g.qubits[1], g.u2);
    }
    CHECK(std::abs(xeb_between(rho.diagonal(), ideal)) < 1e-9);
}

TEST_CASE("depolarizing channels match their Kraus form") {
    // random-ish density matrix from a shallow circuit
    const auto c = build_circuit(chain_spec(3, 4, GateEnsemble::haar_1q, 21));
    const auto rho0 = DensityMatrix::pure(run_ideal(c));
    const std::size_t d = 8;

    const Mat2 X{cplx(0, 0), cplx(1, 0), cplx(1, 0), cplx(0, 0)};
    const Mat2 Y{cplx(0, 0), cplx(0, -1), cplx(0, 1), cplx(0, 0)};
    const Mat2 Z{cplx(1, 0), cplx(0, 0), cplx(0, 0), cplx(-1, 0)};

    SUBCASE("single qubit") {
        const double p1 = 0.13;
        auto fast = rho0;
        depolarize_1q(fast, 1, p1);
        // Kraus oracle: (1-lam) rho + lam/3 sum_P P rho P
        const double lam = 3.0 / 4.0 * (1.0 - std::exp(-4.0 * p1 / 3.0));
        DensityMatrix acc = rho0;
        for (auto& v : acc.rho) v *= (1.0 - lam);
        for (const auto& P : {X, Y, Z}) {
            auto t = rho0;
            apply_1q(t, 1, P);
            for (std::size_t i = 0; i < t.rho.size(); ++i) acc.rho[i] += lam / 3.0 * t.rho[i];
        }
        for (std::size_t i = 0; i < d * d; ++i) CHECK(std::abs(fast.rho[i] - acc.rho[i]) < 1e-12);
    }

    SUBCASE("two qubit") {
        const double p2 = 0.09;
        auto fast = rho0;
        depolarize_2q(fast, 0, 2, p2);
        const double lam = 15.0 / 16.0 * (1.0 - std::exp(-16.0 * p2 / 15.0));
        DensityMatrix acc = rho0;
        for (auto& v : acc.rho) v *= (1.0 - lam);
        const Mat2 I2{cplx(1, 0), cplx(0, 0), cplx(0, 0), cplx(1, 0)};
        const Mat2 paulis[4] = {I2, X, Y, Z};
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) {
                if (a == 0 && b == 0) continue;
                auto t = rho0;
                apply_1q(t, 0, paulis[a]);
                apply_1q(t, 2, paulis[b]);
                for (std::size_t i = 0; i < t.rho.size(); ++i) acc.rho[i] += lam / 15.0 * t.rho[i];
            }
        for (std::size_t i = 0; i < d * d; ++i) CHECK(std::abs(fast.rho[i] - acc.rho[i]) < 1e-12);
    }
}

TEST_CASE("digital error model: noisy XEB tracks the per-event fidelity product") {
    const int n = 4, depth = 8, instances = 60;
    const double p1 = 0.006;
    double mean = 0;
    for (int i = 0; i < instances; ++i) {
        auto spec = chain_spec(n, depth, GateEnsemble::haar_1q, 1000 + i, true);
        const auto c = build_circuit(spec);
        NoiseModel noise;
        noise.p1 = p1;
        const auto rho = run_depolarizing(c, noise);
        auto ideal_spec = spec;
        const auto ideal = probabilities(run_ideal(build_circuit(ideal_spec)));
        mean += xeb_between(rho.diagonal(), ideal);
    }
    mean /= instances;
    const double f1 = std::exp(-4.0 * p1 / 3.0);
    const double pred = std::pow(f1, double(n * depth));
    CHECK(std::abs(mean / pred - 1.0) < 0.2);
}

TEST_CASE("sampling: deterministic state, marginals, Porter-Thomas mean") {
    StateVector zz = StateVector::zero_state(2);
    auto fixed = sample_bitstrings(zz, 5, 4);
    for (auto s : fixed.bitstrings) CHECK(s == 0);

    // uniform state marginals
    StateVector psi = StateVector::zero_state(10);
    for (int q = 0; q < 10; ++q) apply_1q(psi, q, sqrt_x());
    const std::size_t k = 200000;
    auto samples = sample_bitstrings(psi, k, 11);
    for (int q = 0; q < 10; ++q) {
        std::size_t ones = 0;
        for (auto s : samples.bitstrings) ones += (s >> q) & 1;
        CHECK(std::abs(double(ones) - k / 2.0) < 3.0 * std::sqrt(k * 0.25));
    }

    // deep random circuit: scaled sampled probabilities have mean ~ 2
    const auto c = build_circuit(chain_spec(12, 24, GateEnsemble::discrete_zxz, 77));
    const auto deep = run_ideal(c);
    auto pt = sample_bitstrings(deep, 200000, 13);
    double mean_dp = 0;
    for (double p : pt.probs) mean_dp += 4096.0 * p;
    mean_dp /= double(pt.probs.size());
    CHECK(mean_dp == doctest::Approx(2.0).epsilon(0.03));
}

TEST_CASE("noise-free deep-circuit XEB approaches C(n)") {
    const int n = 10;
    double mean = 0;
    const int instances = 8;
    for (int i = 0; i < instances; ++i) {
        const auto c = build_circuit(chain_spec(n, 25, GateEnsemble::haar_1q, 300 + i));
        const auto p = probabilities(run_ideal(c));
        mean += xeb_between(p, p);
    }
    mean /= instances;
    const double cn = (1.0 - std::ldexp(1.0, -n)) / (1.0 + std::ldexp(1.0, -n));
    CHECK(mean == doctest::Approx(cn).epsilon(0.05));
}

TEST_CASE("trajectory unravelling agrees with the density matrix") {
    const auto spec = chain_spec(6, 8, GateEnsemble::discrete_zxz, 8, true);
    const auto c = build_circuit(spec);
    NoiseModel noise;
    noise.p2 = 0.01;
    noise.p1 = 0.004;
    const auto ideal = probabilities(run_ideal(c));
    const auto rho_xeb = xeb_between(run_depolarizing(c, noise).diagonal(), ideal);
    const int traj = 300;
    double mean = 0, sq = 0;
    for (int t = 0; t < traj; ++t) {
        const auto psi = run_trajectory(c, noise, 5000 + t);
        const double x = xeb_between(probabilities(psi), ideal);
        mean += x;
        sq += x * x;
    }
    mean /= traj;
    const double se = std::sqrt((sq / traj - mean * mean) / traj);
    CHECK(std::abs(mean - rho_xeb) < 4.0 * se + 1e-9);
}

TEST_CASE("state and sample file round-trips") {
    const auto c = build_circuit(chain_spec(5, 6, GateEnsemble::haar_1q, 31));
    const auto psi = run_ideal(c);
    const auto path = std::string("statevec_roundtrip.phsv");
    write_state(psi, path);
    const auto back = read_state(path);
    REQUIRE(back.amp.size() == psi.amp.size());
    for (std::size_t i = 0; i < psi.amp.size(); ++i) CHECK(psi.amp[i] == back.amp[i]);
    std::remove(path.c_str());

    auto samples = sample_bitstrings(psi, 64, 1);
    write_samples(samples, "samples_roundtrip.hex");
    const auto strings = read_samples("samples_roundtrip.hex", 5);
    CHECK(strings == samples.bitstrings);
    std::remove("samples_roundtrip.hex");
}

TEST_CASE("dimension overflow is rejected") {
    Circuit c;
    c.n = 30;
    CHECK_THROWS_AS((void)run_ideal(c, 26), std::runtime_error);
    CHECK_THROWS_AS((void)run_depolarizing(c, NoiseModel{}, 13), std::runtime_error);
}
