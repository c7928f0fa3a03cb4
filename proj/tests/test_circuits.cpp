#include <doctest.h>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "phaselab/circuit.hpp"

using namespace phaselab;

namespace {

CircuitSpec chain_spec(int n, int d, std::uint64_t seed) {
    CircuitSpec s;
    s.n = n;
    s.topology = Topology::chain1d;
    s.pattern = {"A", "B"};
    s.depth_cycles = d;
    s.gate_ensemble = GateEnsemble::discrete_zxz;
    s.seed = seed;
    return s;
}

CircuitSpec grid_spec(int rows, int cols, int d, std::uint64_t seed) {
    CircuitSpec s;
    s.n = rows * cols;
    s.topology = Topology::grid2d;
    s.rows = rows;
    s.cols = cols;
    s.pattern = {"A", "B", "C", "D", "C", "D", "A", "B"};
    s.depth_cycles = d;
    s.gate_ensemble = GateEnsemble::discrete_zxz;
    s.seed = seed;
    return s;
}

}  // namespace

TEST_CASE("smallest layer: n=2 chain, d=1") {
    auto c = build_circuit(chain_spec(2, 1, 7));
    int n1 = 0, n2 = 0;
    for (const auto& g : c.gates) (g.kind == Gate::Kind::one_qubit ? n1 : n2)++;
    CHECK(n1 == 2);
    CHECK(n2 == 1);
    CHECK(c.gates.back().kind == Gate::Kind::two_qubit);
    CHECK(c.gates.back().qubits[0] == 0);
    CHECK(c.gates.back().qubits[1] == 1);
}

TEST_CASE("same seed, same circuit; serialization is stable") {
    const auto spec = chain_spec(6, 8, 12345);
    const auto a = circuit_to_json(build_circuit(spec));
    const auto b = circuit_to_json(build_circuit(spec));
    CHECK(a == b);

    auto spec2 = spec;
    spec2.seed = 12346;
    CHECK(circuit_to_json(build_circuit(spec2)) != a);
}

TEST_CASE("weak link fires only at multiples of T") {
    auto spec = chain_spec(12, 12, 3);
    spec.weak_link = WeakLink{6, 6};
    const auto c = build_circuit(spec);
    std::vector<int> link_cycles;
    for (const auto& g : c.gates) {
        if (g.kind != Gate::Kind::two_qubit) continue;
        const bool crossing = (g.qubits[0] < 6) != (g.qubits[1] < 6);
        if (crossing) {
            link_cycles.push_back(g.cycle);
            CHECK(g.layer == "link");
        }
    }
    CHECK(link_cycles == std::vector<int>{6, 12});
}

TEST_CASE("cycle c applies pattern[c mod len]") {
    const auto spec = grid_spec(4, 4, 8, 99);
    const auto c = build_circuit(spec);
    for (const auto& g : c.gates) {
        if (g.kind != Gate::Kind::two_qubit) continue;
        CHECK(g.layer == spec.pattern[(g.cycle - 1) % spec.pattern.size()]);
    }
}

TEST_CASE("discrete ensemble closure and layer matchings") {
    const auto spec = grid_spec(4, 4, 8, 5);
    const auto c = build_circuit(spec);
    const auto& ps = discrete_exponents();
    std::set<std::pair<int, int>> adjacency;
    for (auto b : all_bonds(spec)) adjacency.insert(b);
    std::map<std::pair<int, int>, std::set<int>> layer_qubits;  // (cycle,label-hash)
    for (const auto& g : c.gates) {
        if (g.kind == Gate::Kind::one_qubit) {
            CHECK(g.from_discrete_set);
            CHECK(std::count(ps.begin(), ps.end(), g.exponent_p) == 1);
        } else {
            CHECK(adjacency.count({g.qubits[0], g.qubits[1]}) == 1);
            auto& used = layer_qubits[{g.cycle, 0}];
            CHECK(used.insert(g.qubits[0]).second);
            CHECK(used.insert(g.qubits[1]).second);
        }
    }
}

TEST_CASE("haar 1q moments match the 2-design values") {
    Rng rng(17);
    const int k = 100000;
    double m2 = 0, m4 = 0;
    for (int i = 0; i < k; ++i) {
        const Mat2 u = haar_1q(rng);
        // unitarity
        const double row0 = std::norm(u[0]) + std::norm(u[1]);
        const double row1 = std::norm(u[2]) + std::norm(u[3]);
        CHECK(row0 == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(row1 == doctest::Approx(1.0).epsilon(1e-12));
        const cplx dot = u[0] * std::conj(u[2]) + u[1] * std::conj(u[3]);
        CHECK(std::abs(dot) < 1e-12);
        m2 += std::norm(u[0]);
        m4 += std::norm(u[0]) * std::norm(u[0]);
    }
    CHECK(m2 / k == doctest::Approx(0.5).epsilon(0.01));
    CHECK(m4 / k == doctest::Approx(1.0 / 3.0).epsilon(0.02));
}

TEST_CASE("noise injection: sigma=0 inserts identities, seeds decorrelate") {
    const auto base = build_circuit(chain_spec(4, 3, 1));
    NoiseInjection inj;
    inj.sigma_angle = 0.0;
    const auto noisy = inject_noise_gates(base, inj, 77);
    int injected = 0;
    for (const auto& g : noisy.gates) {
        if (!g.injected) continue;
        ++injected;
        CHECK(std::abs(g.u1[0] - cplx(1, 0)) < 1e-12);
        CHECK(std::abs(g.u1[3] - cplx(1, 0)) < 1e-12);
        CHECK(std::abs(g.u1[1]) < 1e-12);
        CHECK(std::abs(g.u1[2]) < 1e-12);
    }
    CHECK(injected == 4 * 3);

    inj.sigma_angle = 0.1;
    const auto n1 = inject_noise_gates(base, inj, 1);
    const auto n2 = inject_noise_gates(base, inj, 2);
    bool any_diff = false;
    for (std::size_t i = 0; i < n1.gates.size(); ++i)
        if (n1.gates[i].injected && std::abs(n1.gates[i].u1[0] - n2.gates[i].u1[0]) > 1e-9)
            any_diff = true;
    CHECK(any_diff);

    // per-layer freshness: same qubit, different cycles get different gates
    const Gate *first = nullptr, *second = nullptr;
    for (const auto& g : n1.gates) {
        if (!g.injected || g.qubits[0] != 0) continue;
        if (!first) first = &g;
        else if (!second && g.cycle != first->cycle) second = &g;
    }
    REQUIRE(first != nullptr);
    REQUIRE(second != nullptr);
    CHECK(std::abs(first->u1[0] - second->u1[0]) > 1e-9);
}

TEST_CASE("circuit JSON round-trip") {
    auto spec = grid_spec(2, 3, 4, 2024);
    spec.gate_ensemble = GateEnsemble::haar_1q;
    const auto c = build_circuit(spec);
    const auto text = circuit_to_json(c);
    const auto back = circuit_from_json(text);
    REQUIRE(back.gates.size() == c.gates.size());
    for (std::size_t i = 0; i < c.gates.size(); ++i) {
        CHECK(back.gates[i].cycle == c.gates[i].cycle);
        CHECK(back.gates[i].qubits == c.gates[i].qubits);
        for (int k = 0; k < 4; ++k) CHECK(std::abs(back.gates[i].u1[k] - c.gates[i].u1[k]) == 0.0);
        for (int k = 0; k < 16; ++k) CHECK(std::abs(back.gates[i].u2[k] - c.gates[i].u2[k]) == 0.0);
    }
    CHECK(circuit_to_json(back) == text);
}

TEST_CASE("validation failures") {
    auto s = chain_spec(4, 2, 0);
    s.pattern = {"C"};
    CHECK_THROWS_AS((void)build_circuit(s), std::invalid_argument);

    auto w = chain_spec(8, 4, 0);
    w.weak_link = WeakLink{3, 2};  // cut not bisecting
    CHECK_THROWS_AS((void)build_circuit(w), std::invalid_argument);

    auto g = grid_spec(3, 3, 2, 0);
    g.n = 8;  // rows*cols mismatch
    CHECK_THROWS_AS((void)build_circuit(g), std::invalid_argument);
}

TEST_CASE("pattern data file matches the generator") {
    std::ifstream f(std::string(PHASELAB_SOURCE_DIR) + "/data/patterns2d.json");
    REQUIRE(f.good());
    nlohmann::json doc;
    f >> doc;
    CHECK(doc.at("version").get<int>() == 1);
    const auto spec = grid_spec(4, 6, 1, 0);
    for (const auto& [label, rule] : doc.at("labels").items()) {
        const bool vertical = rule.at("orientation").get<std::string>() == "vertical";
        const int parity = rule.at("parity").get<int>();
        const bool staggered = rule.at("staggered").get<bool>();
        for (auto [a, b] : pattern_bonds(spec, label)) {
            const int ra = a / spec.cols, ca = a % spec.cols;
            const int rb = b / spec.cols, cb = b % spec.cols;
            if (vertical) {
                CHECK(ca == cb);
                CHECK(rb == ra + 1);
                CHECK(((staggered ? ra + ca : ra) & 1) == parity);
            } else {
                CHECK(ra == rb);
                CHECK(cb == ca + 1);
                CHECK(((staggered ? ra + ca : ca) & 1) == parity);
            }
        }
    }
}
