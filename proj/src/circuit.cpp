#include "phaselab/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <stdexcept>

#include <json.hpp>

namespace phaselab {

namespace {

using Bond = std::pair<int, int>;

int grid_q(const CircuitSpec& s, int r, int c) { return r * s.cols + c; }

std::vector<Bond> grid_bonds(const CircuitSpec& s, char orientation, int parity, bool staggered) {
    std::vector<Bond> bonds;
    if (orientation == 'v') {
        for (int r = 0; r + 1 < s.rows; ++r)
            for (int c = 0; c < s.cols; ++c) {
                const int key = staggered ? (r + c) : r;
                if ((key & 1) == parity) bonds.emplace_back(grid_q(s, r, c), grid_q(s, r + 1, c));
            }
    } else {
        for (int r = 0; r < s.rows; ++r)
            for (int c = 0; c + 1 < s.cols; ++c) {
                const int key = staggered ? (r + c) : c;
                if ((key & 1) == parity) bonds.emplace_back(grid_q(s, r, c), grid_q(s, r, c + 1));
            }
    }
    return bonds;
}

}  // namespace

std::vector<Bond> pattern_bonds(const CircuitSpec& spec, const std::string& label) {
    if (spec.topology == Topology::chain1d) {
        if (label != "A" && label != "B")
            throw std::invalid_argument("pattern label '" + label + "' not defined on chain1d");
        std::vector<Bond> bonds;
        for (int q = (label == "A" ? 0 : 1); q + 1 < spec.n; q += 2) bonds.emplace_back(q, q + 1);
        return bonds;
    }
    if (label == "A") return grid_bonds(spec, 'v', 0, true);
    if (label == "B") return grid_bonds(spec, 'v', 1, true);
    if (label == "C") return grid_bonds(spec, 'h', 0, true);
    if (label == "D") return grid_bonds(spec, 'h', 1, true);
    if (label == "E") return grid_bonds(spec, 'v', 0, false);
    if (label == "F") return grid_bonds(spec, 'v', 1, false);
    if (label == "G") return grid_bonds(spec, 'h', 0, false);
    if (label == "H") return grid_bonds(spec, 'h', 1, false);
    throw std::invalid_argument("pattern label '" + label + "' not defined on grid2d");
}

std::vector<Bond> all_bonds(const CircuitSpec& spec) {
    std::vector<Bond> bonds;
    if (spec.topology == Topology::chain1d) {
        for (int q = 0; q + 1 < spec.n; ++q) bonds.emplace_back(q, q + 1);
        return bonds;
    }
    for (char o : {'v', 'h'})
        for (int p : {0, 1}) {
            auto b = grid_bonds(spec, o, p, true);
            bonds.insert(bonds.end(), b.begin(), b.end());
        }
    return bonds;
}

bool crosses_cut(const CircuitSpec& spec, Bond bond) {
    if (!spec.weak_link) return false;
    const int cut = spec.weak_link->cut_position;
    if (spec.topology == Topology::chain1d)
        return (bond.first < cut) != (bond.second < cut);
    // 2D cut runs between column cut-1 and column cut.
    return (bond.first % spec.cols < cut) != (bond.second % spec.cols < cut);
}

Bond weak_link_bond(const CircuitSpec& spec) {
    if (!spec.weak_link) throw std::invalid_argument("spec has no weak link");
    const int cut = spec.weak_link->cut_position;
    if (spec.topology == Topology::chain1d) return {cut - 1, cut};
    const int r = spec.rows / 2;
    return {grid_q(spec, r, cut - 1), grid_q(spec, r, cut)};
}

void validate_spec(const CircuitSpec& spec) {
    if (spec.n < 1) throw std::invalid_argument("n must be positive");
    if (spec.depth_cycles < 0) throw std::invalid_argument("depth_cycles must be >= 0");
    if (spec.pattern.empty()) throw std::invalid_argument("pattern must not be empty");
    if (spec.topology == Topology::grid2d && spec.rows * spec.cols != spec.n)
        throw std::invalid_argument("grid2d requires n = rows*cols");
    for (const auto& label : spec.pattern) {
        auto bonds = pattern_bonds(spec, label);
        std::set<int> seen;
        for (auto [a, b] : bonds) {
            if (!seen.insert(a).second || !seen.insert(b).second)
                throw std::invalid_argument("pattern layer " + label + " is not a matching");
        }
    }
    if (spec.weak_link) {
        const auto& wl = *spec.weak_link;
        if (wl.period_T < 1) throw std::invalid_argument("weak-link period must be >= 1");
        const int half = spec.topology == Topology::chain1d ? spec.n / 2 : spec.cols / 2;
        const int total = spec.topology == Topology::chain1d ? spec.n : spec.cols;
        if (wl.cut_position != half || total % 2 != 0)
            throw std::invalid_argument("weak-link cut must bisect the qubit set");
    }
}

namespace {

Gate make_1q(const CircuitSpec& spec, int cycle, int qubit, Rng rng) {
    Gate g;
    g.kind = Gate::Kind::one_qubit;
    g.cycle = cycle;
    g.qubits = {qubit, -1};
    g.layer = "1q";
    switch (spec.gate_ensemble) {
        case GateEnsemble::haar_1q:
            g.u1 = haar_1q(rng);
            break;
        case GateEnsemble::discrete_zxz: {
            g.exponent_p = discrete_exponents()[rng.next_below(8)];
            g.u1 = discrete_1q(g.exponent_p);
            g.from_discrete_set = true;
            break;
        }
        case GateEnsemble::clifford_zxz: {
            g.exponent_p = clifford_exponents()[rng.next_below(4)];
            g.u1 = discrete_1q(g.exponent_p);
            g.from_discrete_set = true;
            break;
        }
    }
    return g;
}

Gate make_2q(const CircuitSpec& spec, int cycle, Bond bond, const std::string& layer) {
    Gate g;
    g.kind = Gate::Kind::two_qubit;
    g.cycle = cycle;
    g.qubits = {bond.first, bond.second};
    g.layer = layer;
    g.u2 = spec.entangler == EntanglerKind::iswap ? iswap() : fsim(spec.fsim_theta, spec.fsim_phi);
    return g;
}

}  // namespace

Circuit build_circuit(const CircuitSpec& spec) {
    validate_spec(spec);
    Circuit circuit;
    circuit.n = spec.n;
    circuit.depth_cycles = spec.depth_cycles;
    circuit.spec = spec;
    const Rng root = Rng(spec.seed);
    const int n_layers = spec.depth_cycles + (spec.final_1q_layer ? 1 : 0);
    for (int cycle = 1; cycle <= n_layers; ++cycle) {
        for (int q = 0; q < spec.n; ++q)
            circuit.gates.push_back(make_1q(spec, cycle, q, root.substream(cycle).substream(q)));
        if (cycle > spec.depth_cycles) break;  // trailing 1q layer only
        const auto& label = spec.pattern[(cycle - 1) % spec.pattern.size()];
        for (auto bond : pattern_bonds(spec, label)) {
            if (crosses_cut(spec, bond)) continue;  // cut bonds fire on the link schedule
            circuit.gates.push_back(make_2q(spec, cycle, bond, label));
        }
        if (spec.weak_link && cycle % spec.weak_link->period_T == 0)
            circuit.gates.push_back(make_2q(spec, cycle, weak_link_bond(spec), "link"));
    }
    return circuit;
}

Circuit inject_noise_gates(const Circuit& circuit, const NoiseInjection& inj, std::uint64_t seed) {
    if (inj.sigma_angle < 0) throw std::invalid_argument("sigma_angle must be >= 0");
    Circuit out;
    out.n = circuit.n;
    out.depth_cycles = circuit.depth_cycles;
    out.spec = circuit.spec;
    out.spec.noise_inject = inj;
    const Rng root = Rng(seed);
    for (std::size_t i = 0; i < circuit.gates.size(); ++i) {
        const Gate& g = circuit.gates[i];
        out.gates.push_back(g);
        if (g.kind != Gate::Kind::one_qubit || g.injected) continue;
        Gate extra;
        extra.kind = Gate::Kind::one_qubit;
        extra.cycle = g.cycle;
        extra.qubits = g.qubits;
        extra.layer = "inject";
        extra.injected = true;
        Rng rng = root.substream(inj.per_layer ? g.cycle : 0).substream(g.qubits[0]);
        extra.u1 = noise_inject_1q(inj.sigma_angle, inj.axis_mean, inj.axis_std, rng);
        out.gates.push_back(extra);
    }
    return out;
}

namespace {

using nlohmann::json;

// Round-trip exact double formatting keeps serialization byte-stable for a
// fixed spec and platform.
std::string fmt_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

json mat_to_json(const cplx* data, int count) {
    json arr = json::array();
    for (int i = 0; i < count; ++i) {
        arr.push_back(fmt_double(data[i].real()));
        arr.push_back(fmt_double(data[i].imag()));
    }
    return arr;
}

void mat_from_json(const json& arr, cplx* data, int count) {
    for (int i = 0; i < count; ++i)
        data[i] = cplx(std::stod(arr.at(2 * i).get<std::string>()),
                       std::stod(arr.at(2 * i + 1).get<std::string>()));
}

json spec_to_json_obj(const CircuitSpec& s) {
    json j;
    j["n"] = s.n;
    j["topology"] = s.topology == Topology::chain1d ? "chain1d" : "grid2d";
    if (s.topology == Topology::grid2d) {
        j["rows"] = s.rows;
        j["cols"] = s.cols;
    }
    j["pattern"] = s.pattern;
    j["depth_cycles"] = s.depth_cycles;
    switch (s.gate_ensemble) {
        case GateEnsemble::discrete_zxz: j["gate_ensemble"] = "discrete_zxz"; break;
        case GateEnsemble::haar_1q: j["gate_ensemble"] = "haar_1q"; break;
        case GateEnsemble::clifford_zxz: j["gate_ensemble"] = "clifford_zxz"; break;
    }
    j["entangler"] = s.entangler == EntanglerKind::iswap ? "iswap" : "fsim";
    j["fsim_theta"] = fmt_double(s.fsim_theta);
    j["fsim_phi"] = fmt_double(s.fsim_phi);
    if (s.weak_link) {
        j["weak_link"] = {{"cut_position", s.weak_link->cut_position},
                          {"period_T", s.weak_link->period_T}};
    }
    if (s.noise_inject) {
        j["noise_inject"] = {{"sigma_angle", fmt_double(s.noise_inject->sigma_angle)},
                             {"axis_mean", fmt_double(s.noise_inject->axis_mean)},
                             {"axis_std", fmt_double(s.noise_inject->axis_std)},
                             {"per_layer", s.noise_inject->per_layer}};
    }
    j["final_1q_layer"] = s.final_1q_layer;
    j["seed"] = s.seed;
    return j;
}

CircuitSpec spec_from_json_obj(const json& j) {
    CircuitSpec s;
    s.n = j.at("n").get<int>();
    const auto topo = j.at("topology").get<std::string>();
    if (topo == "chain1d") {
        s.topology = Topology::chain1d;
    } else if (topo == "grid2d") {
        s.topology = Topology::grid2d;
        s.rows = j.at("rows").get<int>();
        s.cols = j.at("cols").get<int>();
    } else {
        throw std::invalid_argument("unknown topology '" + topo + "'");
    }
    s.pattern = j.at("pattern").get<std::vector<std::string>>();
    s.depth_cycles = j.at("depth_cycles").get<int>();
    const auto ens = j.at("gate_ensemble").get<std::string>();
    if (ens == "discrete_zxz") s.gate_ensemble = GateEnsemble::discrete_zxz;
    else if (ens == "haar_1q") s.gate_ensemble = GateEnsemble::haar_1q;
    else if (ens == "clifford_zxz") s.gate_ensemble = GateEnsemble::clifford_zxz;
    else throw std::invalid_argument("unknown gate_ensemble '" + ens + "'");
    s.entangler = j.at("entangler").get<std::string>() == "iswap" ? EntanglerKind::iswap
                                                                  : EntanglerKind::fsim;
    s.fsim_theta = std::stod(j.at("fsim_theta").get<std::string>());
    s.fsim_phi = std::stod(j.at("fsim_phi").get<std::string>());
    if (j.contains("weak_link")) {
        WeakLink wl;
        wl.cut_position = j["weak_link"].at("cut_position").get<int>();
        wl.period_T = j["weak_link"].at("period_T").get<int>();
        s.weak_link = wl;
    }
    if (j.contains("noise_inject")) {
        NoiseInjection ni;
        ni.sigma_angle = std::stod(j["noise_inject"].at("sigma_angle").get<std::string>());
        ni.axis_mean = std::stod(j["noise_inject"].at("axis_mean").get<std::string>());
        ni.axis_std = std::stod(j["noise_inject"].at("axis_std").get<std::string>());
        ni.per_layer = j["noise_inject"].at("per_layer").get<bool>();
        s.noise_inject = ni;
    }
    s.final_1q_layer = j.value("final_1q_layer", false);
    s.seed = j.at("seed").get<std::uint64_t>();
    return s;
}

}  // namespace

std::string circuit_to_json(const Circuit& c) {
    json j;
    j["version"] = 1;
    j["spec"] = spec_to_json_obj(c.spec);
    json gates = json::array();
    for (const auto& g : c.gates) {
        json jg;
        jg["cycle"] = g.cycle;
        jg["kind"] = g.kind == Gate::Kind::one_qubit ? "1q" : "2q";
        jg["qubits"] = g.kind == Gate::Kind::one_qubit ? json::array({g.qubits[0]})
                                                       : json::array({g.qubits[0], g.qubits[1]});
        jg["layer"] = g.layer;
        if (g.kind == Gate::Kind::one_qubit) {
            if (g.from_discrete_set) {
                jg["p"] = fmt_double(g.exponent_p);
            } else {
                jg["u"] = mat_to_json(g.u1.data(), 4);
            }
            if (g.injected) jg["injected"] = true;
        } else {
            jg["u"] = mat_to_json(g.u2.data(), 16);
        }
        gates.push_back(std::move(jg));
    }
    j["gates"] = std::move(gates);
    return j.dump(2);
}

Circuit circuit_from_json(const std::string& text) {
    const json j = json::parse(text);
    Circuit c;
    c.spec = spec_from_json_obj(j.at("spec"));
    c.n = c.spec.n;
    c.depth_cycles = c.spec.depth_cycles;
    for (const auto& jg : j.at("gates")) {
        Gate g;
        g.cycle = jg.at("cycle").get<int>();
        g.layer = jg.at("layer").get<std::string>();
        if (jg.at("kind").get<std::string>() == "1q") {
            g.kind = Gate::Kind::one_qubit;
            g.qubits = {jg.at("qubits").at(0).get<int>(), -1};
            if (jg.contains("p")) {
                g.exponent_p = std::stod(jg["p"].get<std::string>());
                g.from_discrete_set = true;
                g.u1 = discrete_1q(g.exponent_p);
            } else {
                mat_from_json(jg.at("u"), g.u1.data(), 4);
            }
            g.injected = jg.value("injected", false);
        } else {
            g.kind = Gate::Kind::two_qubit;
            g.qubits = {jg.at("qubits").at(0).get<int>(), jg.at("qubits").at(1).get<int>()};
            mat_from_json(jg.at("u"), g.u2.data(), 16);
        }
        c.gates.push_back(std::move(g));
    }
    return c;
}

std::string spec_to_json(const CircuitSpec& spec) { return spec_to_json_obj(spec).dump(2); }

CircuitSpec spec_from_json(const std::string& text) {
    return spec_from_json_obj(nlohmann::json::parse(text));
}

}  // namespace phaselab
