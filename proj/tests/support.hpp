#pragma once

// Shared oracle helpers for the unit and acceptance suites. Everything here
// is deliberately independent of the engines it is used to check: the
// density-matrix oracle drives gates through the statevec module only.

#include <algorithm>
#include <cmath>
#include <mutex>
#include <vector>

#include "phaselab/circuit.hpp"
#include "phaselab/parallel.hpp"
#include "phaselab/statevec.hpp"

namespace phaselab::testsupport {

inline CircuitSpec chain_spec(int n, int period_T = 0) {
    CircuitSpec s;
    s.n = n;
    s.topology = Topology::chain1d;
    s.pattern = {"A", "B"};
    if (period_T > 0) s.weak_link = WeakLink{n / 2, period_T};
    return s;
}

// Ensemble-average XEB at depths 1..d_max from exact density-matrix
// evolution: one instance per circuit seed, two-qubit depolarizing p2 after
// each entangler. XEB(d) is read after cycle (d+1)'s single-qubit layer, so
// each checkpoint corresponds to a depth-d circuit with a trailing 1q layer.
inline std::vector<double> density_matrix_xeb(const CircuitSpec& base, GateEnsemble ens,
                                              double p2, int d_max, int instances,
                                              std::uint64_t seed,
                                              std::vector<double>* stderr_out) {
    std::vector<double> sum(d_max + 1, 0.0), sumsq(d_max + 1, 0.0);
    std::mutex mu;
    const unsigned workers = thread_budget();
    parallel_for(workers, [&](std::size_t w) {
        std::vector<double> lsum(d_max + 1, 0.0), lsq(d_max + 1, 0.0);
        for (int inst = int(w); inst < instances; inst += int(workers)) {
            CircuitSpec spec = base;
            spec.gate_ensemble = ens;
            spec.depth_cycles = d_max + 1;
            spec.seed = Rng(seed).substream(std::uint64_t(inst)).next_u64();
            const Circuit c = build_circuit(spec);
            StateVector psi = StateVector::zero_state(spec.n);
            DensityMatrix rho = DensityMatrix::zero_state(spec.n);
            std::size_t gi = 0;
            auto run_cycle_full = [&](int cycle) {
                for (; gi < c.gates.size() && c.gates[gi].cycle == cycle; ++gi) {
                    const Gate& g = c.gates[gi];
                    if (g.kind == Gate::Kind::one_qubit) {
                        apply_1q(psi, g.qubits[0], g.u1);
                        apply_1q(rho, g.qubits[0], g.u1);
                    } else {
                        apply_gate_2q(psi, g.qubits[0], g.qubits[1], g.u2);
                        apply_2q(rho, g.qubits[0], g.qubits[1], g.u2);
                        depolarize_2q(rho, g.qubits[0], g.qubits[1], p2);
                    }
                }
            };
            for (int d = 1; d <= d_max; ++d) {
                run_cycle_full(d);
                for (; gi < c.gates.size() && c.gates[gi].cycle == d + 1 &&
                       c.gates[gi].kind == Gate::Kind::one_qubit;
                     ++gi) {
                    apply_1q(psi, c.gates[gi].qubits[0], c.gates[gi].u1);
                    apply_1q(rho, c.gates[gi].qubits[0], c.gates[gi].u1);
                }
                const double x = xeb_between(rho.diagonal(), probabilities(psi));
                lsum[std::size_t(d)] += x;
                lsq[std::size_t(d)] += x * x;
            }
        }
        std::lock_guard<std::mutex> lock(mu);
        for (int d = 0; d <= d_max; ++d) {
            sum[std::size_t(d)] += lsum[std::size_t(d)];
            sumsq[std::size_t(d)] += lsq[std::size_t(d)];
        }
    });
    std::vector<double> mean(d_max + 1, 0.0);
    if (stderr_out) stderr_out->assign(d_max + 1, 0.0);
    for (int d = 1; d <= d_max; ++d) {
        mean[std::size_t(d)] = sum[std::size_t(d)] / instances;
        if (stderr_out) {
            const double var =
                std::max(0.0, sumsq[std::size_t(d)] / instances -
                                  mean[std::size_t(d)] * mean[std::size_t(d)]);
            (*stderr_out)[std::size_t(d)] = std::sqrt(var / instances);
        }
    }
    return mean;
}

// D normalized exponential probabilities: a synthetic Porter-Thomas state.
inline std::vector<double> pt_state(int n, std::uint64_t seed) {
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

// k draws from `dist`, carrying `ideal` as the reported probabilities.
inline SampleSet draw(const std::vector<double>& dist, const std::vector<double>& ideal, int n,
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

}  // namespace phaselab::testsupport
