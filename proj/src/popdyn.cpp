#include "phaselab/popdyn.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace phaselab::popdyn {

double PopState::total() const {
    double s = 0;
    for (double x : w) s += x;
    return s;
}

TransferOp iswap_transfer() {
    return {1.0, 0.0,       0.0,       0.0,
            0.0, 0.0,       1.0 / 3.0, 2.0 / 9.0,
            0.0, 1.0 / 3.0, 0.0,       2.0 / 9.0,
            0.0, 2.0 / 3.0, 2.0 / 3.0, 5.0 / 9.0};
}

TransferOp omitted_transfer() {
    return {1.0, 0.0, 0.0, 0.0,
            0.0, 0.0, 0.0, 0.0,
            0.0, 0.0, 0.0, 0.0,
            0.0, 0.0, 0.0, 1.0 / 3.0};
}

PopState init_popstate(int n, int max_n) {
    if (n < 1 || n > max_n) throw std::runtime_error("init_popstate: n out of range");
    PopState s;
    s.n = n;
    s.w.assign(std::size_t(1) << n, std::ldexp(1.0, -n));
    return s;
}

void apply_gate(PopState& state, int qj, int qk, const TransferOp& op) {
    if (qj == qk) throw std::invalid_argument("apply_gate: qj == qk");
    const int lo = std::min(qj, qk), hi = std::max(qj, qk);
    // op indexes (v_j, v_k); when qj is the high bit this matches the
    // (hi, lo) gather below, otherwise exchange the middle labels.
    const bool j_high = qj > qk;
    const std::size_t m_lo = std::size_t(1) << lo;
    const std::size_t m_hi = std::size_t(1) << hi;
    const std::size_t groups = state.w.size() >> 2;
    double* w = state.w.data();
    auto at = [&](std::size_t base, int vj, int vk) -> double& {
        const int a = j_high ? vj : vk;  // high bit
        const int b = j_high ? vk : vj;  // low bit
        return w[base | (a ? m_hi : 0) | (b ? m_lo : 0)];
    };
    for (std::size_t i = 0; i < groups; ++i) {
        std::size_t t = i;
        std::size_t idx = t & (m_lo - 1);
        t >>= lo;
        idx |= (t & ((m_hi >> (lo + 1)) - 1)) << (lo + 1);
        t >>= (hi - lo - 1);
        idx |= t << (hi + 1);
        const double in[4] = {at(idx, 0, 0), at(idx, 0, 1), at(idx, 1, 0), at(idx, 1, 1)};
        for (int r = 0; r < 4; ++r)
            at(idx, r >> 1, r & 1) =
                op[r * 4 + 0] * in[0] + op[r * 4 + 1] * in[1] + op[r * 4 + 2] * in[2] + op[r * 4 + 3] * in[3];
    }
}

void apply_noise(PopState& state, int qj, int qk, double p2) {
    if (p2 < 0 || p2 > 1) throw std::invalid_argument("apply_noise: p2 out of [0,1]");
    if (p2 == 0) return;
    const double f = std::exp(-16.0 * p2 / 15.0);
    const std::size_t mask = (std::size_t(1) << qj) | (std::size_t(1) << qk);
    for (std::size_t i = 0; i < state.w.size(); ++i)
        if (i & mask) state.w[i] *= f;
}

void apply_qubit_decay(PopState& state, int q, double factor) {
    const std::size_t mask = std::size_t(1) << q;
    for (std::size_t i = 0; i < state.w.size(); ++i)
        if (i & mask) state.w[i] *= factor;
}

double xeb_readout(const PopState& state) {
    // bucket by popcount so the 3^-k weights multiply well-summed groups
    std::vector<double> by_weight(state.n + 1, 0.0);
    for (std::size_t i = 0; i < state.w.size(); ++i)
        by_weight[std::popcount(i)] += state.w[i];
    double c = 0, pow3 = 1;
    for (int k = 0; k <= state.n; ++k) {
        c += by_weight[k] / pow3;
        pow3 *= 3.0;
    }
    return std::ldexp(c, state.n) - 1.0;
}

namespace {

std::vector<double> spoof_sector_trace(const CircuitSpec& spec, const PopNoise& noise, int d_max) {
    if (!spec.weak_link) throw std::invalid_argument("spoof_omit_cut requires a weak link");
    const int T = spec.weak_link->period_T;
    // Sector contributions to XEB, all normalized to 1 at d = 0: thermal
    // (both halves ergodic), and the two single-sided vacuum/thermal mixes.
    // Each omitted-link application costs a factor 1/4; noise costs the
    // thermal sector F per cycle and the single-sided sectors F^{1/2}.
    const double f_cycle = std::exp(-(noise.epsilon + noise.p1) * spec.n);
    std::vector<double> xeb(d_max + 1);
    double thermal = 1.0, left = 1.0, right = 1.0;
    xeb[0] = 3.0;
    for (int d = 1; d <= d_max; ++d) {
        thermal *= f_cycle;
        left *= std::sqrt(f_cycle);
        right *= std::sqrt(f_cycle);
        if (d % T == 0) {
            thermal *= 0.25;
            left *= 0.25;
            right *= 0.25;
        }
        xeb[d] = thermal + left + right;
    }
    return xeb;
}

}  // namespace

std::vector<double> evolve(const CircuitSpec& spec, const PopNoise& noise, int d_max,
                           EvolveMode mode) {
    if (mode == EvolveMode::spoof_omit_cut) return spoof_sector_trace(spec, noise, d_max);
    validate_spec(spec);
    PopState state = init_popstate(spec.n);
    const TransferOp omega = iswap_transfer();
    const double qubit_factor = std::exp(-4.0 * (noise.epsilon + noise.p1) / 3.0);
    std::vector<double> xeb(d_max + 1);
    xeb[0] = xeb_readout(state);
    for (int cycle = 1; cycle <= d_max; ++cycle) {
        const auto& label = spec.pattern[(cycle - 1) % spec.pattern.size()];
        std::vector<bool> gated(std::size_t(spec.n), false);
        auto fire = [&](std::pair<int, int> bond) {
            // two gates sharing a qubit inside one cycle would need a twirl
            // between them that the circuit does not have
            if (gated[std::size_t(bond.first)] || gated[std::size_t(bond.second)])
                throw std::invalid_argument(
                    "overlapping two-qubit gates within one cycle break the per-layer average");
            gated[std::size_t(bond.first)] = gated[std::size_t(bond.second)] = true;
            apply_gate(state, bond.first, bond.second, omega);
            if (noise.p2 > 0) apply_noise(state, bond.first, bond.second, noise.p2);
        };
        for (auto bond : pattern_bonds(spec, label))
            if (!crosses_cut(spec, bond)) fire(bond);
        if (spec.weak_link && cycle % spec.weak_link->period_T == 0) fire(weak_link_bond(spec));
        if (qubit_factor != 1.0)
            for (int q = 0; q < spec.n; ++q) apply_qubit_decay(state, q, qubit_factor);
        xeb[cycle] = xeb_readout(state);
    }
    return xeb;
}

OrderParameterScan order_parameter_scan(const CircuitSpec& spec,
                                        const std::vector<double>& eps_n_grid,
                                        const std::vector<int>& depths, EvolveMode mode) {
    if (depths.empty()) throw std::invalid_argument("order_parameter_scan: no depths");
    OrderParameterScan scan;
    scan.eps_n = eps_n_grid;
    scan.depths = depths;
    const int d_max = *std::max_element(depths.begin(), depths.end());
    scan.xeb.resize(eps_n_grid.size());
    scan.theta.resize(eps_n_grid.size());
    for (std::size_t i = 0; i < eps_n_grid.size(); ++i) {
        PopNoise noise;
        noise.epsilon = eps_n_grid[i] / spec.n;
        const auto trace = evolve(spec, noise, d_max, mode);
        for (int d : depths) {
            scan.xeb[i].push_back(trace[d]);
            scan.theta[i].push_back(std::exp(-eps_n_grid[i] * d) / trace[d]);
        }
    }
    return scan;
}

CrossingEstimate crossing_from_scan(const OrderParameterScan& scan) {
    CrossingEstimate est;
    for (std::size_t pair = 0; pair + 1 < scan.depths.size(); ++pair) {
        // weak noise: Theta grows with depth (g < 0); strong noise: decays
        for (std::size_t i = 0; i + 1 < scan.eps_n.size(); ++i) {
            const double g0 = scan.theta[i][pair] - scan.theta[i][pair + 1];
            const double g1 = scan.theta[i + 1][pair] - scan.theta[i + 1][pair + 1];
            if (g0 <= 0 && g1 > 0) {
                const double t = g0 == g1 ? 0.5 : -g0 / (g1 - g0);
                est.per_pair.push_back(scan.eps_n[i] + t * (scan.eps_n[i + 1] - scan.eps_n[i]));
                break;
            }
        }
    }
    if (est.per_pair.empty())
        throw std::runtime_error("order-parameter curves do not cross in the scanned range");
    for (double f : est.per_pair) est.mean += f;
    est.mean /= double(est.per_pair.size());
    for (double f : est.per_pair) est.spread = std::max(est.spread, std::abs(f - est.mean));
    return est;
}

}  // namespace phaselab::popdyn
