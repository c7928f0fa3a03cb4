#include "phaselab/statevec.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace phaselab {

StateVector StateVector::zero_state(int n) {
    StateVector psi;
    psi.n = n;
    psi.amp.assign(std::size_t(1) << n, cplx(0, 0));
    psi.amp[0] = cplx(1, 0);
    return psi;
}

double StateVector::norm2() const {
    double s = 0;
    for (const auto& a : amp) s += std::norm(a);
    return s;
}

DensityMatrix DensityMatrix::zero_state(int n) {
    DensityMatrix rho;
    rho.n = n;
    rho.rho.assign(std::size_t(1) << (2 * n), cplx(0, 0));
    rho.rho[0] = cplx(1, 0);
    return rho;
}

DensityMatrix DensityMatrix::pure(const StateVector& psi) {
    DensityMatrix rho;
    rho.n = psi.n;
    const std::size_t d = psi.amp.size();
    rho.rho.resize(d * d);
    for (std::size_t r = 0; r < d; ++r)
        for (std::size_t c = 0; c < d; ++c) rho.rho[r * d + c] = psi.amp[r] * std::conj(psi.amp[c]);
    return rho;
}

double DensityMatrix::trace_real() const {
    const std::size_t d = std::size_t(1) << n;
    double t = 0;
    for (std::size_t i = 0; i < d; ++i) t += rho[i * d + i].real();
    return t;
}

std::vector<double> DensityMatrix::diagonal() const {
    const std::size_t d = std::size_t(1) << n;
    std::vector<double> p(d);
    for (std::size_t i = 0; i < d; ++i) p[i] = rho[i * d + i].real();
    return p;
}

void apply_1q(StateVector& psi, int qubit, const Mat2& u) {
    const std::size_t mask = std::size_t(1) << qubit;
    const std::size_t lo_mask = mask - 1;
    const std::size_t hi_mask = ~lo_mask;
    const std::size_t pairs = psi.amp.size() >> 1;
    cplx* a = psi.amp.data();
    for (std::size_t i = 0; i < pairs; ++i) {
        const std::size_t i0 = ((i & hi_mask) << 1) | (i & lo_mask);
        const std::size_t i1 = i0 | mask;
        const cplx a0 = a[i0], a1 = a[i1];
        a[i0] = u[0] * a0 + u[1] * a1;
        a[i1] = u[2] * a0 + u[3] * a1;
    }
}

void apply_2q(StateVector& psi, int q_low, int q_high, const Mat4& u) {
    // Basis order of u is |q_high q_low>: |00>, |01>, |10>, |11>.
    if (q_low > q_high) throw std::invalid_argument("apply_2q expects q_low < q_high");
    const std::size_t m_lo = std::size_t(1) << q_low;
    const std::size_t m_hi = std::size_t(1) << q_high;
    const std::size_t groups = psi.amp.size() >> 2;
    cplx* a = psi.amp.data();
    const std::size_t low_keep = m_lo - 1;
    for (std::size_t i = 0; i < groups; ++i) {
        // spread i into an index with zeros at q_low and q_high
        std::size_t t = i;
        std::size_t idx = t & low_keep;
        t >>= q_low;
        idx |= (t & ((m_hi >> (q_low + 1)) - 1)) << (q_low + 1);
        t >>= (q_high - q_low - 1);
        idx |= t << (q_high + 1);
        const std::size_t i00 = idx;
        const std::size_t i01 = idx | m_lo;
        const std::size_t i10 = idx | m_hi;
        const std::size_t i11 = idx | m_lo | m_hi;
        const cplx a00 = a[i00], a01 = a[i01], a10 = a[i10], a11 = a[i11];
        a[i00] = u[0] * a00 + u[1] * a01 + u[2] * a10 + u[3] * a11;
        a[i01] = u[4] * a00 + u[5] * a01 + u[6] * a10 + u[7] * a11;
        a[i10] = u[8] * a00 + u[9] * a01 + u[10] * a10 + u[11] * a11;
        a[i11] = u[12] * a00 + u[13] * a01 + u[14] * a10 + u[15] * a11;
    }
}

namespace {

Mat2 conj2(const Mat2& u) {
    Mat2 v;
    for (int i = 0; i < 4; ++i) v[i] = std::conj(u[i]);
    return v;
}

Mat4 conj4(const Mat4& u) {
    Mat4 v;
    for (int i = 0; i < 16; ++i) v[i] = std::conj(u[i]);
    return v;
}

// The D x D density matrix viewed as a 2n-qubit vector: column bits are
// [0, n), row bits are [n, 2n).
StateVector& as_vec(DensityMatrix& rho, StateVector& view) {
    view.n = 2 * rho.n;
    view.amp.swap(rho.rho);
    return view;
}

Mat4 exchange_qubits(const Mat4& u) {
    Mat4 v;
    static const int perm[4] = {0, 2, 1, 3};
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) v[perm[r] * 4 + perm[c]] = u[r * 4 + c];
    return v;
}

}  // namespace

// Gate.u2 convention: basis |qubits[0] qubits[1]> with the first listed qubit
// most significant. apply_2q wants |q_high q_low>, so the matrix is permuted
// when qubits[0] is the lower index.
void apply_gate_2q(StateVector& psi, int qa, int qb, const Mat4& u) {
    if (qa > qb)
        apply_2q(psi, qb, qa, u);
    else
        apply_2q(psi, qa, qb, exchange_qubits(u));
}

void apply_1q(DensityMatrix& rho, int qubit, const Mat2& u) {
    StateVector view;
    as_vec(rho, view);
    apply_1q(view, rho.n + qubit, u);        // row index: U
    apply_1q(view, qubit, conj2(u));         // column index: conj(U)
    rho.rho.swap(view.amp);
}

void apply_2q(DensityMatrix& rho, int q0, int q1, const Mat4& u_in) {
    const Mat4 u = q0 > q1 ? u_in : exchange_qubits(u_in);
    const int lo = std::min(q0, q1), hi = std::max(q0, q1);
    StateVector view;
    as_vec(rho, view);
    apply_2q(view, rho.n + lo, rho.n + hi, u);
    apply_2q(view, lo, hi, conj4(u));
    rho.rho.swap(view.amp);
}

void depolarize_1q(DensityMatrix& rho, int qubit, double p1) {
    if (p1 <= 0) return;
    const double f = std::exp(-4.0 * p1 / 3.0);
    const std::size_t d = std::size_t(1) << rho.n;
    const std::size_t mask = std::size_t(1) << qubit;
    for (std::size_t r = 0; r < d; ++r) {
        for (std::size_t c = 0; c < d; ++c) {
            if ((r & mask) == (c & mask)) continue;
            rho.rho[r * d + c] *= f;
        }
    }
    // diagonal-in-qubit sector: identity part fixed, Z part decays
    for (std::size_t r = 0; r < d; ++r) {
        if (r & mask) continue;
        for (std::size_t c = 0; c < d; ++c) {
            if (c & mask) continue;
            const std::size_t i00 = r * d + c;
            const std::size_t i11 = (r | mask) * d + (c | mask);
            const cplx mean = 0.5 * (rho.rho[i00] + rho.rho[i11]);
            const cplx dev = 0.5 * (rho.rho[i00] - rho.rho[i11]);
            rho.rho[i00] = mean + f * dev;
            rho.rho[i11] = mean - f * dev;
        }
    }
}

void depolarize_2q(DensityMatrix& rho, int q0, int q1, double p2) {
    if (p2 <= 0) return;
    const double f = std::exp(-16.0 * p2 / 15.0);
    const std::size_t d = std::size_t(1) << rho.n;
    const std::size_t m0 = std::size_t(1) << q0;
    const std::size_t m1 = std::size_t(1) << q1;
    const std::size_t pair_mask = m0 | m1;
    for (std::size_t r = 0; r < d; ++r) {
        if (r & pair_mask) continue;
        for (std::size_t c = 0; c < d; ++c) {
            if (c & pair_mask) continue;
            // 4x4 block over pair values of (row, col)
            const std::size_t rows[4] = {r, r | m0, r | m1, r | pair_mask};
            const std::size_t cols[4] = {c, c | m0, c | m1, c | pair_mask};
            cplx tr(0, 0);
            for (int k = 0; k < 4; ++k) tr += rho.rho[rows[k] * d + cols[k]];
            for (int rr = 0; rr < 4; ++rr)
                for (int cc = 0; cc < 4; ++cc) rho.rho[rows[rr] * d + cols[cc]] *= f;
            const cplx add = (1.0 - f) * tr * 0.25;
            for (int k = 0; k < 4; ++k) rho.rho[rows[k] * d + cols[k]] += add;
        }
    }
}

StateVector run_ideal(const Circuit& circuit, int max_qubits) {
    if (circuit.n > max_qubits) throw std::runtime_error("run_ideal: dimension overflow");
    StateVector psi = StateVector::zero_state(circuit.n);
    for (const auto& g : circuit.gates) {
        if (g.kind == Gate::Kind::one_qubit)
            apply_1q(psi, g.qubits[0], g.u1);
        else
            apply_gate_2q(psi, g.qubits[0], g.qubits[1], g.u2);
    }
    return psi;
}

DensityMatrix run_depolarizing(const Circuit& circuit, const NoiseModel& noise, int max_qubits) {
    if (circuit.n > max_qubits) throw std::runtime_error("run_depolarizing: dimension overflow");
    DensityMatrix rho = DensityMatrix::zero_state(circuit.n);
    int current_cycle = circuit.gates.empty() ? 0 : circuit.gates.front().cycle;
    bool cycle_had_2q = false;
    auto finish_cycle = [&] {
        if (cycle_had_2q && noise.p1 > 0)
            for (int q = 0; q < circuit.n; ++q) depolarize_1q(rho, q, noise.p1);
        cycle_had_2q = false;
    };
    for (const auto& g : circuit.gates) {
        if (g.cycle != current_cycle) {
            finish_cycle();
            current_cycle = g.cycle;
        }
        if (g.kind == Gate::Kind::one_qubit) {
            apply_1q(rho, g.qubits[0], g.u1);
        } else {
            apply_2q(rho, g.qubits[0], g.qubits[1], g.u2);
            depolarize_2q(rho, g.qubits[0], g.qubits[1], noise.p2);
            cycle_had_2q = true;
        }
    }
    finish_cycle();
    return rho;
}

StateVector run_trajectory(const Circuit& circuit, const NoiseModel& noise, std::uint64_t seed,
                           int max_qubits) {
    if (circuit.n > max_qubits) throw std::runtime_error("run_trajectory: dimension overflow");
    StateVector psi = StateVector::zero_state(circuit.n);
    Rng rng = Rng(seed).substream(0x7472);
    const double lam2 = 15.0 / 16.0 * (1.0 - std::exp(-16.0 * noise.p2 / 15.0));
    const double lam1 = 3.0 / 4.0 * (1.0 - std::exp(-4.0 * noise.p1 / 3.0));
    static const Mat2 paulis[3] = {
        Mat2{cplx(0, 0), cplx(1, 0), cplx(1, 0), cplx(0, 0)},
        Mat2{cplx(0, 0), cplx(0, -1), cplx(0, 1), cplx(0, 0)},
        Mat2{cplx(1, 0), cplx(0, 0), cplx(0, 0), cplx(-1, 0)},
    };
    auto pauli_1q = [&](int q) {
        apply_1q(psi, q, paulis[rng.next_below(3)]);
    };
    int current_cycle = circuit.gates.empty() ? 0 : circuit.gates.front().cycle;
    bool cycle_had_2q = false;
    auto finish_cycle = [&] {
        if (cycle_had_2q && lam1 > 0)
            for (int q = 0; q < circuit.n; ++q)
                if (rng.next_double() < lam1) pauli_1q(q);
        cycle_had_2q = false;
    };
    for (const auto& g : circuit.gates) {
        if (g.cycle != current_cycle) {
            finish_cycle();
            current_cycle = g.cycle;
        }
        if (g.kind == Gate::Kind::one_qubit) {
            apply_1q(psi, g.qubits[0], g.u1);
        } else {
            apply_gate_2q(psi, g.qubits[0], g.qubits[1], g.u2);
            if (lam2 > 0 && rng.next_double() < lam2) {
                const std::uint64_t which = 1 + rng.next_below(15);
                if (which % 4 != 0) apply_1q(psi, g.qubits[0], paulis[which % 4 - 1]);
                if (which / 4 != 0) apply_1q(psi, g.qubits[1], paulis[which / 4 - 1]);
            }
            cycle_had_2q = true;
        }
    }
    finish_cycle();
    return psi;
}

std::vector<double> probabilities(const StateVector& psi) {
    std::vector<double> p(psi.amp.size());
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = std::norm(psi.amp[i]);
    return p;
}

SampleSet sample_bitstrings(const std::vector<double>& sampling_probs,
                            const std::vector<double>& ideal_probs, int n, std::size_t count,
                            std::uint64_t seed) {
    std::vector<double> cdf(sampling_probs.size());
    double acc = 0;
    for (std::size_t i = 0; i < sampling_probs.size(); ++i) {
        acc += sampling_probs[i];
        cdf[i] = acc;
    }
    if (std::abs(acc - 1.0) > 1e-6) throw std::invalid_argument("sample_bitstrings: not normalized");
    SampleSet out;
    out.n = n;
    out.bitstrings.reserve(count);
    out.probs.reserve(count);
    Rng rng = Rng(seed).substream(0x5A4D);
    for (std::size_t i = 0; i < count; ++i) {
        const double u = rng.next_double() * acc;
        const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        const std::size_t idx = std::min<std::size_t>(it - cdf.begin(), cdf.size() - 1);
        out.bitstrings.push_back(idx);
        out.probs.push_back(ideal_probs.empty() ? sampling_probs[idx] : ideal_probs[idx]);
    }
    return out;
}

SampleSet sample_bitstrings(const StateVector& psi, std::size_t count, std::uint64_t seed) {
    const auto p = probabilities(psi);
    return sample_bitstrings(p, p, psi.n, count, seed);
}

SampleSet sample_bitstrings(const DensityMatrix& rho, const std::vector<double>& ideal_probs,
                            std::size_t count, std::uint64_t seed) {
    return sample_bitstrings(rho.diagonal(), ideal_probs, rho.n, count, seed);
}

double xeb_between(const std::vector<double>& model_probs, const std::vector<double>& ideal_probs) {
    if (model_probs.size() != ideal_probs.size())
        throw std::invalid_argument("xeb_between: dimension mismatch");
    double s = 0;
    for (std::size_t i = 0; i < model_probs.size(); ++i) s += model_probs[i] * ideal_probs[i];
    return double(model_probs.size()) * s - 1.0;
}

double state_fidelity(const DensityMatrix& rho, const StateVector& psi) {
    const std::size_t d = psi.amp.size();
    cplx acc(0, 0);
    for (std::size_t r = 0; r < d; ++r) {
        cplx row(0, 0);
        for (std::size_t c = 0; c < d; ++c) row += rho.rho[r * d + c] * psi.amp[c];
        acc += std::conj(psi.amp[r]) * row;
    }
    return acc.real();
}

void write_state(const StateVector& psi, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path);
    const char magic[4] = {'P', 'H', 'S', 'V'};
    const std::uint32_t version = 1, n = std::uint32_t(psi.n);
    f.write(magic, 4);
    f.write(reinterpret_cast<const char*>(&version), 4);
    f.write(reinterpret_cast<const char*>(&n), 4);
    for (const auto& a : psi.amp) {
        const double re = a.real(), im = a.imag();
        f.write(reinterpret_cast<const char*>(&re), 8);
        f.write(reinterpret_cast<const char*>(&im), 8);
    }
}

StateVector read_state(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path);
    char magic[4];
    std::uint32_t version = 0, n = 0;
    f.read(magic, 4);
    f.read(reinterpret_cast<char*>(&version), 4);
    f.read(reinterpret_cast<char*>(&n), 4);
    if (std::memcmp(magic, "PHSV", 4) != 0 || version != 1)
        throw std::runtime_error("bad state file header");
    StateVector psi;
    psi.n = int(n);
    psi.amp.resize(std::size_t(1) << n);
    for (auto& a : psi.amp) {
        double re, im;
        f.read(reinterpret_cast<char*>(&re), 8);
        f.read(reinterpret_cast<char*>(&im), 8);
        a = cplx(re, im);
    }
    if (!f) throw std::runtime_error("truncated state file");
    return psi;
}

void write_samples(const SampleSet& samples, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path);
    const int width = (samples.n + 3) / 4;
    char buf[32];
    for (const auto s : samples.bitstrings) {
        std::snprintf(buf, sizeof buf, "%0*llx", width, static_cast<unsigned long long>(s));
        f << buf << '\n';
    }
}

std::vector<std::uint64_t> read_samples(const std::string& path, int n) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path);
    std::vector<std::uint64_t> out;
    std::string line;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        const std::uint64_t v = std::stoull(line, nullptr, 16);
        if (n < 64 && (v >> n) != 0) throw std::runtime_error("sample exceeds n bits");
        out.push_back(v);
    }
    return out;
}

}  // namespace phaselab
