#include "phaselab/popdyn3.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

namespace phaselab::popdyn3 {

namespace {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;

// factor order inside one qubit's doubled space: (replica1, replica2);
// basis index of C^4 = r1 * 2 + r2. Pair space factor order
// (j1, j2, k1, k2); basis index of C^16 = ((j1*2 + j2)*2 + k1)*2 + k2.

MatrixXcd kron(const MatrixXcd& a, const MatrixXcd& b) {
    MatrixXcd c(a.rows() * b.rows(), a.cols() * b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) c.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return c;
}

MatrixXcd adjoint_superop(const MatrixXcd& u) {
    // vec(U M U^dag) = (U kron conj(U)) vec(M), vec row-major
    return kron(u, u.conjugate());
}

MatrixXcd mat2_to_eigen(const Mat2& m) {
    MatrixXcd u(2, 2);
    u << m[0], m[1], m[2], m[3];
    return u;
}

// single-qubit twirl superop over the discrete set, on the 16-dim doubled space
MatrixXcd discrete_twirl() {
    MatrixXcd t = MatrixXcd::Zero(16, 16);
    for (double p : discrete_exponents()) {
        const MatrixXcd g = mat2_to_eigen(discrete_1q(p));
        t += adjoint_superop(kron(g, g));
    }
    return t / 8.0;
}

// Pauli twirl of replica 2 only, minus identity: the depolarizing channel on
// the noisy replica is id + lam * kick.
MatrixXcd noise_kick_superop() {
    const MatrixXcd i2 = MatrixXcd::Identity(2, 2);
    MatrixXcd x(2, 2), y(2, 2), z(2, 2);
    x << 0, 1, 1, 0;
    y << cplx(0, 0), cplx(0, -1), cplx(0, 1), cplx(0, 0);
    z << 1, 0, 0, -1;
    MatrixXcd kick = MatrixXcd::Zero(16, 16);
    for (const auto& p : {x, y, z}) kick += adjoint_superop(kron(i2, p));
    return kick / 3.0 - MatrixXcd::Identity(16, 16);
}

// iSWAP acting on both replicas, in pair factor order (j1, j2, k1, k2).
MatrixXcd pair_gate_superop() {
    const Mat4 u_flat = iswap();
    MatrixXcd u(4, 4);
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) u(r, c) = u_flat[r * 4 + c];
    // U_pair[(j1 j2 k1 k2), (j1' j2' k1' k2')] = U[(j1 k1),(j1' k1')] U[(j2 k2),(j2' k2')]
    MatrixXcd up = MatrixXcd::Zero(16, 16);
    for (int r = 0; r < 16; ++r)
        for (int c = 0; c < 16; ++c) {
            const int j1 = r >> 3 & 1, j2 = r >> 2 & 1, k1 = r >> 1 & 1, k2 = r & 1;
            const int J1 = c >> 3 & 1, J2 = c >> 2 & 1, K1 = c >> 1 & 1, K2 = c & 1;
            up(r, c) = u(j1 * 2 + k1, J1 * 2 + K1) * u(j2 * 2 + k2, J2 * 2 + K2);
        }
    return adjoint_superop(up);
}

// superop acting on the j (or k) qubit factors of the pair space
MatrixXcd lift_single(const MatrixXcd& super16, bool on_j) {
    // vec index of pair op: R * 16 + C with R = (j1 j2 k1 k2); the 16-dim
    // single-qubit superop acts on ((j1 j2) row, (j1 j2) col) = a 4x4 block
    // structure. Build by index bookkeeping.
    MatrixXcd out = MatrixXcd::Zero(256, 256);
    for (int R = 0; R < 16; ++R)
        for (int C = 0; C < 16; ++C) {
            const int jr = R >> 2, kr = R & 3, jc = C >> 2, kc = C & 3;
            for (int JR = 0; JR < 4; ++JR)
                for (int JC = 0; JC < 4; ++JC) {
                    // super16 index: (row_pair, col_pair) -> row_pair*4+col_pair... it
                    // acts on vec(M4) with index r*4+c
                    if (on_j) {
                        out(R * 16 + C, ((JR << 2) | kr) * 16 + ((JC << 2) | kc)) +=
                            super16(jr * 4 + jc, JR * 4 + JC);
                    } else {
                        out(R * 16 + C, ((jr << 2) | JR) * 16 + ((jc << 2) | JC)) +=
                            super16(kr * 4 + kc, JR * 4 + JC);
                    }
                }
        }
    return out;
}

VectorXcd pair_product(const VectorXcd& ea, const VectorXcd& eb) {
    // ea, eb are vecs of 4x4 per-qubit operators; result is the vec of the
    // 16x16 pair operator (j factors from ea, k factors from eb).
    VectorXcd out(256);
    for (int R = 0; R < 16; ++R)
        for (int C = 0; C < 16; ++C) {
            const int jr = R >> 2, kr = R & 3, jc = C >> 2, kc = C & 3;
            out(R * 16 + C) = ea(jr * 4 + jc) * eb(kr * 4 + kc);
        }
    return out;
}

struct Derivation {
    DiscreteEngine engine;
};

Derivation derive() {
    const MatrixXcd twirl = discrete_twirl();
    const MatrixXcd pair_map_full = lift_single(twirl, true) * lift_single(twirl, false) *
                                    pair_gate_superop();

    // initial per-qubit state: twirled |0><0| x |0><0|
    VectorXcd m0 = VectorXcd::Zero(16);
    m0(0) = 1.0;
    m0 = twirl * m0;

    // Krylov closure of the per-qubit space under the twirl and the pair map.
    std::vector<VectorXcd> basis;
    auto add_vec = [&](VectorXcd v) {
        for (const auto& e : basis) v -= e.dot(v) * e;
        const double nrm = v.norm();
        if (nrm < 1e-9) return false;
        basis.push_back(v / nrm);
        return true;
    };
    add_vec(m0);
    for (bool grew = true; grew;) {
        grew = false;
        for (std::size_t i = 0; i < basis.size(); ++i)
            if (add_vec(twirl * basis[i])) grew = true;
        const std::size_t r = basis.size();
        for (std::size_t a = 0; a < r; ++a)
            for (std::size_t b = 0; b < r; ++b) {
                VectorXcd w = pair_map_full * pair_product(basis[a], basis[b]);
                // remove the part already inside span(S x S)
                for (const auto& ei : basis)
                    for (const auto& ej : basis) {
                        const VectorXcd pe = pair_product(ei, ej);
                        w -= pe.dot(w) / pe.squaredNorm() * pe;
                    }
                if (w.norm() < 1e-9) continue;
                // matricize over (j-op, k-op) and split off new directions
                MatrixXcd wm(16, 16);
                for (int R = 0; R < 16; ++R)
                    for (int C = 0; C < 16; ++C) {
                        const int jr = R >> 2, kr = R & 3, jc = C >> 2, kc = C & 3;
                        wm(jr * 4 + jc, kr * 4 + kc) = w(R * 16 + C);
                    }
                Eigen::JacobiSVD<MatrixXcd> svd(wm, Eigen::ComputeFullU | Eigen::ComputeFullV);
                for (int s = 0; s < 16; ++s) {
                    if (svd.singularValues()(s) < 1e-9) break;
                    if (add_vec(svd.matrixU().col(s))) grew = true;
                    if (add_vec(svd.matrixV().col(s).conjugate())) grew = true;
                }
            }
        if (basis.size() > 8)
            throw std::runtime_error("discrete-ensemble invariant space failed to close");
    }

    const int r = int(basis.size());
    Derivation out;
    out.engine.states = r;

    // pair transfer in the closed basis; verify the closure residual
    out.engine.transfer.assign(std::size_t(r * r) * std::size_t(r * r), 0.0);
    for (int a = 0; a < r; ++a)
        for (int b = 0; b < r; ++b) {
            const VectorXcd w = pair_map_full * pair_product(basis[a], basis[b]);
            VectorXcd resid = w;
            for (int i = 0; i < r; ++i)
                for (int j = 0; j < r; ++j) {
                    const VectorXcd pe = pair_product(basis[i], basis[j]);
                    const cplx coeff = pe.dot(w) / pe.squaredNorm();
                    if (std::abs(coeff.imag()) > 1e-9)
                        throw std::runtime_error("discrete engine: complex transfer coefficient");
                    out.engine.transfer[std::size_t(i * r + j) * std::size_t(r * r) + std::size_t(a * r + b)] =
                        coeff.real();
                    resid -= coeff * pe;
                }
            if (resid.norm() > 1e-9)
                throw std::runtime_error("discrete engine: pair map does not close on the product space");
        }

    // single-site twirl restricted to the basis (the discrete twirl is not a
    // projector, so idle qubits evolve nontrivially each cycle)
    out.engine.twirl_site.assign(std::size_t(r) * r, 0.0);
    for (int a = 0; a < r; ++a) {
        VectorXcd w = twirl * basis[std::size_t(a)];
        for (int i = 0; i < r; ++i) {
            const cplx coeff = basis[std::size_t(i)].dot(w);
            out.engine.twirl_site[std::size_t(i) * r + a] = coeff.real();
            w -= coeff * basis[std::size_t(i)];
        }
        if (w.norm() > 1e-9)
            throw std::runtime_error("discrete engine: twirl leaves the invariant space");
    }

    // noise kick restricted to the basis (it commutes with the twirl)
    const MatrixXcd kick = noise_kick_superop();
    out.engine.noise_kick.assign(std::size_t(r) * r, 0.0);
    for (int a = 0; a < r; ++a) {
        VectorXcd w = kick * basis[a];
        for (int i = 0; i < r; ++i) {
            const cplx coeff = basis[i].dot(w);
            out.engine.noise_kick[std::size_t(i) * r + a] = coeff.real();
            w -= coeff * basis[i];
        }
        if (w.norm() > 1e-9)
            throw std::runtime_error("discrete engine: noise map leaves the invariant space");
    }

    // readout weights sum_z <zz|E|zz>: doubled-space diagonal entries 0 and 3
    for (int a = 0; a < r; ++a) {
        const cplx w = basis[a](0 * 4 + 0) + basis[a](3 * 4 + 3);
        out.engine.readout.push_back(w.real());
    }
    // initial coefficients
    for (int a = 0; a < r; ++a) out.engine.initial.push_back(basis[a].dot(m0).real());
    return out;
}

void apply_pair(std::vector<double>& w, int n, int qj, int qk, const DiscreteEngine& eng) {
    const int r = eng.states;
    std::vector<std::size_t> p3(n);
    p3[0] = 1;
    for (int i = 1; i < n; ++i) p3[i] = p3[i - 1] * std::size_t(r);
    const std::size_t total = p3[n - 1] * std::size_t(r);
    std::vector<double> in(std::size_t(r) * r);
    for (std::size_t idx = 0; idx < total; ++idx) {
        const int dj = int(idx / p3[qj]) % r;
        const int dk = int(idx / p3[qk]) % r;
        if (dj != 0 || dk != 0) continue;
        for (int a = 0; a < r; ++a)
            for (int b = 0; b < r; ++b) in[std::size_t(a) * r + b] = w[idx + a * p3[qj] + b * p3[qk]];
        for (int a = 0; a < r; ++a)
            for (int b = 0; b < r; ++b) {
                double acc = 0;
                const double* row = eng.transfer.data() + std::size_t(a * r + b) * std::size_t(r * r);
                for (int c = 0; c < r * r; ++c) acc += row[c] * in[std::size_t(c)];
                w[idx + a * p3[qj] + b * p3[qk]] = acc;
            }
    }
}

void apply_site(std::vector<double>& w, int n, int q, const std::vector<double>& op, int r) {
    std::vector<std::size_t> p3(n);
    p3[0] = 1;
    for (int i = 1; i < n; ++i) p3[i] = p3[i - 1] * std::size_t(r);
    const std::size_t total = p3[n - 1] * std::size_t(r);
    std::vector<double> in(r);
    for (std::size_t idx = 0; idx < total; ++idx) {
        if (int(idx / p3[q]) % r != 0) continue;
        for (int a = 0; a < r; ++a) in[a] = w[idx + a * p3[q]];
        for (int a = 0; a < r; ++a) {
            double acc = 0;
            for (int b = 0; b < r; ++b) acc += op[std::size_t(a) * r + b] * in[b];
            w[idx + a * p3[q]] = acc;
        }
    }
}

}  // namespace

const DiscreteEngine& DiscreteEngine::instance() {
    static const Derivation derived = derive();
    return derived.engine;
}

std::vector<double> evolve(const CircuitSpec& spec, const popdyn::PopNoise& noise, int d_max) {
    const DiscreteEngine& eng = DiscreteEngine::instance();
    const int r = eng.states;
    if (spec.n > 12) throw std::runtime_error("discrete engine supports n <= 12");
    validate_spec(spec);
    const int n = spec.n;
    std::size_t total = 1;
    for (int i = 0; i < n; ++i) total *= std::size_t(r);
    std::vector<double> w(total, 0.0);
    // product initial state
    w[0] = 1.0;
    {
        std::vector<double> site(std::size_t(r) * r, 0.0);
        for (int a = 0; a < r; ++a) site[std::size_t(a) * r] = eng.initial[a];
        for (int q = 0; q < n; ++q) apply_site(w, n, q, site, r);
    }
    auto readout = [&]() {
        std::vector<std::size_t> p3(n);
        p3[0] = 1;
        for (int i = 1; i < n; ++i) p3[i] = p3[i - 1] * std::size_t(r);
        double c = 0;
        for (std::size_t idx = 0; idx < total; ++idx) {
            double prod = w[idx];
            if (prod == 0) continue;
            for (int q = 0; q < n; ++q) prod *= eng.readout[int(idx / p3[q]) % r];
            c += prod;
        }
        return std::ldexp(c, n) - 1.0;
    };
    const double f_traceless = std::exp(-4.0 * (noise.epsilon + noise.p1) / 3.0);
    const double lam = 3.0 / 4.0 * (1.0 - f_traceless);
    std::vector<double> noise_op(std::size_t(r) * r, 0.0);
    for (int a = 0; a < r; ++a)
        for (int b = 0; b < r; ++b)
            noise_op[std::size_t(a) * r + b] = (a == b ? 1.0 : 0.0) + lam * eng.noise_kick[std::size_t(a) * r + b];

    std::vector<double> xeb(d_max + 1);
    xeb[0] = readout();
    for (int cycle = 1; cycle <= d_max; ++cycle) {
        const auto& label = spec.pattern[(cycle - 1) % spec.pattern.size()];
        std::vector<bool> gated(std::size_t(n), false);
        auto fire = [&](std::pair<int, int> bond) {
            if (gated[std::size_t(bond.first)] || gated[std::size_t(bond.second)])
                throw std::invalid_argument(
                    "overlapping two-qubit gates within one cycle break the per-layer average");
            gated[std::size_t(bond.first)] = gated[std::size_t(bond.second)] = true;
            apply_pair(w, n, bond.first, bond.second, eng);
        };
        for (auto bond : pattern_bonds(spec, label))
            if (!crosses_cut(spec, bond)) fire(bond);
        if (spec.weak_link && cycle % spec.weak_link->period_T == 0) fire(weak_link_bond(spec));
        for (int q = 0; q < n; ++q)
            if (!gated[std::size_t(q)]) apply_site(w, n, q, eng.twirl_site, r);
        if (lam > 0)
            for (int q = 0; q < n; ++q) apply_site(w, n, q, noise_op, r);
        xeb[cycle] = readout();
    }
    return xeb;
}

}  // namespace phaselab::popdyn3
