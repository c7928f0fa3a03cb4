#include "phaselab/stabilizer.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

#include "phaselab/parallel.hpp"

namespace phaselab::stabilizer {

namespace {

constexpr cplx kI{0, 1};

// dense Pauli matrices for image matching
void pauli_mat2(int x, int z, cplx out[4]) {
    // X^x Z^z
    const cplx zero(0, 0), one(1, 0);
    if (!x && !z) { out[0] = one; out[1] = zero; out[2] = zero; out[3] = one; }
    if (x && !z) { out[0] = zero; out[1] = one; out[2] = one; out[3] = zero; }
    if (!x && z) { out[0] = one; out[1] = zero; out[2] = zero; out[3] = -one; }
    if (x && z) { out[0] = zero; out[1] = -one; out[2] = one; out[3] = zero; }  // XZ
}

std::array<cplx, 16> mul4(const std::array<cplx, 16>& a, const std::array<cplx, 16>& b) {
    std::array<cplx, 16> c{};
    for (int i = 0; i < 4; ++i)
        for (int k = 0; k < 4; ++k)
            for (int j = 0; j < 4; ++j) c[i * 4 + j] += a[i * 4 + k] * b[k * 4 + j];
    return c;
}

std::array<cplx, 16> dagger4(const std::array<cplx, 16>& a) {
    std::array<cplx, 16> c;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) c[i * 4 + j] = std::conj(a[j * 4 + i]);
    return c;
}

std::array<cplx, 16> kron2(const cplx a[4], const cplx b[4]) {
    // first factor = most significant qubit
    std::array<cplx, 16> c{};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k)
                for (int l = 0; l < 2; ++l)
                    c[(i * 2 + k) * 4 + (j * 2 + l)] = a[i * 2 + j] * b[k * 2 + l];
    return c;
}

bool match_scaled(const cplx* a, const cplx* b, int len, int& phase_out) {
    // a == i^t b for some t?
    for (int t = 0; t < 4; ++t) {
        cplx f(1, 0);
        for (int k = 0; k < t; ++k) f *= kI;
        bool ok = true;
        for (int i = 0; i < len && ok; ++i)
            if (std::abs(a[i] - f * b[i]) > 1e-9) ok = false;
        if (ok) {
            phase_out = t;
            return true;
        }
    }
    return false;
}

[[noreturn]] void non_clifford() { throw std::runtime_error("non-Clifford gate encountered"); }

}  // namespace

Action1q action_from_mat2(const Mat2& u) {
    Action1q act{};
    // images of the 4 input patterns (x, z); identity handled like the rest
    cplx udag[4] = {std::conj(u[0]), std::conj(u[2]), std::conj(u[1]), std::conj(u[3])};
    for (int in = 0; in < 4; ++in) {
        const int x = in & 1, z = in >> 1;
        cplx p[4];
        pauli_mat2(x, z, p);
        // u p udag
        cplx up[4] = {u[0] * p[0] + u[1] * p[2], u[0] * p[1] + u[1] * p[3],
                      u[2] * p[0] + u[3] * p[2], u[2] * p[1] + u[3] * p[3]};
        cplx img[4] = {up[0] * udag[0] + up[1] * udag[2], up[0] * udag[1] + up[1] * udag[3],
                       up[2] * udag[0] + up[3] * udag[2], up[2] * udag[1] + up[3] * udag[3]};
        bool found = false;
        for (int out = 0; out < 4 && !found; ++out) {
            cplx q[4];
            pauli_mat2(out & 1, out >> 1, q);
            int t;
            if (match_scaled(img, q, 4, t)) {
                act.out_bits[in] = std::uint8_t(out);
                act.phase_add[in] = std::uint8_t(t);
                found = true;
            }
        }
        if (!found) non_clifford();
    }
    return act;
}

Action2q action_from_mat4(const Mat4& u) {
    Action2q act{};
    std::array<cplx, 16> um;
    std::copy(u.begin(), u.end(), um.begin());
    const auto ud = dagger4(um);
    for (int in = 0; in < 16; ++in) {
        const int x1 = in & 1, z1 = (in >> 1) & 1, x2 = (in >> 2) & 1, z2 = (in >> 3) & 1;
        cplx p1[4], p2[4];
        pauli_mat2(x1, z1, p1);
        pauli_mat2(x2, z2, p2);
        const auto img = mul4(mul4(um, kron2(p1, p2)), ud);
        bool found = false;
        for (int out = 0; out < 16 && !found; ++out) {
            cplx q1[4], q2[4];
            pauli_mat2(out & 1, (out >> 1) & 1, q1);
            pauli_mat2((out >> 2) & 1, (out >> 3) & 1, q2);
            const auto cand = kron2(q1, q2);
            int t;
            if (match_scaled(img.data(), cand.data(), 16, t)) {
                act.out_bits[in] = std::uint8_t(out);
                act.phase_add[in] = std::uint8_t(t);
                found = true;
            }
        }
        if (!found) non_clifford();
    }
    return act;
}

Tableau Tableau::zero_state(int n) {
    if (n < 1 || n > 64) throw std::runtime_error("tableau supports 1..64 qubits");
    Tableau t;
    t.n = n;
    t.rows.resize(2 * std::size_t(n));
    for (int q = 0; q < n; ++q) {
        t.rows[q].x = std::uint64_t(1) << q;       // destabilizer X_q
        t.rows[n + q].z = std::uint64_t(1) << q;   // stabilizer Z_q
    }
    return t;
}

namespace {

// row_i *= row_p with exact phase: i^{ph} X^x Z^z convention, reordering
// Z^{z_i} past X^{x_p} costs (-1)^{|z_i & x_p|}.
void row_mul(PauliRow& ri, const PauliRow& rp) {
    ri.phase = std::uint8_t((ri.phase + rp.phase + 2 * (std::popcount(ri.z & rp.x) & 1)) & 3);
    ri.x ^= rp.x;
    ri.z ^= rp.z;
}

bool commutes(const PauliRow& a, const PauliRow& b) {
    return ((std::popcount(a.x & b.z) + std::popcount(a.z & b.x)) & 1) == 0;
}

int hermitian_sign(const PauliRow& r) {
    // i^{ph} (XZ)-form = i^{ph} (-i)^{|x&z|} * Hermitian Pauli
    const int w = std::popcount(r.x & r.z);
    const int s = (int(r.phase) - w) & 3;
    if (s & 1) throw std::logic_error("non-Hermitian tableau row");
    return s == 0 ? +1 : -1;
}

}  // namespace

bool Tableau::is_valid() const {
    const int nn = n;
    for (int i = 0; i < 2 * nn; ++i)
        if (((rows[i].phase - std::popcount(rows[i].x & rows[i].z)) & 1) != 0) return false;
    for (int i = 0; i < nn; ++i) {
        if (commutes(rows[i], rows[nn + i])) return false;  // destab_i vs stab_i
        for (int j = 0; j < nn; ++j) {
            if (j != i && !commutes(rows[i], rows[nn + j])) return false;
            if (!commutes(rows[nn + i], rows[nn + j]) && j != i) return false;
            if (j != i && !commutes(rows[i], rows[j])) return false;
        }
    }
    // full rank of the 2n x 2n symplectic matrix
    std::vector<std::pair<std::uint64_t, std::uint64_t>> m;
    for (const auto& r : rows) m.emplace_back(r.x, r.z);
    int rank = 0;
    for (int bit = 0; bit < 2 * nn; ++bit) {
        const bool xpart = bit < nn;
        const std::uint64_t mask = std::uint64_t(1) << (xpart ? bit : bit - nn);
        int pivot = -1;
        for (std::size_t r = rank; r < m.size(); ++r) {
            const std::uint64_t v = xpart ? m[r].first : m[r].second;
            if (v & mask) {
                pivot = int(r);
                break;
            }
        }
        if (pivot < 0) continue;
        std::swap(m[rank], m[pivot]);
        for (std::size_t r = 0; r < m.size(); ++r) {
            if (int(r) == rank) continue;
            const std::uint64_t v = xpart ? m[r].first : m[r].second;
            if (v & mask) {
                m[r].first ^= m[rank].first;
                m[r].second ^= m[rank].second;
            }
        }
        ++rank;
    }
    return rank == 2 * nn;
}

void apply_1q(Tableau& tab, int q, const Action1q& a) {
    const std::uint64_t mask = std::uint64_t(1) << q;
    for (auto& r : tab.rows) {
        const int in = int((r.x >> q) & 1) | (int((r.z >> q) & 1) << 1);
        if (in == 0) continue;
        const int out = a.out_bits[in];
        r.x = (r.x & ~mask) | (std::uint64_t(out & 1) << q);
        r.z = (r.z & ~mask) | (std::uint64_t((out >> 1) & 1) << q);
        r.phase = std::uint8_t((r.phase + a.phase_add[in]) & 3);
    }
}

void apply_2q(Tableau& tab, int q1, int q2, const Action2q& a) {
    const std::uint64_t m1 = std::uint64_t(1) << q1;
    const std::uint64_t m2 = std::uint64_t(1) << q2;
    for (auto& r : tab.rows) {
        const int in = int((r.x >> q1) & 1) | (int((r.z >> q1) & 1) << 1) |
                       (int((r.x >> q2) & 1) << 2) | (int((r.z >> q2) & 1) << 3);
        if (in == 0) continue;
        const int out = a.out_bits[in];
        r.x = (r.x & ~(m1 | m2)) | (std::uint64_t(out & 1) << q1) | (std::uint64_t((out >> 2) & 1) << q2);
        r.z = (r.z & ~(m1 | m2)) | (std::uint64_t((out >> 1) & 1) << q1) |
              (std::uint64_t((out >> 3) & 1) << q2);
        r.phase = std::uint8_t((r.phase + a.phase_add[in]) & 3);
    }
}

namespace {

// Gate-action cache. Discrete 1q gates are cached by exponent; entanglers by
// their two angles.
const Action1q& cached_action(double exponent_p) {
    static std::map<long long, Action1q> cache;
    static std::mutex mu;
    const long long key = llround(exponent_p * 4);
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, action_from_mat2(discrete_1q(exponent_p))).first;
    return it->second;
}

const Action2q& cached_entangler(const Mat4& u) {
    static std::map<std::pair<long long, long long>, Action2q> cache;
    static std::mutex mu;
    const auto key = std::make_pair(llround(u[5].real() * 1e9) ^ llround(u[5].imag() * 1e9),
                                    llround(u[15].real() * 1e9) ^ llround(u[15].imag() * 1e9));
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, action_from_mat4(u)).first;
    return it->second;
}

}  // namespace

Tableau clifford_run(const Circuit& circuit) {
    Tableau tab = Tableau::zero_state(circuit.n);
    for (const auto& g : circuit.gates) {
        if (g.kind == Gate::Kind::one_qubit) {
            if (g.from_discrete_set)
                apply_1q(tab, g.qubits[0], cached_action(g.exponent_p));
            else
                apply_1q(tab, g.qubits[0], action_from_mat2(g.u1));
        } else {
            // Gate.u2 basis is |qubits[0] qubits[1]> (first most significant);
            // the action LUT indexes (pauli on q1, pauli on q2) with q1 the
            // first argument, so feed qubits in the same order.
            const Action2q& a = cached_entangler(g.u2);
            apply_2q(tab, g.qubits[0], g.qubits[1], a);
        }
    }
    return tab;
}

namespace {

// Measurement of qubit q in the Z basis with an optional forced outcome.
// Returns {outcome, was_random}. The tableau collapses accordingly.
std::pair<int, bool> measure_z(Tableau& tab, int q, std::optional<int> force, Rng* rng) {
    const int n = tab.n;
    const std::uint64_t mask = std::uint64_t(1) << q;
    int p = -1;
    for (int i = n; i < 2 * n; ++i)
        if (tab.rows[i].x & mask) {
            p = i;
            break;
        }
    if (p >= 0) {
        for (int i = 0; i < 2 * n; ++i)
            if (i != p && (tab.rows[i].x & mask)) row_mul(tab.rows[i], tab.rows[p]);
        const int outcome = force ? *force : int(rng->next_below(2));
        tab.rows[p - n] = tab.rows[p];
        tab.rows[p].x = 0;
        tab.rows[p].z = mask;
        tab.rows[p].phase = std::uint8_t(outcome ? 2 : 0);
        return {outcome, true};
    }
    // deterministic: accumulate stabilizer rows whose destabilizer hits q
    PauliRow scratch;
    for (int i = 0; i < n; ++i)
        if (tab.rows[i].x & mask) row_mul(scratch, tab.rows[n + i]);
    const int outcome = hermitian_sign(scratch) > 0 ? 0 : 1;
    return {outcome, false};
}

}  // namespace

double amplitude_squared(const Tableau& tab_in, std::uint64_t bits) {
    Tableau tab = tab_in;
    double prob = 1.0;
    for (int q = 0; q < tab.n; ++q) {
        const int want = int((bits >> q) & 1);
        auto [outcome, randomized] = measure_z(tab, q, want, nullptr);
        if (randomized) {
            prob *= 0.5;
        } else if (outcome != want) {
            return 0.0;
        }
    }
    return prob;
}

std::uint64_t sample_bitstring(Tableau tab, Rng& rng) {
    std::uint64_t bits = 0;
    for (int q = 0; q < tab.n; ++q) {
        auto [outcome, randomized] = measure_z(tab, q, std::nullopt, &rng);
        (void)randomized;
        bits |= std::uint64_t(outcome) << q;
    }
    return bits;
}

int support_rank(const Tableau& tab) {
    std::vector<std::uint64_t> xs;
    xs.reserve(tab.n);
    for (int i = tab.n; i < 2 * tab.n; ++i) xs.push_back(tab.rows[i].x);
    int rank = 0;
    for (int bit = 0; bit < tab.n; ++bit) {
        const std::uint64_t mask = std::uint64_t(1) << bit;
        int pivot = -1;
        for (std::size_t r = rank; r < xs.size(); ++r)
            if (xs[r] & mask) {
                pivot = int(r);
                break;
            }
        if (pivot < 0) continue;
        std::swap(xs[rank], xs[std::size_t(pivot)]);
        for (std::size_t r = 0; r < xs.size(); ++r)
            if (int(r) != rank && (xs[r] & mask)) xs[r] ^= xs[std::size_t(rank)];
        ++rank;
    }
    return rank;
}

double self_xeb(const Tableau& tab) {
    return std::ldexp(1.0, tab.n - support_rank(tab)) - 1.0;
}

double reduced_purity(const Tableau& tab, std::uint64_t qubit_mask) {
    // S_A = rank of the stabilizer generators restricted to A, minus |A|;
    // purity = 2^-S_A.
    const int na = std::popcount(qubit_mask);
    std::vector<std::pair<std::uint64_t, std::uint64_t>> m;
    for (int i = tab.n; i < 2 * tab.n; ++i)
        m.emplace_back(tab.rows[i].x & qubit_mask, tab.rows[i].z & qubit_mask);
    int rank = 0;
    for (int half = 0; half < 2; ++half) {
        for (int bit = 0; bit < 64; ++bit) {
            if (!(qubit_mask >> bit & 1)) continue;
            const std::uint64_t mask = std::uint64_t(1) << bit;
            int pivot = -1;
            for (std::size_t r = rank; r < m.size(); ++r) {
                const std::uint64_t v = half == 0 ? m[r].first : m[r].second;
                if (v & mask) {
                    pivot = int(r);
                    break;
                }
            }
            if (pivot < 0) continue;
            std::swap(m[std::size_t(rank)], m[std::size_t(pivot)]);
            for (std::size_t r = 0; r < m.size(); ++r) {
                if (int(r) == rank) continue;
                const std::uint64_t v = half == 0 ? m[r].first : m[r].second;
                if (v & mask) {
                    m[r].first ^= m[std::size_t(rank)].first;
                    m[r].second ^= m[std::size_t(rank)].second;
                }
            }
            ++rank;
        }
    }
    return std::ldexp(1.0, -(rank - na));
}

double xeb_asymptote(int n) {
    const double x = std::ldexp(1.0, -n);
    return (1.0 - x) / (1.0 + x);
}

DecayTable clifford_xeb_decay(const std::vector<CircuitSpec>& shapes,
                              const std::vector<int>& d_list, int samples_m,
                              std::uint64_t seed) {
    if (samples_m < 2) throw std::invalid_argument("need at least two samples");
    DecayTable table;
    table.samples = samples_m;
    std::vector<int> depths = d_list;
    std::sort(depths.begin(), depths.end());
    for (const auto& base : shapes) {
        const int n = base.n;
        std::vector<double> sum(depths.size(), 0.0), sumsq(depths.size(), 0.0);
        std::mutex mu;
        const unsigned workers = thread_budget();
        parallel_for(workers, [&](std::size_t w) {
            std::vector<double> lsum(depths.size(), 0.0), lsq(depths.size(), 0.0);
            for (int inst = int(w); inst < samples_m; inst += int(workers)) {
                CircuitSpec spec = base;
                spec.gate_ensemble = GateEnsemble::clifford_zxz;
                spec.depth_cycles = depths.back();
                spec.seed = Rng(seed).substream(n).substream(inst).next_u64();
                const Circuit c = build_circuit(spec);
                Tableau tab = Tableau::zero_state(n);
                std::size_t gi = 0;
                for (std::size_t di = 0; di < depths.size(); ++di) {
                    while (gi < c.gates.size() && c.gates[gi].cycle <= depths[di]) {
                        const auto& g = c.gates[gi];
                        if (g.kind == Gate::Kind::one_qubit)
                            apply_1q(tab, g.qubits[0], cached_action(g.exponent_p));
                        else
                            apply_2q(tab, g.qubits[0], g.qubits[1], cached_entangler(g.u2));
                        ++gi;
                    }
                    const double x = self_xeb(tab);
                    lsum[di] += x;
                    lsq[di] += x * x;
                }
            }
            std::lock_guard<std::mutex> lock(mu);
            for (std::size_t di = 0; di < depths.size(); ++di) {
                sum[di] += lsum[di];
                sumsq[di] += lsq[di];
            }
        });
        for (std::size_t di = 0; di < depths.size(); ++di) {
            DecayPoint pt;
            pt.n = n;
            pt.d = depths[di];
            pt.xeb = sum[di] / samples_m;
            const double var = std::max(0.0, sumsq[di] / samples_m - pt.xeb * pt.xeb);
            pt.stderr_mean = std::sqrt(var / samples_m);
            pt.floor_ = 1.0 / std::sqrt(double(samples_m));
            table.points.push_back(pt);
        }
    }
    return table;
}

LambdaFit fit_lambda(const DecayTable& table) {
    std::vector<std::pair<double, double>> pts;  // (d, log(xeb - C))
    double floor_ = 0;
    for (const auto& p : table.points) {
        floor_ = p.floor_;
        const double signal = p.xeb - xeb_asymptote(p.n);
        if (signal >= 3.0 * p.floor_) pts.emplace_back(double(p.d), std::log(signal));
    }
    if (pts.size() < 2)
        throw std::runtime_error("all decay points are below the resolution floor");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (auto [x, y] : pts) {
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double m = double(pts.size());
    const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    const double intercept = (sy - slope * sx) / m;
    double ss_res = 0;
    for (auto [x, y] : pts) {
        const double r = y - (slope * x + intercept);
        ss_res += r * r;
    }
    LambdaFit fit;
    fit.log_lambda = slope;
    fit.intercept = intercept;
    fit.points_used = int(pts.size());
    fit.floor_ = floor_;
    fit.stderr_slope = pts.size() > 2
                           ? std::sqrt(ss_res / (m - 2) / (sxx - sx * sx / m))
                           : 0.0;
    return fit;
}

}  // namespace phaselab::stabilizer
