#include "phaselab/schmidt.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

namespace phaselab::schmidt {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

// 64-point Gauss-Legendre nodes on [-1, 1], generated by Newton iteration so
// no table has to be carried around.
struct GaussLegendre {
    std::vector<double> x, w;
    GaussLegendre() {
        const int n = 64;
        x.resize(n);
        w.resize(n);
        for (int i = 0; i < n; ++i) {
            double xi = std::cos(kPi * (i + 0.75) / (n + 0.5));
            for (int it = 0; it < 100; ++it) {
                double p0 = 1, p1 = xi;
                for (int k = 2; k <= n; ++k) {
                    const double p2 = ((2 * k - 1) * xi * p1 - (k - 1) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                const double dp = n * (xi * p1 - p0) / (xi * xi - 1);
                const double step = p1 / dp;
                xi -= step;
                if (std::abs(step) < 1e-15) {
                    p0 = 1;
                    p1 = xi;
                    for (int k = 2; k <= n; ++k) {
                        const double p2 = ((2 * k - 1) * xi * p1 - (k - 1) * p0) / k;
                        p0 = p1;
                        p1 = p2;
                    }
                    const double dp2 = n * (xi * p1 - p0) / (xi * xi - 1);
                    x[i] = xi;
                    w[i] = 2.0 / ((1 - xi * xi) * dp2 * dp2);
                    break;
                }
            }
        }
    }
};

const GaussLegendre& gl() {
    static const GaussLegendre g;
    return g;
}

// integral of g(s) * density over [lo, hi] with the edge-regularizing
// substitution s = lo + (hi - lo) sin^2(theta)
template <typename G>
double mp_integral(double lambda, double lo, double hi, G&& g) {
    const double lp = 1.0 + std::sqrt(lambda), lm = 1.0 - std::sqrt(lambda);
    if (hi <= lo) return 0.0;
    const double span = hi - lo;
    double total = 0;
    for (int i = 0; i < int(gl().x.size()); ++i) {
        const double theta = 0.25 * kPi * (gl().x[i] + 1.0);  // [0, pi/2]
        const double sn = std::sin(theta), cs = std::cos(theta);
        const double s = lo + span * sn * sn;
        const double ds = span * 2.0 * sn * cs * (0.25 * kPi);
        // density with the sqrt factors written to expose the edge roots
        const double a2 = lp * lp - s * s, b2 = s * s - lm * lm;
        if (a2 <= 0 || b2 <= 0) continue;
        const double dens = std::sqrt(a2 * b2) / (kPi * lambda * s);
        total += gl().w[i] * g(s) * dens * ds;
    }
    return total;
}

}  // namespace

double SchmidtSpectrum::purity() const {
    double p = 0;
    for (double s : values) p += s * s * s * s;
    return p;
}

double SchmidtSpectrum::fidelity_at(std::size_t chi) const {
    double f = 0;
    for (std::size_t i = 0; i < std::min(chi, values.size()); ++i) f += values[i] * values[i];
    return f;
}

SchmidtSpectrum schmidt_decompose(const StateVector& psi, int cut) {
    if (cut < 1 || cut >= psi.n) throw std::invalid_argument("schmidt cut must be interior");
    const std::size_t rows = std::size_t(1) << cut;           // left block (low bits)
    const std::size_t cols = std::size_t(1) << (psi.n - cut);
    Eigen::MatrixXcd m(rows, cols);
    for (std::size_t c = 0; c < cols; ++c)
        for (std::size_t r = 0; r < rows; ++r) m(long(r), long(c)) = psi.amp[(c << cut) | r];
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(rows <= cols ? m : Eigen::MatrixXcd(m.transpose()));
    SchmidtSpectrum out;
    out.d1 = std::min(rows, cols);
    out.d2 = std::max(rows, cols);
    out.values.assign(svd.singularValues().data(),
                      svd.singularValues().data() + svd.singularValues().size());
    std::sort(out.values.begin(), out.values.end(), std::greater<double>());
    return out;
}

double mp_density(double s, double lambda) {
    const double lp = 1.0 + std::sqrt(lambda), lm = 1.0 - std::sqrt(lambda);
    if (s <= lm || s >= lp) return 0.0;
    return std::sqrt((lp * lp - s * s) * (s * s - lm * lm)) / (kPi * lambda * s);
}

double mp_cdf_from_above(double s, double lambda) {
    const double lp = 1.0 + std::sqrt(lambda), lm = 1.0 - std::sqrt(lambda);
    const double lo = std::clamp(s, lm, lp);
    return mp_integral(lambda, lo, lp, [](double) { return 1.0; });
}

double mp_singular_value(double r, double lambda) {
    if (r < 0 || r > 1) throw std::invalid_argument("mp_singular_value: r in [0,1]");
    const double lp = 1.0 + std::sqrt(lambda), lm = 1.0 - std::sqrt(lambda);
    if (lambda == 1.0) {
        // A(theta) = theta - sin(theta) = pi r, s = 2 cos(theta / 2)
        double theta = std::pow(6.0 * kPi * r, 1.0 / 3.0);  // small-r seed
        if (theta > kPi || !std::isfinite(theta)) theta = kPi / 2;
        for (int it = 0; it < 200; ++it) {
            const double f = theta - std::sin(theta) - kPi * r;
            const double df = 1.0 - std::cos(theta);
            const double step = df > 1e-14 ? f / df : f;
            theta -= step;
            theta = std::clamp(theta, 0.0, kPi);
            if (std::abs(step) < 1e-14) break;
        }
        return 2.0 * std::cos(0.5 * theta);
    }
    double lo = lm, hi = lp;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mp_cdf_from_above(mid, lambda) > r) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

double mp_fidelity(double r, double lambda) {
    if (r <= 0) return 0.0;
    if (r >= 1) return 1.0;
    const double lp = 1.0 + std::sqrt(lambda);
    const double s_r = mp_singular_value(r, lambda);
    return mp_integral(lambda, s_r, lp, [](double s) { return s * s; });
}

double mp_fidelity_inverse(double f, double lambda) {
    if (f < 0 || f > 1) throw std::invalid_argument("mp_fidelity_inverse: F in [0,1]");
    double lo = 0, hi = 1;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mp_fidelity(mid, lambda) < f) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

double mp_moment(int k, double lambda) {
    const double lp = 1.0 + std::sqrt(lambda), lm = 1.0 - std::sqrt(lambda);
    return mp_integral(lambda, lm, lp, [k](double s) { return std::pow(s, k); });
}

FidelityBound fidelity_bound(const SchmidtSpectrum& spectrum, std::size_t chi) {
    FidelityBound out;
    const double purity = spectrum.purity();
    out.jensen = std::sqrt(double(chi) * purity);
    out.haar = mp_fidelity(std::min(1.0, double(chi) * purity), spectrum.aspect());
    return out;
}

ChiRequirement chi_requirement(double target_f, double purity, double lambda) {
    if (purity <= 0) throw std::invalid_argument("chi_requirement: purity must be positive");
    ChiRequirement out;
    out.chi_analytic = target_f / purity;
    out.chi_numeric = mp_fidelity_inverse(std::sqrt(target_f), lambda) / purity;
    return out;
}

TruncatedXeb truncated_state_xeb(const StateVector& psi, int cut, std::size_t chi) {
    const std::size_t rows = std::size_t(1) << cut;
    const std::size_t cols = std::size_t(1) << (psi.n - cut);
    Eigen::MatrixXcd m(rows, cols);
    for (std::size_t c = 0; c < cols; ++c)
        for (std::size_t r = 0; r < rows; ++r) m(long(r), long(c)) = psi.amp[(c << cut) | r];
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    const std::size_t keep = std::min<std::size_t>(chi, std::size_t(sv.size()));
    TruncatedXeb out;
    for (std::size_t i = 0; i < keep; ++i) out.true_f += sv(long(i)) * sv(long(i));
    Eigen::MatrixXcd trunc = Eigen::MatrixXcd::Zero(rows, cols);
    for (std::size_t i = 0; i < keep; ++i)
        trunc += sv(long(i)) * svd.matrixU().col(long(i)) * svd.matrixV().col(long(i)).adjoint();
    trunc /= std::sqrt(out.true_f);
    // exact-overlap XEB: D * sum_j p~_j p_j - 1
    double overlap = 0;
    for (std::size_t c = 0; c < cols; ++c)
        for (std::size_t r = 0; r < rows; ++r)
            overlap += std::norm(trunc(long(r), long(c))) * std::norm(psi.amp[(c << cut) | r]);
    out.xeb = double(rows) * double(cols) * overlap - 1.0;
    return out;
}

double mp_ks_statistic(const SchmidtSpectrum& spectrum) {
    // compare normalized values s = sqrt(D1) S against the MP law
    const double scale = std::sqrt(double(spectrum.d1));
    std::vector<double> xs;
    xs.reserve(spectrum.values.size());
    for (double v : spectrum.values) xs.push_back(v * scale);
    std::sort(xs.begin(), xs.end(), std::greater<double>());
    const double k = double(xs.size());
    double dmax = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double cdf = mp_cdf_from_above(xs[i], spectrum.aspect());
        dmax = std::max(dmax, std::abs(cdf - double(i) / k));
        dmax = std::max(dmax, std::abs(cdf - double(i + 1) / k));
    }
    return dmax;
}

}  // namespace phaselab::schmidt
