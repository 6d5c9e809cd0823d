#pragma once

// Numeric evaluators for the Mellin-transform layer: the transforms B*(s),
// L*(s) and P*(t,s) of the shifted poissonized generating functions, the
// residue expansions they produce, the characteristic-function inversion of
// the centered distance law, and an independent quadrature check of B*.
//
// Strip discipline: every denominator (1 - 2^{s+1}), (1 - 2^{s+2}),
// (1 - e^t 2^{s+2}), (1 - e^{2t} 2^{s+2}) vanishes on a vertical line;
// MellinPoint pins the caller to an open strip with a 1e-6 edge guard.

#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "trielab/asymptotics.hpp"
#include "trielab/exact_engine.hpp"
#include "trielab/threading.hpp"

namespace trielab {

struct MellinPoint {
    complex_t s;
    double strip_lo;
    double strip_hi;

    MellinPoint(complex_t point, double lo, double hi) : s(point), strip_lo(lo), strip_hi(hi) {
        if (!(lo < hi)) throw std::domain_error("MellinPoint: empty strip");
        if (!(point.real() > lo + 1e-6 && point.real() < hi - 1e-6))
            throw std::domain_error("MellinPoint: Re s = " + std::to_string(point.real()) +
                                    " not inside <" + std::to_string(lo) + ", " +
                                    std::to_string(hi) + "> with 1e-6 edge guard");
    }
};

// Strip of the mean transform <-3, -2>.
inline MellinPoint mean_strip_point(complex_t s) { return {s, -3.0, -2.0}; }

namespace detail {

inline complex_t two_pow(complex_t s) { return std::exp(s * ln2); }

inline void require_strip(const MellinPoint& p, double lo, double hi, const char* what) {
    if (p.strip_lo < lo - 1e-12 || p.strip_hi > hi + 1e-12)
        throw std::domain_error(std::string(what) + ": asserted strip <" +
                                std::to_string(p.strip_lo) + ", " + std::to_string(p.strip_hi) +
                                "> not contained in <" + std::to_string(lo) + ", " +
                                std::to_string(hi) + ">");
    if (!(p.s.real() > lo + 1e-6 && p.s.real() < hi - 1e-6))
        throw std::domain_error(std::string(what) + ": Re s outside <" + std::to_string(lo) +
                                ", " + std::to_string(hi) + ">");
}

}  // namespace detail

// Mellin transform of the shifted poissonized mean; defined on <-3, -2>.
inline complex_t b_star(const MellinPoint& p) {
    detail::require_strip(p, -3.0, -2.0, "b_star");
    const complex_t s = p.s;
    return -detail::two_pow(s + 1.0) * gamma(s + 2.0) /
           ((1.0 - detail::two_pow(s + 1.0)) * (1.0 - detail::two_pow(s + 2.0)));
}

// Mellin transform of the shifted poissonized second moment; <-3, -2>.
inline complex_t l_star(const MellinPoint& p, const SeriesConfig& cfg = {}) {
    detail::require_strip(p, -3.0, -2.0, "l_star");
    const complex_t s = p.s;
    const complex_t p1 = detail::two_pow(s + 1.0);
    const complex_t p2 = detail::two_pow(s + 2.0);
    const int kcap = detail::auto_inner_cap(0.0, cfg);
    const complex_t inner = detail::bracket_sum_unit(s + 2.0, kcap);
    const complex_t c = p1 * gamma(s + 2.0) / ((1.0 - p1) * (1.0 - p2));
    return c * (-detail::two_pow(s + 4.0) / (1.0 - p2) + (1.0 - 7.0 * p2) / p2 - 2.0 * inner);
}

// Mellin transform of the shifted poissonized MGF; defined on
// <-3, -2 - 2|t|/ln 2> for |t| <= 0.1.
inline complex_t p_star(double t, const MellinPoint& p, const SeriesConfig& cfg = {}) {
    if (!(std::abs(t) <= envelope_t_max + 1e-15))
        throw std::domain_error("p_star: t must lie in [-0.1, 0.1]");
    const double hi = -2.0 - 2.0 * std::abs(t) / ln2;
    detail::require_strip(p, -3.0, hi, "p_star (strip upper edge -2 - 2|t|/ln 2)");
    const complex_t s = p.s;
    const double et = std::exp(t);
    const double e2t = std::exp(2.0 * t);
    const double em1 = std::expm1(t);
    const complex_t p1 = detail::two_pow(s + 1.0);
    const complex_t p2 = detail::two_pow(s + 2.0);
    const complex_t p3 = detail::two_pow(s + 3.0);
    const complex_t g = gamma(s + 2.0);
    const int kcap = detail::auto_inner_cap(std::abs(t), cfg);
    const complex_t inner = detail::bracket_sum(complex_t(et, 0.0), s + 2.0, kcap);
    const complex_t head = e2t * detail::two_pow(s) * (em1 * em1) * g /
                           ((1.0 - p1) * (1.0 - e2t * p2));
    const complex_t mid = -p3 * et / (1.0 - et * p2) - 2.0 * et * inner + (1.0 - p3) / p2;
    const complex_t tail = detail::two_pow(s + 1.0) * e2t * (-em1) * g /
                           ((1.0 - p1) * (1.0 - et * p2));
    return head * mid + tail;
}

namespace detail {

inline double inverse_power_series() {
    // sum_k 1 / (1 + 2^{k+1})
    double acc = 0.0;
    for (int k = 0; k < 64; ++k) acc += 1.0 / (1.0 + std::ldexp(1.0, k + 1));
    return acc;
}

}  // namespace detail

// Poissonized mean of the pair count times distance:
// z^2 lg z - z^2 eta2(lg z) - z^2 (ln2 - 2 gamma)/(2 ln2) + z [1/ln2 + eta1(lg z)].
inline double mean_residue_expansion(double z, const SeriesConfig& cfg = {}) {
    if (!(z >= 4.0)) throw std::domain_error("mean_residue_expansion: z must be >= 4");
    const double lg = std::log2(z);
    return z * z * lg - z * z * eta2(lg, cfg) - z * z * (ln2 - 2.0 * euler_gamma) / (2.0 * ln2) +
           z * (1.0 / ln2 + eta1(lg, cfg));
}

// Poissonized second moment of the pair count times squared distance.
inline double second_moment_residue_expansion(double z, const SeriesConfig& cfg = {}) {
    if (!(z >= 4.0)) throw std::domain_error("second_moment_residue_expansion: z must be >= 4");
    const double lg = std::log2(z);
    const double constant_block =
        (pi * pi / 3.0 + 2.0 * euler_gamma * euler_gamma - 2.0 * euler_gamma * ln2 +
         (11.0 / 3.0) * ln2 * ln2 - 2.0 * ln2 * half_power_log_series()) /
        (ln2 * ln2);
    return 2.0 * z * z * lg * lg + 2.0 * z * z * lg * (2.0 * euler_gamma / ln2 - 1.0) +
           z * z * constant_block -
           (z / ln2) * (1.5 - 2.0 * detail::inverse_power_series()) + z * z * xi1(lg, cfg) -
           z * xi2(lg, cfg);
}

enum class InvertMode { exact, asymptotic };

// Trapezoidal inversion of the centered-distance characteristic function on a
// uniform grid over [0, 2pi). For an integer-supported law the rule is exact
// once the grid passes the support width; grids start there and double until
// the recovered probabilities stabilize (exact mode).
class CfInverter {
  public:
    CfInverter(std::size_t n, InvertMode mode, const SeriesConfig& cfg = {})
        : n_(n), mode_(mode), shift_(static_cast<long>(floor_2lg(n))) {
        if (n < 2) throw std::domain_error("cf_invert: n must be >= 2");
        std::size_t m = 256;
        const std::size_t width =
            2 * (static_cast<std::size_t>(std::ceil(2.0 * std::log2(static_cast<double>(n)))) +
                 80);
        while (m < width) m *= 2;
        grid_ = evaluate(m, cfg);
        if (mode == InvertMode::exact) {
            std::vector<complex_t> finer = evaluate(2 * m, cfg);
            double gap = 0.0;
            for (long r = min_r(); r < min_r() + static_cast<long>(m); ++r)
                gap = std::max(gap, std::abs(invert(grid_, r) - invert(finer, r)));
            if (gap > 1e-8)
                throw std::runtime_error(
                    "cf_invert: quadrature did not stabilize under grid doubling (gap " +
                    std::to_string(gap) + ")");
            grid_ = std::move(finer);
        }
    }

    long shift() const { return shift_; }
    long min_r() const { return 2 - shift_; }
    std::size_t grid_size() const { return grid_.size(); }

    double prob(long r) const { return invert(grid_, r); }

    // One full alias period of recovered values, centered on the support.
    Pmf centered_pmf() const {
        const long m = static_cast<long>(grid_.size());
        const long lo = min_r() - m / 4;
        Pmf p;
        p.support_offset = lo;
        p.masses.resize(static_cast<std::size_t>(m));
        for (long r = lo; r < lo + m; ++r)
            p.masses[static_cast<std::size_t>(r - lo)] = prob(r);
        p.tail_bound = 0.0;
        return p;
    }

  private:
    std::vector<complex_t> evaluate(std::size_t m, const SeriesConfig& cfg) const {
        std::vector<complex_t> cf(m);
        if (mode_ == InvertMode::exact) {
            exact_grid(m, cf);
        } else {
            const double fr = frac_2lg(n_);
            for (std::size_t k = 0; k < m; ++k) {
                const double u = 2.0 * pi * static_cast<double>(k) / static_cast<double>(m);
                const complex_t t(0.0, u);
                cf[k] = (envelope_g(t, cfg) + oscillation_h(n_, t, cfg)) *
                        std::exp(complex_t(0.0, fr * u));
            }
        }
        // center: divide out e^{iu floor(2 lg n)}
        for (std::size_t k = 0; k < m; ++k) {
            const double u = 2.0 * pi * static_cast<double>(k) / static_cast<double>(m);
            cf[k] *= std::exp(complex_t(0.0, -u * static_cast<double>(shift_)));
        }
        return cf;
    }

    // Characteristic-function recurrence swept once per grid point, blocked
    // over threads; each thread owns its own psi/phi panels.
    void exact_grid(std::size_t m, std::vector<complex_t>& out) const {
        const unsigned nthreads =
            std::max(1u, std::min<unsigned>(detail::thread_cap(), static_cast<unsigned>(m / 32 + 1)));
        std::vector<std::thread> pool;
        const std::size_t block = (m + nthreads - 1) / nthreads;
        for (unsigned tid = 0; tid < nthreads; ++tid) {
            const std::size_t lo = tid * block;
            const std::size_t hi = std::min(m, lo + block);
            if (lo >= hi) break;
            pool.emplace_back([this, lo, hi, m, &out] { sweep_block(lo, hi, m, out); });
        }
        for (auto& th : pool) th.join();
    }

    void sweep_block(std::size_t lo, std::size_t hi, std::size_t m,
                     std::vector<complex_t>& out) const {
        const std::size_t B = hi - lo;
        const std::size_t N = n_;
        std::vector<complex_t> x(B);
        for (std::size_t k = 0; k < B; ++k) {
            const double u = 2.0 * pi * static_cast<double>(lo + k) / static_cast<double>(m);
            x[k] = std::exp(complex_t(0.0, u));
        }
        std::vector<complex_t> psi((N + 1) * B), phi((N + 1) * B);
        for (std::size_t k = 0; k < B; ++k) psi[1 * B + k] = 1.0;
        std::vector<double> w;
        std::vector<complex_t> sp(B), sf(B);
        for (std::size_t n = 2; n <= N; ++n) {
            detail::split_weights_into(n, w);
            const double self = std::ldexp(1.0, 1 - static_cast<int>(n));
            const double nn = static_cast<double>(n);
            std::fill(sp.begin(), sp.end(), complex_t{});
            std::fill(sf.begin(), sf.end(), complex_t{});
            for (std::size_t l = 1; l < n; ++l) {
                const double wl = w[l];
                if (wl == 0.0) continue;
                const double ld = static_cast<double>(l);
                const double cp = wl * ld;
                const double c2 = wl * ld * (ld - 1);  // 2 * wl * C(l,2)
                const double cx = wl * ld * (nn - ld);
                const complex_t* prow = psi.data() + l * B;
                const complex_t* qrow = psi.data() + (n - l) * B;
                const complex_t* frow = phi.data() + l * B;
                complex_t* spd = sp.data();
                complex_t* sfd = sf.data();
                for (std::size_t k = 0; k < B; ++k) {
                    spd[k] += cp * prow[k];
                    sfd[k] += c2 * frow[k] + cx * prow[k] * qrow[k];
                }
            }
            const double cn2 = 0.5 * nn * (nn - 1);
            const double dscale = 1.0 / (cn2 * (1.0 - self));
            complex_t* prow = psi.data() + n * B;
            complex_t* frow = phi.data() + n * B;
            for (std::size_t k = 0; k < B; ++k) {
                prow[k] = (2.0 * x[k] * sp[k]) / (nn * (complex_t{1.0} - x[k] * self));
                frow[k] = sf[k] * (x[k] * x[k]) * dscale;
            }
        }
        for (std::size_t k = 0; k < B; ++k) out[lo + k] = phi[N * B + k];
    }

    static double invert(const std::vector<complex_t>& cf, long r) {
        const std::size_t m = cf.size();
        double acc = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
            const double u = 2.0 * pi * static_cast<double>(k) / static_cast<double>(m);
            acc += (cf[k] * std::exp(complex_t(0.0, -u * static_cast<double>(r)))).real();
        }
        return acc / static_cast<double>(m);
    }

    std::size_t n_;
    InvertMode mode_;
    long shift_;
    std::vector<complex_t> grid_;
};

// P(Dist_n - floor(2 lg n) = r), by inversion of the characteristic function.
inline double cf_invert(std::size_t n, long r, InvertMode mode) {
    CfInverter inv(n, mode);
    return inv.prob(r);
}

namespace detail {

// adaptive Simpson with absolute tolerance
inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double fa, double fm, double fb, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) < 15.0 * tol) return left + right + delta / 15.0;
    return adaptive_simpson(f, a, m, fa, flm, fm, tol * 0.5, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, tol * 0.5, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    return adaptive_simpson(f, a, b, fa, fm, fb, tol, 48);
}

}  // namespace detail

// Numerical Mellin transform of the shifted poissonized mean at real s inside
// <-3, -2>, built from exact distance means only. The head [0, Z] is adaptive
// quadrature (with z = x^2 near the origin, where the integrand behaves like
// z^{s+2}); the slowly decaying tail beyond Z is integrated analytically after
// least-squares fitting a z^2 lg z + b z^2 + c z to the exact values on the
// top of the head window. Everything the fit uses comes from the moment
// table, so the result stays independent of the residue algebra.
inline double b_star_quadrature(const MomentTable& moments, double s = -2.5, double z_max = 500.0) {
    if (!(s > -3.0 + 1e-6 && s < -2.0 - 1e-6))
        throw std::domain_error("b_star_quadrature: s must lie inside <-3, -2>");
    const std::size_t need = static_cast<std::size_t>(z_max + 12.0 * std::sqrt(z_max) + 30.0) + 1;
    if (moments.cap + 1 < need)
        throw table_range_error("b_star_quadrature: moment table too short", need);

    std::vector<double> weighted(moments.cap + 1, 0.0);
    for (std::size_t n = 2; n <= moments.cap; ++n) {
        const double nn = static_cast<double>(n);
        weighted[n] = 0.5 * nn * (nn - 1) * moments.dist_mean[n];
    }
    auto B = [&](double z) { return poisson_mixture(z, weighted) - z * z; };

    const double tol = 1e-9;
    auto head_small = [&](double x) {  // z = x^2 on [0, 1]
        return 2.0 * B(x * x) * std::pow(x, 2.0 * s - 1.0);
    };
    auto head_large = [&](double z) { return B(z) * std::pow(z, s - 1.0); };
    double total = detail::integrate(head_small, 1e-6, 1.0, tol);
    for (double a = 1.0; a < z_max; a *= 2.0) {
        const double b = std::min(z_max, a * 2.0);
        total += detail::integrate(head_large, a, b, tol);
        if (b >= z_max) break;
    }

    // tail fit on [0.7 Z, Z]
    const int pts = 40;
    double m[3][3] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};
    double rhs[3] = {0, 0, 0};
    for (int i = 0; i < pts; ++i) {
        const double z = 0.7 * z_max + (0.3 * z_max) * i / (pts - 1);
        const double basis[3] = {z * z * std::log2(z), z * z, z};
        const double val = B(z);
        for (int r = 0; r < 3; ++r) {
            rhs[r] += basis[r] * val;
            for (int c = 0; c < 3; ++c) m[r][c] += basis[r] * basis[c];
        }
    }
    // 3x3 Gaussian elimination with partial pivoting
    int order[3] = {0, 1, 2};
    for (int col = 0; col < 3; ++col) {
        int piv = col;
        for (int r = col + 1; r < 3; ++r)
            if (std::abs(m[order[r]][col]) > std::abs(m[order[piv]][col])) piv = r;
        std::swap(order[col], order[piv]);
        for (int r = col + 1; r < 3; ++r) {
            const double f = m[order[r]][col] / m[order[col]][col];
            for (int c = col; c < 3; ++c) m[order[r]][c] -= f * m[order[col]][c];
            rhs[order[r]] -= f * rhs[order[col]];
        }
    }
    double coef[3];
    for (int col = 2; col >= 0; --col) {
        double v = rhs[order[col]];
        for (int c = col + 1; c < 3; ++c) v -= m[order[col]][c] * coef[c];
        coef[col] = v / m[order[col]][col];
    }

    const double p2 = s + 2.0, p1 = s + 1.0;
    const double tail_log = -std::pow(z_max, p2) * (p2 * std::log(z_max) - 1.0) / (p2 * p2);
    const double tail_sq = -std::pow(z_max, p2) / p2;
    const double tail_lin = -std::pow(z_max, p1) / p1;
    total += coef[0] / ln2 * tail_log + coef[1] * tail_sq + coef[2] * tail_lin;
    return total;
}

}  // namespace trielab
