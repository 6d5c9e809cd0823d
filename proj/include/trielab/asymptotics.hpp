#pragma once

// Closed-form asymptotics for the random pairwise distance: the mean and
// variance expansions, the tiny period-1 oscillations that ride on them, and
// the envelope form of the centered moment generating function.
//
// Every oscillating series is a Fourier series in lg n whose coefficients
// involve Gamma at the points chi_j = 2 pi i j / ln 2 on the imaginary axis.
// |Gamma(x+iy)| decays like y^{x-1/2} e^{-pi y / 2}, so j = 1 dominates and a
// small Fourier cap is already exact to double precision; caps and floors are
// carried in SeriesConfig.

#include <cmath>
#include <complex>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "trielab/special_functions.hpp"

namespace trielab {

inline constexpr double envelope_t_max = 0.1;  // validated argument range

struct SeriesConfig {
    int fourier_cap = 8;        // max |j| in the oscillating sums
    int inner_cap = 0;          // max k in the geometric inner sums; 0 = auto
    double term_floor = 1e-18;  // stop threshold for auto inner caps
};

struct AsymptoticValue {
    double steady = 0.0;
    double oscillation = 0.0;
    double total = 0.0;  // steady + oscillation, by construction
    std::string error_order;

    AsymptoticValue(double s, double o, std::string err)
        : steady(s), oscillation(o), total(s + o), error_order(std::move(err)) {}
};

namespace detail {

inline complex_t chi(int j) { return complex_t(0.0, 2.0 * pi * j / ln2); }

struct HarmonicTable {
    std::vector<complex_t> gamma_chi;      // Gamma(chi_j), j = 1..J
    std::vector<complex_t> gamma_1p_chi;   // Gamma(1 + chi_j)
    std::vector<complex_t> psi_chi;        // psi(chi_j)

    explicit HarmonicTable(int cap) {
        gamma_chi.reserve(cap);
        gamma_1p_chi.reserve(cap);
        psi_chi.reserve(cap);
        for (int j = 1; j <= cap; ++j) {
            gamma_chi.push_back(trielab::gamma(chi(j)));
            gamma_1p_chi.push_back(trielab::gamma(1.0 + chi(j)));
            psi_chi.push_back(trielab::digamma(chi(j)));
        }
    }
};

inline const HarmonicTable& harmonics(const SeriesConfig& cfg) {
    static const HarmonicTable table8(8);
    if (cfg.fourier_cap == 8) return table8;
    thread_local SeriesConfig last{0, 0, 0};
    thread_local std::unique_ptr<HarmonicTable> custom;
    if (!custom || last.fourier_cap != cfg.fourier_cap) {
        custom = std::make_unique<HarmonicTable>(cfg.fourier_cap);
        last = cfg;
    }
    return *custom;
}

inline int auto_inner_cap(double t_mag, const SeriesConfig& cfg) {
    if (cfg.inner_cap > 0) return cfg.inner_cap;
    // terms shrink like e^{t k} 2^{-k}; solve e^{tK} 2^{-K} C < floor
    const double rate = ln2 - t_mag;
    const double k = (std::log(64.0) - std::log(cfg.term_floor)) / rate;
    return static_cast<int>(k) + 8;
}

// sum_k (1+2^{-k-1})-bracket series: sum_k x^k [1 - (1+2^{-k-1})^{-w}]
// evaluated with expm1/log1p so tiny exponents keep full relative accuracy.
inline complex_t bracket_sum(complex_t x, complex_t w, int cap) {
    complex_t acc{};
    complex_t xk{1.0, 0.0};
    for (int k = 0; k < cap; ++k) {
        acc += xk * (-expm1(-w * std::log1p(std::ldexp(1.0, -k - 1))));
        xk *= x;
    }
    return acc;
}

// real-argument overload used by the residue-line series (x = 1)
inline complex_t bracket_sum_unit(complex_t w, int cap) {
    return bracket_sum(complex_t{1.0, 0.0}, w, cap);
}

// Fourier synthesis sum_{j != 0} coef(j) e^{-2 pi i j u}; coefficients come in
// conjugate pairs so the value is real.
template <class Coef>
inline double fourier_real(double u, int cap, Coef&& coef) {
    double acc = 0.0;
    for (int j = 1; j <= cap; ++j) {
        const complex_t phase = std::exp(complex_t(0.0, -2.0 * pi * j * u));
        acc += 2.0 * (coef(j) * phase).real();
    }
    return acc;
}

}  // namespace detail

// Sum over k >= 0 of ln(1 + 2^{-k-1}); shared by the variance constant and the
// second-moment expansion so the two use bit-identical values.
inline double half_power_log_series() {
    double acc = 0.0;
    for (int k = 0; k < 64; ++k) acc += std::log1p(std::ldexp(1.0, -k - 1));
    return acc;
}

inline double alpha_constant() { return 12.0 * ln2 * half_power_log_series(); }

inline double eta2(double u, const SeriesConfig& cfg = {}) {
    const auto& h = detail::harmonics(cfg);
    return detail::fourier_real(u, cfg.fourier_cap,
                                [&](int j) { return h.gamma_chi[j - 1]; }) /
           ln2;
}

inline double eta1(double u, const SeriesConfig& cfg = {}) {
    const auto& h = detail::harmonics(cfg);
    return detail::fourier_real(u, cfg.fourier_cap,
                                [&](int j) { return h.gamma_1p_chi[j - 1]; }) /
           ln2;
}

// Oscillation riding on the second-moment expansion; the coefficient is the
// double-pole residue at s = -2 + chi_j, which carries both psi and a term
// linear in the argument, so xi1 is only periodic up to -4 u eta2(u).
inline double xi1(double u, const SeriesConfig& cfg = {}) {
    const auto& h = detail::harmonics(cfg);
    const int kcap = detail::auto_inner_cap(0.0, cfg);
    const double fourier =
        detail::fourier_real(u, cfg.fourier_cap, [&](int j) {
            const complex_t s = detail::bracket_sum_unit(detail::chi(j), kcap);
            return h.gamma_chi[j - 1] *
                   (2.0 - 2.0 * s + 4.0 * h.psi_chi[j - 1] / ln2);
        }) /
        ln2;
    return fourier - 4.0 * u * eta2(u, cfg);
}

inline double xi2(double u, const SeriesConfig& cfg = {}) {
    const auto& h = detail::harmonics(cfg);
    const int kcap = detail::auto_inner_cap(0.0, cfg);
    return detail::fourier_real(u, cfg.fourier_cap, [&](int j) {
               const complex_t s =
                   detail::bracket_sum_unit(1.0 + detail::chi(j), kcap);
               return h.gamma_1p_chi[j - 1] * (1.5 - 2.0 * s);
           }) /
           ln2;
}

inline double xi3(double u, const SeriesConfig& cfg = {}) {
    const auto& h = detail::harmonics(cfg);
    const int kcap = detail::auto_inner_cap(0.0, cfg);
    return detail::fourier_real(u, cfg.fourier_cap, [&](int j) {
               const complex_t s = detail::bracket_sum_unit(detail::chi(j), kcap);
               return h.gamma_chi[j - 1] * (s - 2.0 * h.psi_chi[j - 1] / ln2);
           }) /
           ln2;
}

// Variance oscillation, composed from eta2 and xi3.
inline double xi(double u, const SeriesConfig& cfg = {}) {
    const double e2 = eta2(u, cfg);
    return (16.0 * ln2 + 8.0 * euler_gamma) / ln2 * e2 - 4.0 * e2 * e2 -
           4.0 * xi3(u, cfg);
}

inline double frac_2lg(std::size_t n) {
    const double x = 2.0 * std::log2(static_cast<double>(n));
    return x - std::floor(x);
}

inline double floor_2lg(std::size_t n) {
    return std::floor(2.0 * std::log2(static_cast<double>(n)));
}

inline AsymptoticValue mean_asymptotic(std::size_t n, const SeriesConfig& cfg = {}) {
    if (n < 2) throw std::domain_error("mean_asymptotic: n must be >= 2");
    const double lg = std::log2(static_cast<double>(n));
    const double steady = 2.0 * lg + (2.0 * euler_gamma - ln2) / ln2;
    return {steady, -2.0 * eta2(lg, cfg), "O(n^-0.4999)"};
}

inline AsymptoticValue variance_asymptotic(std::size_t n, const SeriesConfig& cfg = {}) {
    if (n < 2) throw std::domain_error("variance_asymptotic: n must be >= 2");
    const double steady =
        (2.0 * pi * pi + 19.0 * ln2 * ln2 - alpha_constant()) / (3.0 * ln2 * ln2);
    return {steady, xi(std::log2(static_cast<double>(n)), cfg), "O(n^-0.4999)"};
}

// Mean of the distance sum over all unordered key pairs: the two leading
// terms n^2 lg n - ((ln2 - 2 gamma)/(2 ln2) + eta2(lg n)) n^2.
inline double wiener_mean_asymptotic(std::size_t n, const SeriesConfig& cfg = {}) {
    if (n < 2) throw std::domain_error("wiener_mean_asymptotic: n must be >= 2");
    const double nn = static_cast<double>(n);
    const double lg = std::log2(nn);
    return nn * nn * lg -
           ((ln2 - 2.0 * euler_gamma) / (2.0 * ln2) + eta2(lg, cfg)) * nn * nn;
}

inline void require_envelope_domain(double t) {
    if (!(std::abs(t) <= envelope_t_max + 1e-15))
        throw std::domain_error("envelope argument t must lie in [-0.1, 0.1]");
}

// Fixed envelope factor of the centered MGF. Complex argument is accepted so
// the inversion integral can evaluate it on the imaginary axis; the removable
// singularity at t = 0 (Gamma pole against the (1 - e^t) zero) is handled by
// its first-order expansion.
inline complex_t envelope_g(complex_t t, const SeriesConfig& cfg = {}) {
    if (std::abs(t) < 1e-6) return 1.0 + (2.0 * euler_gamma / ln2 - 1.0) * t;
    const int kcap = detail::auto_inner_cap(std::abs(t.real()), cfg);
    const complex_t et = std::exp(t);
    const complex_t em1 = detail::expm1(t);
    const complex_t inner = detail::bracket_sum(et, -2.0 * t / ln2, kcap);
    const complex_t pref = 2.0 * gamma(-2.0 * t / ln2) * std::exp(3.0 * t) * (-em1) /
                           ((1.0 - 2.0 * std::exp(2.0 * t)) * ln2);
    return pref * (0.5 * (std::exp(2.0 * t) - et - 2.0) - em1 * inner);
}

inline double envelope_g(double t, const SeriesConfig& cfg = {}) {
    require_envelope_domain(t);
    return envelope_g(complex_t(t, 0.0), cfg).real();
}

// Oscillating correction to the envelope. Each Fourier term carries
// Gamma((-2t + 2 pi i j)/ln 2); on the imaginary axis t = iu that argument
// vanishes at u = pi j, a removable singularity evaluated by its limit
// -(ln2/2) d/dt[paren] there.
inline complex_t oscillation_h(std::size_t n, complex_t t, const SeriesConfig& cfg = {}) {
    if (n < 2) throw std::domain_error("oscillation_h: n must be >= 2");
    const double lgn = std::log2(static_cast<double>(n));
    const int kcap = detail::auto_inner_cap(std::abs(t.real()), cfg);
    const complex_t et = std::exp(t);
    const complex_t em1 = detail::expm1(t);
    const complex_t a_part = 0.5 * (std::exp(2.0 * t) - et - 2.0);
    const complex_t b_part = std::exp(3.0 * t) * em1;
    complex_t acc{};
    for (int j = -cfg.fourier_cap; j <= cfg.fourier_cap; ++j) {
        if (j == 0) continue;
        const complex_t z = (-2.0 * t + complex_t(0.0, 2.0 * pi * j)) / ln2;
        const complex_t phase = std::exp(complex_t(0.0, -2.0 * pi * j * lgn));
        const complex_t outer = -2.0 * phase / ((1.0 - 2.0 * std::exp(2.0 * t)) * ln2);
        if (std::abs(z) < 1e-6) {
            // t -> i pi j: Gamma(z) blows up against a linear zero. For odd j
            // the zero sits in the bracket (paren ~ p1 (t - i pi j)); for even
            // j it sits in e^t - 1. Either way Gamma(z) * zero -> -(ln2/2) * slope.
            if (j % 2 != 0) {
                double alt = 0.0;  // sum_k (-1)^k ln(1 + 2^{-k-1})
                for (int k = 0; k < 64; ++k)
                    alt += (k % 2 ? -1.0 : 1.0) * std::log1p(std::ldexp(1.0, -k - 1));
                const double aprime = 1.5;   // d/dt (e^{2t}-e^t-2)/2 at e^t = -1
                const double b0 = 2.0;       // e^{3t}(e^t-1) at e^t = -1
                const double sprime = -(2.0 / ln2) * alt;
                acc += outer * em1 * (-(ln2 / 2.0) * (aprime - b0 * sprime));
            } else {
                const complex_t inner = detail::bracket_sum(et, -z, kcap);
                acc += outer * (-(ln2 / 2.0)) * (a_part - b_part * inner);
            }
        } else {
            const complex_t inner = detail::bracket_sum(et, -z, kcap);
            acc += outer * em1 * gamma(z) * (a_part - b_part * inner);
        }
    }
    return acc;
}

inline double oscillation_h(std::size_t n, double t, const SeriesConfig& cfg = {}) {
    require_envelope_domain(t);
    return oscillation_h(n, complex_t(t, 0.0), cfg).real();
}

// Centered MGF approximation (G + H_n) e^{t {2 lg n}} and its uncentered
// n^{2t/ln 2}-scaled counterpart.
inline double mgf_centered(std::size_t n, double t, const SeriesConfig& cfg = {}) {
    require_envelope_domain(t);
    if (t == 0.0) return 1.0;
    return (envelope_g(t, cfg) + oscillation_h(n, t, cfg)) * std::exp(t * frac_2lg(n));
}

inline double mgf_asymptotic(std::size_t n, double t, const SeriesConfig& cfg = {}) {
    require_envelope_domain(t);
    if (t == 0.0) return 1.0;
    return (envelope_g(t, cfg) + oscillation_h(n, t, cfg)) *
           std::exp(t * 2.0 * std::log2(static_cast<double>(n)));
}

// Limit curves the centered MGF oscillates between: {G, e^t G} ordered as
// (inf, sup).
inline std::pair<double, double> envelopes(double t, const SeriesConfig& cfg = {}) {
    require_envelope_domain(t);
    const double g = envelope_g(t, cfg);
    const double other = std::exp(t) * g;
    if (t >= 0.0) return {g, other};
    return {other, g};
}

}  // namespace trielab
