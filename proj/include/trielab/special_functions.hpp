#pragma once

// Complex-argument gamma, log-gamma and digamma, plus the named constants the
// oscillating series are built from. Log-gamma uses the Lanczos approximation
// with the g = 7, 9-term coefficient set of Godfrey (relative error claimed
// below 1e-13 on the right half-plane), reflected for Re s < 1/2. Digamma uses
// upward recurrence into |s| >= 10 followed by the Bernoulli asymptotic series.

#include <cmath>
#include <complex>
#include <numbers>

#include "trielab/errors.hpp"

namespace trielab {

using complex_t = std::complex<double>;

inline constexpr double euler_gamma = 0.577215664901532860606512090082;
inline constexpr double ln2 = std::numbers::ln2;
inline constexpr double pi = std::numbers::pi;

namespace detail {

inline constexpr double lanczos_g = 7.0;
inline constexpr double lanczos_coef[9] = {
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
};

inline bool near_nonpositive_integer(complex_t s, long long& which) {
    double r = std::round(s.real());
    if (r > 0.5) return false;
    if (std::abs(s.real() - r) < 1e-13 && std::abs(s.imag()) < 1e-13) {
        which = static_cast<long long>(r);
        return true;
    }
    return false;
}

// exp(z) - 1 with full relative accuracy near zero.
inline complex_t expm1(complex_t z) {
    double ex = std::expm1(z.real());
    double sy = std::sin(z.imag() * 0.5);
    return {ex * std::cos(z.imag()) - 2.0 * sy * sy,
            (1.0 + ex) * std::sin(z.imag())};
}

// log(sin(pi z)) without overflow for large |Im z|.
inline complex_t log_sin_pi(complex_t z) {
    const complex_t i(0.0, 1.0);
    if (z.imag() > 0) {
        // sin(pi z) = e^{-i pi z} (e^{2 i pi z} - 1) / (2i)
        return -i * pi * z + std::log(expm1(2.0 * i * pi * z) / (2.0 * i));
    }
    return i * pi * z + std::log(-expm1(-2.0 * i * pi * z) / (2.0 * i));
}

inline complex_t lanczos_log_gamma(complex_t s) {
    // valid for Re s >= 0.5
    complex_t x = lanczos_coef[0];
    for (int k = 1; k < 9; ++k) x += lanczos_coef[k] / (s + static_cast<double>(k - 1));
    complex_t t = s + (lanczos_g - 0.5);
    return 0.5 * std::log(2.0 * pi) + (s - 0.5) * std::log(t) - t + std::log(x);
}

}  // namespace detail

inline complex_t log_gamma(complex_t s) {
    long long at = 0;
    if (detail::near_nonpositive_integer(s, at)) throw gamma_pole_error(at);
    if (s.real() >= 0.5) return detail::lanczos_log_gamma(s);
    // reflection: log Gamma(s) = log pi - log sin(pi s) - log Gamma(1 - s)
    return std::log(pi) - detail::log_sin_pi(s) - detail::lanczos_log_gamma(1.0 - s);
}

inline complex_t gamma(complex_t s) { return std::exp(log_gamma(s)); }

inline complex_t digamma(complex_t s) {
    long long at = 0;
    if (detail::near_nonpositive_integer(s, at)) throw gamma_pole_error(at);
    complex_t acc = 0.0;
    while (s.real() < 10.0) {
        acc -= 1.0 / s;
        s += 1.0;
    }
    // psi(s) ~ ln s - 1/(2s) - sum B_{2k} / (2k s^{2k})
    static constexpr double bern[7] = {
        1.0 / 6, -1.0 / 30, 1.0 / 42, -1.0 / 30, 5.0 / 66, -691.0 / 2730, 7.0 / 6};
    complex_t inv = 1.0 / s;
    complex_t inv2 = inv * inv;
    complex_t out = std::log(s) - 0.5 * inv;
    complex_t p = inv2;
    for (int k = 0; k < 7; ++k) {
        out -= bern[k] / (2.0 * (k + 1)) * p;
        p *= inv2;
    }
    return acc + out;
}

}  // namespace trielab
