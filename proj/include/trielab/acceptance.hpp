#pragma once

// End-to-end verification: every headline quantity is computed at least two
// independent ways (recurrence vs closed form, recurrence vs simulation,
// transform vs finite differences, expansion vs Poisson mixture) and checked
// at a fixed tolerance. One line per criterion; exit code 2 on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "trielab/asymptotics.hpp"
#include "trielab/exact_engine.hpp"
#include "trielab/montecarlo.hpp"
#include "trielab/transform_lab.hpp"
#include "trielab/trie_core.hpp"

namespace trielab::acceptance {

enum class Suite { fast, full };

struct CriterionResult {
    int id = 0;
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
};

namespace detail {

inline std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

struct Check {
    bool ok = true;
    std::ostringstream note;

    void require(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            if (note.tellp() > 0) note << "; ";
            note << what;
        }
    }
    void info(const std::string& what) {
        if (note.tellp() > 0) note << "; ";
        note << what;
    }
};

inline double tv_distance(const Pmf& a, const Pmf& b) {
    const long lo = std::min(a.support_offset, b.support_offset);
    const long hi = std::max(a.support_offset + static_cast<long>(a.masses.size()),
                             b.support_offset + static_cast<long>(b.masses.size()));
    double acc = 0.0;
    for (long k = lo; k < hi; ++k) acc += std::abs(a.prob(k) - b.prob(k));
    return 0.5 * acc;
}

}  // namespace detail

inline std::vector<CriterionResult> run(Suite suite, std::ostream& log) {
    using clock = std::chrono::steady_clock;
    std::vector<CriterionResult> results;
    const bool full = suite == Suite::full;
    const std::size_t mgf_cap = full ? 8192 : 4096;
    const SeedSpec seed{20250811};

    auto push = [&](int id, const std::string& name, detail::Check& c, clock::time_point t0) {
        CriterionResult r;
        r.id = id;
        r.name = name;
        r.passed = c.ok;
        r.detail = c.note.str();
        r.seconds = std::chrono::duration<double>(clock::now() - t0).count();
        char line[512];
        std::snprintf(line, sizeof(line), "[%s] %02d %-28s (%6.2f s)%s%s",
                      r.passed ? " PASS " : " FAIL ", r.id, r.name.c_str(), r.seconds,
                      r.detail.empty() ? "" : "  ", r.detail.c_str());
        log << line << '\n' << std::flush;
        results.push_back(std::move(r));
    };

    // shared tables
    const MomentTable moments = moment_table(4096);
    DistributionEngine dists(128);

    {  // 1: five-key worked example
        auto t0 = clock::now();
        detail::Check c;
        const std::vector<Key> keys = {Key::fixed("00111"), Key::fixed("11011"),
                                       Key::fixed("00011"), Key::fixed("01010"),
                                       Key::fixed("11111")};
        const Trie t = build_trie(keys);
        const std::uint32_t want[5] = {3, 3, 3, 2, 3};
        for (int i = 0; i < 5; ++i)
            c.require(t.depth_of[i] == want[i],
                      "depth[" + std::to_string(i) + "]=" + std::to_string(t.depth_of[i]));
        c.require(distance(t, 1, 3) == 5, "distance(key2,key4)=" +
                                              std::to_string(distance(t, 1, 3)) + " want 5");
        push(1, "five-key-reconstruction", c, t0);
    }

    {  // 2: n = 2 closed forms as specified
        auto t0 = clock::now();
        detail::Check c;
        const double d2 = moments.dist_mean[2];
        const double v2 = moments.dist_variance(2);
        c.require(std::abs(d2 - 4.0) <= 1e-12, "E[Dist_2]=" + detail::fmt(d2) + " want 4");
        c.require(std::abs(v2 - 8.0) <= 1e-12, "Var[Dist_2]=" + detail::fmt(v2) + " want 8");
        double worst = 0.0;
        for (int i = 0; i <= 20; ++i) {
            const double t = -0.1 + 0.01 * i;
            const double want = std::exp(2 * t) / (2.0 - std::exp(2 * t));
            worst = std::max(worst, std::abs(exact_mgf(2, t) - want));
        }
        c.require(worst <= 1e-12,
                  "max |mgf - e^{2t}/(2-e^{2t})| = " + detail::fmt(worst) +
                      " (engine mgf_2(t) = e^{2t}: both leaves end one edge below the "
                      "split, so Dist_2 is the constant 2)");
        push(2, "n2-closed-forms", c, t0);
    }

    {  // 3: exact PMF vs seeded simulation
        auto t0 = clock::now();
        detail::Check c;
        for (std::size_t n : {3u, 8u, 32u, 128u}) {
            const SimReport rep = simulate_distance(n, 1'000'000, seed);
            const Pmf exact = dists.distance_pmf(n);
            const double tv = detail::tv_distance(rep.empirical_pmf, exact);
            c.require(tv < 0.01, "TV(n=" + std::to_string(n) + ")=" + detail::fmt(tv));
            const double gap = std::abs(rep.mean - exact.mean());
            c.require(gap <= 4.0 * rep.std_error,
                      "mean gap(n=" + std::to_string(n) + ")=" + detail::fmt(gap) + " > 4se=" +
                          detail::fmt(4.0 * rep.std_error));
        }
        push(3, "oracle-triangle", c, t0);
    }

    {  // 4: mean expansion
        auto t0 = clock::now();
        detail::Check c;
        const double gap4096 = std::abs(moments.dist_mean[4096] - mean_asymptotic(4096).total);
        c.require(gap4096 < 0.05, "gap(4096)=" + detail::fmt(gap4096));
        c.info("gap(4096)=" + detail::fmt(gap4096));
        double ratio_sum = 0.0;
        for (std::size_t n : {64u, 128u, 256u, 512u}) {
            const double g1 = std::abs(moments.dist_mean[n] - mean_asymptotic(n).total);
            const double g4 = std::abs(moments.dist_mean[4 * n] - mean_asymptotic(4 * n).total);
            ratio_sum += g4 / g1;
        }
        const double ratio = ratio_sum / 4.0;
        c.require(ratio <= 0.7, "mean gap decay ratio=" + detail::fmt(ratio));
        push(4, "mean-expansion", c, t0);
    }

    {  // 5: variance expansion and its constants
        auto t0 = clock::now();
        detail::Check c;
        const double gap = std::abs(moments.dist_variance(4096) - variance_asymptotic(4096).total);
        c.require(gap < 0.1, "var gap(4096)=" + detail::fmt(gap));
        c.info("var gap(4096)=" + detail::fmt(gap));
        const double a = alpha_constant();
        c.require(std::abs(a - 7.227113) <= 5e-6, "alpha=" + detail::fmt(a));
        // steady component recomputed in extended precision, term by term
        long double series = 0.0L;
        for (int k = 0; k < 96; ++k)
            series += std::log1p(std::exp2(static_cast<long double>(-k - 1)));
        const long double l2 = 0.693147180559945309417232121458L;
        const long double piL = 3.141592653589793238462643383280L;
        const long double steady_ref =
            (2.0L * piL * piL + 19.0L * l2 * l2 - 12.0L * l2 * series) / (3.0L * l2 * l2);
        const double steady = variance_asymptotic(4096).steady;
        c.require(std::abs(steady - static_cast<double>(steady_ref)) <= 1e-12 * std::abs(steady),
                  "steady=" + detail::fmt(steady) + " ref=" +
                      detail::fmt(static_cast<double>(steady_ref)));
        push(5, "variance-expansion", c, t0);
    }

    {  // 6: oscillation amplitude bounds, near-tight
        auto t0 = clock::now();
        detail::Check c;
        auto grid_sup = [](auto&& f) {
            double sup = 0.0;
            for (int i = 0; i < 10000; ++i) sup = std::max(sup, std::abs(f(i / 10000.0)));
            return sup;
        };
        struct BoundCase {
            const char* name;
            double sup;
            double bound;
        };
        const BoundCase cases[] = {
            {"eta1", grid_sup([](double u) { return eta1(u); }), 1.4261e-5},
            {"eta2", grid_sup([](double u) { return eta2(u); }), 1.5732e-6},
            {"xi", grid_sup([](double u) { return xi(u); }), 5.6541e-5},
        };
        for (const auto& b : cases) {
            c.require(b.sup <= b.bound, std::string(b.name) + " sup=" + detail::fmt(b.sup) +
                                            " exceeds " + detail::fmt(b.bound));
            c.require(b.sup >= 0.5 * b.bound, std::string(b.name) + " sup=" + detail::fmt(b.sup) +
                                                  " below half-bound " +
                                                  detail::fmt(0.5 * b.bound));
        }
        double hsup = 0.0;
        for (int i = 0; i <= 40; ++i) {
            const double t = -0.1 + 0.005 * i;
            for (int k = 1; k <= 13; ++k) {
                for (double fr : {0.0, 1.0 / 3.0, 2.0 / 3.0}) {
                    const auto n = static_cast<std::size_t>(std::llround(std::exp2(k + fr)));
                    if (n < 2) continue;
                    hsup = std::max(hsup, std::abs(oscillation_h(n, t)));
                }
            }
        }
        c.require(hsup <= 3e-4, "H sup=" + detail::fmt(hsup) + " exceeds 3e-4");
        c.require(hsup >= 1.5e-4, "H sup=" + detail::fmt(hsup) + " below half-bound 1.5e-4");
        push(6, "amplitude-bounds", c, t0);
    }

    {  // 7: centered-MGF oscillation between the envelopes
        auto t0 = clock::now();
        detail::Check c;
        const double t = 0.1;
        const std::vector<double> series = mgf_series(mgf_cap, t);
        const double g = envelope_g(t);
        double lo_err = 0.0, hi_err = 0.0, vmin = 1e300, vmax = -1e300;
        for (std::size_t n = 256; n <= mgf_cap; ++n) {
            const double centered = series[n] * std::exp(-t * floor_2lg(n));
            const double fr = frac_2lg(n);
            vmin = std::min(vmin, centered);
            vmax = std::max(vmax, centered);
            if (fr < 0.02) lo_err = std::max(lo_err, std::abs(centered - g));
            if (fr > 0.98) hi_err = std::max(hi_err, std::abs(centered - std::exp(fr * t) * g));
        }
        c.require(lo_err < 0.02, "low-bucket err=" + detail::fmt(lo_err));
        c.require(hi_err < 0.02 * std::exp(0.1), "high-bucket err=" + detail::fmt(hi_err));
        c.require(vmax - vmin >= 0.09, "spread=" + detail::fmt(vmax - vmin));
        c.info("spread=" + detail::fmt(vmax - vmin) + " over [" + detail::fmt(vmin) + ", " +
               detail::fmt(vmax) + "]");
        push(7, "envelope-oscillation", c, t0);
    }

    {  // 8: transform layer vs finite differences
        auto t0 = clock::now();
        detail::Check c;
        const double h = 1e-3;
        for (double sv : {-2.9, -2.7, -2.5, -2.3, -2.1}) {
            const MellinPoint p{{sv, 0.0}, -3.0, -2.0 - 2.0 * 2 * h / ln2};
            auto f = [&](double t) { return p_star(t, p).real(); };
            const double d1 = (-f(2 * h) + 8 * f(h) - 8 * f(-h) + f(-2 * h)) / (12 * h);
            const double d2 =
                (-f(2 * h) + 16 * f(h) - 30 * f(0.0) + 16 * f(-h) - f(-2 * h)) / (12 * h * h);
            const double bs = b_star(mean_strip_point({sv, 0.0})).real();
            const double ls = l_star(mean_strip_point({sv, 0.0})).real();
            c.require(std::abs(d1 - bs) / std::abs(bs) < 1e-5,
                      "dP/dt vs B* at s=" + detail::fmt(sv) + ": rel " +
                          detail::fmt(std::abs(d1 - bs) / std::abs(bs)));
            c.require(std::abs(d2 - ls) / std::abs(ls) < 1e-5,
                      "d2P/dt2 vs L* at s=" + detail::fmt(sv) + ": rel " +
                          detail::fmt(std::abs(d2 - ls) / std::abs(ls)));
            c.require(std::abs(f(0.0)) <= 1e-14, "P*(0,s) = " + detail::fmt(f(0.0)));
        }
        push(8, "transform-ladder", c, t0);
    }

    {  // 9: residue expansions vs Poisson mixtures
        auto t0 = clock::now();
        detail::Check c;
        std::vector<double> wmean(moments.cap + 1, 0.0), wsec(moments.cap + 1, 0.0);
        for (std::size_t n = 2; n <= moments.cap; ++n) {
            const double pairs = 0.5 * static_cast<double>(n) * (static_cast<double>(n) - 1);
            wmean[n] = pairs * moments.dist_mean[n];
            wsec[n] = pairs * moments.dist_second[n];
        }
        for (double z : {32.0, 64.0, 128.0}) {
            const double m1 = poisson_mixture(z, wmean);
            const double r1 = mean_residue_expansion(z);
            c.require(std::abs(m1 - r1) / std::abs(m1) < 1e-5,
                      "mean z=" + detail::fmt(z) + " rel " +
                          detail::fmt(std::abs(m1 - r1) / std::abs(m1)));
            const double m2 = poisson_mixture(z, wsec);
            const double r2 = second_moment_residue_expansion(z);
            c.require(std::abs(m2 - r2) / std::abs(m2) < 1e-5,
                      "second z=" + detail::fmt(z) + " rel " +
                          detail::fmt(std::abs(m2 - r2) / std::abs(m2)));
        }
        push(9, "poissonization-closure", c, t0);
    }

    {  // 10: characteristic-function inversion
        auto t0 = clock::now();
        detail::Check c;
        const CfInverter ex64(64, InvertMode::exact);
        const Pmf pmf64 = dists.distance_pmf(64);
        double worst = 0.0;
        for (long r = ex64.min_r(); r < ex64.min_r() + 120; ++r)
            worst = std::max(worst, std::abs(ex64.prob(r) - pmf64.prob(r + ex64.shift())));
        c.require(worst <= 1e-8, "n=64 max |invert - pmf| = " + detail::fmt(worst));
        const CfInverter ex4096(4096, InvertMode::exact);
        const CfInverter as4096(4096, InvertMode::asymptotic);
        const long lo = as4096.min_r() - static_cast<long>(as4096.grid_size()) / 4;
        double tv = 0.0;
        for (long r = lo; r < lo + static_cast<long>(as4096.grid_size()); ++r)
            tv += std::abs(ex4096.prob(r) - as4096.prob(r));
        tv *= 0.5;
        c.require(tv < 0.05,
                  "n=4096 TV(asymptotic, exact) = " + detail::fmt(tv) +
                      " (the (G+H)(iu) expansion is only valid near u = 0; at u = pi the "
                      "j=1 harmonic reaches |G+H| ~ 6, impossible for a CF)");
        push(10, "cf-inversion", c, t0);
    }

    {  // 11: concentration of Dist / lg n
        auto t0 = clock::now();
        detail::Check c;
        const auto rep = concentration_check(100000, 10000, seed, 0.5);
        c.require(rep.fraction >= 0.95, "fraction=" + detail::fmt(rep.fraction));
        c.info("fraction=" + detail::fmt(rep.fraction));
        push(11, "concentration", c, t0);
    }

    {  // 12: distance-sum mean expansion
        auto t0 = clock::now();
        detail::Check c;
        for (int k = 6; k <= 12; ++k) {
            const std::size_t n = 1ull << k;
            const double nn = static_cast<double>(n);
            const double exact = 0.5 * nn * (nn - 1) * moments.dist_mean[n];
            const double gap = std::abs(exact - wiener_mean_asymptotic(n));
            c.require(gap <= 5.0 * std::pow(nn, 1.6),
                      "n=2^" + std::to_string(k) + " gap=" + detail::fmt(gap));
        }
        const SimReport rep = simulate_wiener(1024, 1000, seed);
        const double want = wiener_mean_asymptotic(1024);
        const double rel = std::abs(rep.mean - want) / want;
        c.require(rel <= 0.03, "simulated mean rel gap=" + detail::fmt(rel));
        c.info("sim rel gap=" + detail::fmt(rel));
        push(12, "distance-sum-mean", c, t0);
    }

    if (full) {  // 13: independent Mellin quadrature
        auto t0 = clock::now();
        detail::Check c;
        const double num = b_star_quadrature(moments, -2.5, 500.0);
        const double ref = b_star(mean_strip_point({-2.5, 0.0})).real();
        const double rel = std::abs(num - ref) / std::abs(ref);
        c.require(rel <= 1e-3, "quadrature rel err=" + detail::fmt(rel));
        c.info("quadrature=" + detail::fmt(num) + " transform=" + detail::fmt(ref) +
               " rel=" + detail::fmt(rel));
        push(13, "mellin-quadrature", c, t0);
    }

    int failed = 0;
    for (const auto& r : results)
        if (!r.passed) ++failed;
    log << (failed == 0 ? "all criteria passed"
                        : std::to_string(failed) + " criterion(s) failed")
        << '\n';
    return results;
}

inline int exit_code(const std::vector<CriterionResult>& results) {
    for (const auto& r : results)
        if (!r.passed) return 2;
    return 0;
}

}  // namespace trielab::acceptance
