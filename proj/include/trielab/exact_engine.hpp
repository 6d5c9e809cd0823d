#pragma once

// Exact distributions and moments of the random depth and the random pairwise
// distance, computed from the binomial-splitting recurrences. Conditioning on
// the left-subtree count L ~ Bin(n, 1/2), a random pair lies in one subtree
// (recurse) or straddles the root (depth convolution plus two edges). The
// events L in {0, n} reproduce the size-n problem itself; those self terms are
// isolated algebraically: same-level occurrences move to the left-hand side
// (factor 1 - 2^{1-n}), while the depth law's self term refers one level down
// and is consumed by iterating the level index upward.
//
// All published quantities carry certified truncation tails below 1e-12.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "trielab/special_functions.hpp"

namespace trielab {

inline constexpr double mgf_t_max = 0.1;  // validated argument range for E[e^{t Dist}]

struct Pmf {
    long support_offset = 0;
    std::vector<double> masses;
    double tail_bound = 0.0;

    double prob(long k) const {
        const long i = k - support_offset;
        if (i < 0 || i >= static_cast<long>(masses.size())) return 0.0;
        return masses[static_cast<std::size_t>(i)];
    }
    double mean() const {
        double m = 0.0;
        for (std::size_t i = 0; i < masses.size(); ++i)
            m += (support_offset + static_cast<double>(i)) * masses[i];
        return m;
    }
    double second_moment() const {
        double m = 0.0;
        for (std::size_t i = 0; i < masses.size(); ++i) {
            const double k = support_offset + static_cast<double>(i);
            m += k * k * masses[i];
        }
        return m;
    }
    double variance() const {
        const double m = mean();
        return second_moment() - m * m;
    }
    double total_mass() const {
        double s = 0.0;
        for (double v : masses) s += v;
        return s;
    }
};

struct SplitWeights {
    std::size_t n = 0;
    std::vector<double> prob;  // prob[l] = C(n,l) 2^{-n}
};

namespace detail {

// C(n,l) 2^{-n} for l = 0..n, anchored at the central term in log space and
// swept outward by exact ratios. Entries below ~1e-320 stay zero.
inline void split_weights_into(std::size_t n, std::vector<double>& out) {
    out.assign(n + 1, 0.0);
    const std::size_t m = n / 2;
    const double log_center = std::lgamma(static_cast<double>(n) + 1) -
                              std::lgamma(static_cast<double>(m) + 1) -
                              std::lgamma(static_cast<double>(n - m) + 1) -
                              static_cast<double>(n) * ln2;
    out[m] = std::exp(log_center);
    for (std::size_t l = m; l < n; ++l) {
        const double next = out[l] * (static_cast<double>(n - l) / static_cast<double>(l + 1));
        if (next < 1e-320) break;
        out[l + 1] = next;
    }
    for (std::size_t l = m; l > 0; --l) {
        const double prev = out[l] * (static_cast<double>(l) / static_cast<double>(n - l + 1));
        if (prev < 1e-320) break;
        out[l - 1] = prev;
    }
}

}  // namespace detail

inline SplitWeights split_weights(std::size_t n) {
    SplitWeights w;
    w.n = n;
    detail::split_weights_into(n, w.prob);
    return w;
}

struct MomentTable {
    std::size_t cap = 0;
    std::vector<double> depth_mean;     // E[depth_n]
    std::vector<double> depth_second;   // E[depth_n^2]
    std::vector<double> dist_mean;      // E[Dist_n]
    std::vector<double> dist_second;    // E[Dist_n^2]

    double depth_variance(std::size_t n) const {
        return depth_second[n] - depth_mean[n] * depth_mean[n];
    }
    double dist_variance(std::size_t n) const {
        return dist_second[n] - dist_mean[n] * dist_mean[n];
    }
};

inline MomentTable moment_table(std::size_t cap) {
    if (cap < 2) throw std::domain_error("moment_table: cap must be >= 2");
    MomentTable t;
    t.cap = cap;
    t.depth_mean.assign(cap + 1, 0.0);
    t.depth_second.assign(cap + 1, 0.0);
    t.dist_mean.assign(cap + 1, 0.0);
    t.dist_second.assign(cap + 1, 0.0);
    std::vector<double> w;
    for (std::size_t n = 2; n <= cap; ++n) {
        detail::split_weights_into(n, w);
        const double self = std::ldexp(1.0, 1 - static_cast<int>(n));
        const double nn = static_cast<double>(n);
        double se = 0.0, sq = 0.0, sd = 0.0, ss = 0.0;
        for (std::size_t l = 1; l < n; ++l) {
            const double wl = w[l];
            if (wl == 0.0) continue;
            const double ld = static_cast<double>(l);
            const double el = t.depth_mean[l], er = t.depth_mean[n - l];
            const double ql = t.depth_second[l], qr = t.depth_second[n - l];
            se += wl * ld * el;
            sq += wl * ld * (ql + 2 * el + 1);
            const double c2 = 0.5 * ld * (ld - 1);
            const double cross = ld * (nn - ld);
            sd += wl * (2 * c2 * t.dist_mean[l] + cross * (el + er + 2));
            ss += wl * (2 * c2 * t.dist_second[l] +
                        cross * (ql + qr + 2 * el * er + 4 * el + 4 * er + 4));
        }
        t.depth_mean[n] = ((2.0 / nn) * se + 1.0) / (1.0 - self);
        t.depth_second[n] =
            ((2.0 / nn) * sq + self * (2 * t.depth_mean[n] + 1)) / (1.0 - self);
        const double cn2 = 0.5 * nn * (nn - 1);
        t.dist_mean[n] = sd / (cn2 * (1.0 - self));
        t.dist_second[n] = ss / (cn2 * (1.0 - self));
    }
    return t;
}

// Depth and distance laws up to a fixed cap, sharing one truncation level.
class DistributionEngine {
  public:
    explicit DistributionEngine(std::size_t cap) : cap_(cap) {
        if (cap < 1) throw std::domain_error("DistributionEngine: cap must be >= 1");
        depth_levels_ = pick_levels(cap);
        build_depth();
    }

    std::size_t cap() const { return cap_; }

    // Law of the depth of a uniformly random key among n.
    Pmf depth_pmf(std::size_t n) const {
        if (n < 1 || n > cap_) throw std::domain_error("depth_pmf: n out of range [1, cap]");
        const double* row = depth_row(n);
        Pmf p;
        p.support_offset = (n == 1) ? 0 : 1;
        p.masses.assign(row + p.support_offset, row + depth_levels_);
        p.tail_bound = depth_tail(n);
        return p;
    }

    // Law of the edge distance between two uniformly random distinct keys.
    Pmf distance_pmf(std::size_t n) {
        if (n < 2 || n > cap_) throw std::domain_error("distance_pmf: n out of range [2, cap]");
        build_distance();
        const double* row = dist_.data() + n * dist_levels_;
        Pmf p;
        p.support_offset = 2;
        p.masses.assign(row + 2, row + dist_levels_);
        p.tail_bound = 2.0 * depth_tail(n);
        return p;
    }

  private:
    static std::size_t pick_levels(std::size_t cap) {
        // P(depth_n > k) <= (n-1) 2^{-k}; grow until the cut mass is certified tiny
        std::size_t k = static_cast<std::size_t>(
                            std::ceil(2.0 * std::log2(static_cast<double>(cap < 2 ? 2 : cap)))) +
                        64;
        while (static_cast<double>(cap) * std::ldexp(1.0, -static_cast<int>(k - 1)) > 1e-12)
            k *= 2;
        return k;
    }

    double depth_tail(std::size_t n) const {
        return static_cast<double>(n - 1) *
               std::ldexp(1.0, -static_cast<int>(depth_levels_ - 1));
    }

    const double* depth_row(std::size_t n) const { return depth_.data() + n * depth_levels_; }

    void build_depth() {
        const std::size_t K = depth_levels_;
        depth_.assign((cap_ + 1) * K, 0.0);
        depth_[1 * K + 0] = 1.0;
        std::vector<double> w;
        for (std::size_t n = 2; n <= cap_; ++n) {
            detail::split_weights_into(n, w);
            const double self = std::ldexp(1.0, 1 - static_cast<int>(n));
            double* row = depth_.data() + n * K;
            for (std::size_t k = 1; k < K; ++k) {
                double acc = 0.0;
                for (std::size_t l = 1; l < n; ++l) {
                    if (w[l] == 0.0) continue;
                    acc += w[l] * static_cast<double>(l) * depth_[l * K + (k - 1)];
                }
                row[k] = (2.0 / static_cast<double>(n)) * acc + self * row[k - 1];
            }
        }
    }

    void build_distance() {
        if (!dist_.empty()) return;
        const std::size_t K = depth_levels_;
        dist_levels_ = 2 * K;
        dist_.assign((cap_ + 1) * dist_levels_, 0.0);
        std::vector<double> w;
        std::vector<double> acc(dist_levels_);
        for (std::size_t n = 2; n <= cap_; ++n) {
            detail::split_weights_into(n, w);
            const double nn = static_cast<double>(n);
            std::fill(acc.begin(), acc.end(), 0.0);
            for (std::size_t l = 1; l < n; ++l) {
                const double wl = w[l];
                if (wl == 0.0) continue;
                const double ld = static_cast<double>(l);
                const double c2 = 0.5 * ld * (ld - 1);
                if (c2 > 0.0) {
                    const double f = 2.0 * wl * c2;
                    const double* dl = dist_.data() + l * dist_levels_;
                    for (std::size_t k = 2; k < dist_levels_; ++k) acc[k] += f * dl[k];
                }
                // straddling pair: two root edges plus one depth from each side
                if (2 * l <= n) {
                    const double f =
                        (2 * l == n ? 1.0 : 2.0) * wl * ld * (nn - ld);
                    const double* da = depth_row(l);
                    const double* db = depth_row(n - l);
                    for (std::size_t a = 0; a < K; ++a) {
                        const double va = f * da[a];
                        if (va < 1e-320) continue;
                        double* out = acc.data() + a + 2;
                        const std::size_t bmax = std::min(K, dist_levels_ - 2 - a);
                        for (std::size_t b = 0; b < bmax; ++b) out[b] += va * db[b];
                    }
                }
            }
            const double cn2 = 0.5 * nn * (nn - 1);
            const double scale = 1.0 / (cn2 * (1.0 - std::ldexp(1.0, 1 - static_cast<int>(n))));
            double* row = dist_.data() + n * dist_levels_;
            for (std::size_t k = 0; k < dist_levels_; ++k) row[k] = acc[k] * scale;
        }
    }

    std::size_t cap_;
    std::size_t depth_levels_ = 0;
    std::size_t dist_levels_ = 0;
    std::vector<double> depth_;
    std::vector<double> dist_;
};

inline Pmf depth_pmf(std::size_t n) {
    if (n < 1) throw std::domain_error("depth_pmf: n must be >= 1 (no key to select)");
    return DistributionEngine(n).depth_pmf(n);
}

inline Pmf distance_pmf(std::size_t n) {
    if (n < 2) throw std::domain_error("distance_pmf: n must be >= 2");
    DistributionEngine e(n);
    return e.distance_pmf(n);
}

namespace detail {

// One recurrence sweep of psi_n = E[x^{depth_n}] and phi_n = E[x^{Dist_n}]
// with x = e^t (real MGF) or x = e^{iu} (characteristic function).
template <class Scalar>
struct MgfSweep {
    std::vector<Scalar> depth_gen;  // psi
    std::vector<Scalar> dist_gen;   // phi

    void run(std::size_t n_max, Scalar x) {
        depth_gen.assign(n_max + 1, Scalar{});
        dist_gen.assign(n_max + 1, Scalar{});
        if (n_max >= 1) depth_gen[1] = Scalar{1};
        const Scalar x2 = x * x;
        std::vector<double> w;
        for (std::size_t n = 2; n <= n_max; ++n) {
            split_weights_into(n, w);
            const double self = std::ldexp(1.0, 1 - static_cast<int>(n));
            const double nn = static_cast<double>(n);
            Scalar sp{}, sf{};
            for (std::size_t l = 1; l < n; ++l) {
                const double wl = w[l];
                if (wl == 0.0) continue;
                const double ld = static_cast<double>(l);
                sp += (wl * ld) * depth_gen[l];
                const double c2 = 0.5 * ld * (ld - 1);
                sf += (2.0 * wl * c2) * dist_gen[l] +
                      (wl * ld * (nn - ld)) * depth_gen[l] * depth_gen[n - l];
            }
            depth_gen[n] = (2.0 * x * sp) / (nn * (Scalar{1} - x * self));
            const double cn2 = 0.5 * nn * (nn - 1);
            dist_gen[n] = (sf * x2 * (1.0 / (cn2 * (1.0 - self))));
        }
    }
};

}  // namespace detail

inline void require_mgf_domain(double t) {
    if (!(std::abs(t) <= mgf_t_max + 1e-15))
        throw std::domain_error("mgf argument t must lie in [-0.1, 0.1]");
}

// E[e^{t Dist_n}] for every size up to n_max in one O(n_max^2) sweep.
inline std::vector<double> mgf_series(std::size_t n_max, double t) {
    require_mgf_domain(t);
    detail::MgfSweep<double> sweep;
    sweep.run(n_max, std::exp(t));
    return std::move(sweep.dist_gen);
}

inline double exact_mgf(std::size_t n, double t) {
    if (n < 2) throw std::domain_error("exact_mgf: n must be >= 2");
    return mgf_series(n, t)[n];
}

// E[e^{iu Dist_n}]; valid for any real u.
inline complex_t exact_cf(std::size_t n, double u) {
    if (n < 2) throw std::domain_error("exact_cf: n must be >= 2");
    detail::MgfSweep<complex_t> sweep;
    sweep.run(n, std::exp(complex_t(0.0, u)));
    return sweep.dist_gen[n];
}

// sum_n values[n] P(N(z) = n) for Poisson N(z), with the window certified to
// carry all but < 1e-15 of the mass.
inline double poisson_mixture(double z, std::span<const double> values) {
    if (!(z > 0.0)) throw std::domain_error("poisson_mixture: z must be positive");
    const double spread = 12.0 * std::sqrt(z) + 30.0;
    const std::size_t need = static_cast<std::size_t>(z + spread) + 1;
    if (values.size() < need)
        throw table_range_error("poisson_mixture: value table too short", need);
    const std::size_t mode = static_cast<std::size_t>(z);
    const double log_mode = static_cast<double>(mode) * std::log(z) - z -
                            std::lgamma(static_cast<double>(mode) + 1);
    const double w_mode = std::exp(log_mode);
    // weights by exact ratio, out from the mode until negligible
    std::size_t lo = mode, hi = mode;
    double acc = w_mode * values[mode], mass = w_mode;
    double w = w_mode;
    for (std::size_t n = mode + 1; n < values.size(); ++n) {
        w *= z / static_cast<double>(n);
        if (w < w_mode * 1e-22) break;
        acc += w * values[n];
        mass += w;
        hi = n;
    }
    w = w_mode;
    for (std::size_t n = mode; n > 0; --n) {
        w *= static_cast<double>(n) / z;
        if (w < w_mode * 1e-22) break;
        acc += w * values[n - 1];
        mass += w;
        lo = n - 1;
    }
    (void)lo;
    if (1.0 - mass > 1e-15 && hi + 1 >= values.size())
        throw table_range_error("poisson_mixture: value table too short for tail", need);
    return acc;
}

}  // namespace trielab
