#pragma once

// Seeded trie simulation. Every trial draws its keys from the substream
// (seed, trial, key_index) and its pair choice from a separate pair
// substream, so any single trial can be replayed in isolation and the pair
// picks survive changes elsewhere. Trials are partitioned into fixed chunks
// whose histograms merge in chunk order; counts are integers, so reports are
// byte-identical for any thread count.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <map>
#include <thread>
#include <vector>

#include "trielab/exact_engine.hpp"
#include "trielab/threading.hpp"
#include "trielab/trie_core.hpp"

namespace trielab {

struct SimReport {
    std::size_t n = 0;
    std::size_t trials = 0;
    SeedSpec seed;
    Pmf empirical_pmf;        // counts / trials, exactly normalized
    double mean = 0.0;
    double variance = 0.0;    // unbiased sample variance
    double std_error = 0.0;   // sample sd / sqrt(trials)
};

struct ConcentrationReport {
    std::size_t n = 0;
    std::size_t trials = 0;
    SeedSpec seed;
    double epsilon = 0.5;
    double fraction = 0.0;  // trials with |Dist / lg n - 2| < epsilon
    double mean = 0.0;      // sample mean of Dist / lg n
};

namespace detail {

using Histogram = std::map<std::int64_t, std::uint64_t>;

// Run fn(trial, chunk_histogram) over all trials with a thread-count-independent
// chunk layout, then merge chunk histograms in chunk order.
template <class Fn>
inline Histogram run_trials(std::size_t trials, Fn&& fn) {
    const std::size_t chunk_size = std::max<std::size_t>(1, trials / 256);
    const std::size_t chunks = (trials + chunk_size - 1) / chunk_size;
    std::vector<Histogram> partial(chunks);
    const unsigned nthreads = static_cast<unsigned>(std::min<std::size_t>(thread_cap(), chunks));
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    for (unsigned tid = 0; tid < nthreads; ++tid) {
        pool.emplace_back([&, tid] {
            for (std::size_t c = tid; c < chunks; c += nthreads) {
                const std::size_t begin = c * chunk_size;
                const std::size_t end = std::min(trials, begin + chunk_size);
                for (std::size_t trial = begin; trial < end; ++trial)
                    fn(trial, partial[c]);
            }
        });
    }
    for (auto& th : pool) th.join();
    Histogram merged;
    for (const auto& h : partial)
        for (const auto& [k, c] : h) merged[k] += c;
    return merged;
}

inline SimReport report_from_histogram(std::size_t n, std::size_t trials,
                                       const SeedSpec& seed, const Histogram& h) {
    SimReport r;
    r.n = n;
    r.trials = trials;
    r.seed = seed;
    const std::int64_t lo = h.begin()->first;
    const std::int64_t hi = h.rbegin()->first;
    r.empirical_pmf.support_offset = lo;
    r.empirical_pmf.masses.assign(static_cast<std::size_t>(hi - lo + 1), 0.0);
    double mean = 0.0;
    for (const auto& [k, c] : h) {
        r.empirical_pmf.masses[static_cast<std::size_t>(k - lo)] =
            static_cast<double>(c) / static_cast<double>(trials);
        mean += static_cast<double>(k) * static_cast<double>(c);
    }
    mean /= static_cast<double>(trials);
    double ss = 0.0;
    for (const auto& [k, c] : h) {
        const double d = static_cast<double>(k) - mean;
        ss += d * d * static_cast<double>(c);
    }
    r.mean = mean;
    r.variance = trials > 1 ? ss / static_cast<double>(trials - 1) : 0.0;
    r.std_error = trials > 0 ? std::sqrt(r.variance / static_cast<double>(trials)) : 0.0;
    return r;
}

struct PairPick {
    std::size_t i, j;
};

inline PairPick pick_pair(std::uint64_t pair_stream, std::size_t n) {
    std::uint64_t counter = 0;
    const std::size_t i = static_cast<std::size_t>(rng::bounded(pair_stream, counter, n));
    std::size_t j = static_cast<std::size_t>(rng::bounded(pair_stream, counter, n - 1));
    if (j >= i) ++j;
    return {i, j};
}

}  // namespace detail

// Distance between one uniformly random unordered key pair per trial,
// measured on the freshly built trie.
inline SimReport simulate_distance(std::size_t n, std::size_t trials, const SeedSpec& seed) {
    if (n < 2) throw std::domain_error("simulate_distance: n must be >= 2");
    if (trials < 1) throw std::domain_error("simulate_distance: trials must be >= 1");
    const std::uint64_t trial_root = rng::derive(seed.seed, rng::domain_trials);
    const std::uint64_t pair_root = rng::derive(seed.seed, rng::domain_pairs);
    auto h = detail::run_trials(trials, [&](std::size_t trial, detail::Histogram& out) {
        thread_local TrieBuilder builder;
        const StreamSource src{rng::derive(trial_root, trial)};
        const Trie t = builder.build(src, n);
        const auto [i, j] = detail::pick_pair(rng::derive(pair_root, trial), n);
        out[static_cast<std::int64_t>(distance(t, i, j))]++;
    });
    return detail::report_from_histogram(n, trials, seed, h);
}

// Per-trial sum of all pairwise leaf distances.
inline SimReport simulate_wiener(std::size_t n, std::size_t trials, const SeedSpec& seed) {
    if (n < 2) throw std::domain_error("simulate_wiener: n must be >= 2");
    if (trials < 1) throw std::domain_error("simulate_wiener: trials must be >= 1");
    const std::uint64_t trial_root = rng::derive(seed.seed, rng::domain_trials);
    auto h = detail::run_trials(trials, [&](std::size_t trial, detail::Histogram& out) {
        thread_local TrieBuilder builder;
        const StreamSource src{rng::derive(trial_root, trial)};
        const Trie t = builder.build(src, n);
        out[static_cast<std::int64_t>(t.wiener)]++;
    });
    return detail::report_from_histogram(n, trials, seed, h);
}

// Fraction of sampled pair distances with |Dist / lg n - 2| < epsilon.
// Distances come from the leaf-depth identity rather than a built trie: the
// leaf of key i sits at depth 1 + max lcp(i, .), and the pair path length is
// depth_i + depth_j - 2 lcp(i, j). Key bits are pure functions of the seed,
// so the sampled values match trie construction exactly while staying O(n)
// per trial at n = 10^5.
inline ConcentrationReport concentration_check(std::size_t n, std::size_t trials,
                                               const SeedSpec& seed, double epsilon = 0.5) {
    if (n < 16) throw std::domain_error("concentration_check: n must be >= 16");
    if (trials < 1) throw std::domain_error("concentration_check: trials must be >= 1");
    const std::uint64_t trial_root = rng::derive(seed.seed, rng::domain_trials);
    const std::uint64_t pair_root = rng::derive(seed.seed, rng::domain_pairs);

    auto lcp_words = [](const StreamSource& src, std::uint64_t wi, std::uint64_t wj,
                        std::size_t ki, std::size_t kj) -> std::size_t {
        std::uint64_t x = wi ^ wj;
        std::size_t base = 0;
        std::uint64_t w = 1;
        while (x == 0) {  // identical leading words: extend (rare)
            base += 64;
            x = src.word(ki, w) ^ src.word(kj, w);
            ++w;
            if (w > (1u << 16))
                throw indistinguishable_keys_error("undistinguishable keys in simulation");
        }
        return base + static_cast<std::size_t>(std::countr_zero(x));
    };

    auto h = detail::run_trials(trials, [&](std::size_t trial, detail::Histogram& out) {
        const StreamSource src{rng::derive(trial_root, trial)};
        thread_local std::vector<std::uint64_t> words;
        words.resize(n);
        for (std::size_t k = 0; k < n; ++k) words[k] = src.word(k, 0);
        const auto [i, j] = detail::pick_pair(rng::derive(pair_root, trial), n);
        std::size_t best_i = 0, best_j = 0;
        for (std::size_t k = 0; k < n; ++k) {
            if (k != i) best_i = std::max(best_i, lcp_words(src, words[i], words[k], i, k));
            if (k != j) best_j = std::max(best_j, lcp_words(src, words[j], words[k], j, k));
        }
        const std::size_t lij = lcp_words(src, words[i], words[j], i, j);
        const std::int64_t dist =
            static_cast<std::int64_t>(1 + best_i) + static_cast<std::int64_t>(1 + best_j) -
            2 * static_cast<std::int64_t>(lij);
        out[dist]++;
    });

    ConcentrationReport r;
    r.n = n;
    r.trials = trials;
    r.seed = seed;
    r.epsilon = epsilon;
    const double lg = std::log2(static_cast<double>(n));
    std::uint64_t inside = 0;
    double mean = 0.0;
    for (const auto& [k, c] : h) {
        if (std::abs(static_cast<double>(k) / lg - 2.0) < epsilon) inside += c;
        mean += static_cast<double>(k) / lg * static_cast<double>(c);
    }
    r.fraction = static_cast<double>(inside) / static_cast<double>(trials);
    r.mean = mean / static_cast<double>(trials);
    return r;
}

}  // namespace trielab
