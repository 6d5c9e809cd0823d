#pragma once

// Binary tries over bit keys. Construction partitions the key set on
// successive bits, exactly mirroring progressive insertion: n = 0 builds
// nothing, n = 1 a lone leaf, n >= 2 an internal node splitting on the
// current bit. Single-child chains are kept explicit; every edge counts.
//
// A built Trie is immutable. TrieBuilder keeps its scratch arrays alive so a
// simulation can build millions of tries without reallocating.

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "trielab/bitkeys.hpp"

namespace trielab {

inline constexpr std::size_t default_depth_cap = 4096;

struct Trie {
    struct Node {
        std::int32_t child[2] = {-1, -1};
        std::int32_t parent = -1;
        std::int32_t key = -1;  // >= 0 marks a leaf
        std::uint32_t depth = 0;
    };

    std::vector<Node> nodes;
    std::int32_t root = -1;
    std::size_t key_count = 0;
    std::vector<std::int32_t> leaf_of;    // key index -> node
    std::vector<std::uint32_t> depth_of;  // key index -> leaf depth
    std::uint64_t wiener = 0;             // sum of pairwise leaf distances

    bool empty() const { return root < 0; }
};

// Anything exposing bit(key_index, bit_index) can feed the builder.
struct KeySpanSource {
    std::span<const Key> keys;
    int bit(std::size_t key, std::size_t i) const { return keys[key].bit(i); }
};

// Pure-function bit source for seeded simulations: no per-key state at all.
struct StreamSource {
    std::uint64_t root_stream;
    std::uint64_t key_stream(std::size_t key) const { return rng::derive(root_stream, key); }
    std::uint64_t word(std::size_t key, std::uint64_t w) const {
        return rng::word(key_stream(key), w);
    }
    int bit(std::size_t key, std::size_t i) const {
        return static_cast<int>((word(key, i >> 6) >> (i & 63)) & 1u);
    }
};

class TrieBuilder {
  public:
    explicit TrieBuilder(std::size_t depth_cap = default_depth_cap) : depth_cap_(depth_cap) {}

    template <class BitSource>
    Trie build(const BitSource& src, std::size_t n) {
        Trie t;
        t.key_count = n;
        if (n == 0) return t;
        t.leaf_of.assign(n, -1);
        t.depth_of.assign(n, 0);
        t.nodes.reserve(2 * n + 16);
        order_.resize(n);
        for (std::size_t i = 0; i < n; ++i) order_[i] = static_cast<std::int32_t>(i);
        ones_.resize(n);
        stack_.clear();
        stack_.push_back({0, n, 0, -1, 0});
        try {
            while (!stack_.empty()) {
                Frame f = stack_.back();
                stack_.pop_back();
                const std::int32_t node = static_cast<std::int32_t>(t.nodes.size());
                t.nodes.push_back({});
                t.nodes[node].parent = f.parent;
                t.nodes[node].depth = static_cast<std::uint32_t>(f.depth);
                if (f.parent >= 0)
                    t.nodes[f.parent].child[f.side] = node;
                else
                    t.root = node;
                // the edge above this node separates (end-begin) leaves from the rest
                if (f.parent >= 0) {
                    const std::uint64_t below = f.end - f.begin;
                    t.wiener += below * (static_cast<std::uint64_t>(n) - below);
                }
                if (f.end - f.begin == 1) {
                    const std::int32_t k = order_[f.begin];
                    t.nodes[node].key = k;
                    t.leaf_of[k] = node;
                    t.depth_of[k] = static_cast<std::uint32_t>(f.depth);
                    continue;
                }
                if (f.depth >= depth_cap_)
                    throw std::runtime_error("trie depth cap exceeded at depth " +
                                             std::to_string(f.depth));
                // stable partition on the current bit: zeros left, ones right
                std::size_t lo = f.begin, hi = 0;
                for (std::size_t i = f.begin; i < f.end; ++i) {
                    const std::int32_t k = order_[i];
                    if (src.bit(static_cast<std::size_t>(k), f.depth) == 0)
                        order_[lo++] = k;
                    else
                        ones_[hi++] = k;
                }
                for (std::size_t i = 0; i < hi; ++i) order_[lo + i] = ones_[i];
                const std::size_t mid = lo;
                if (mid > f.begin) stack_.push_back({f.begin, mid, f.depth + 1, node, 0});
                if (mid < f.end) stack_.push_back({mid, f.end, f.depth + 1, node, 1});
            }
        } catch (const insufficient_bits_error&) {
            throw indistinguishable_keys_error(
                "undistinguishable fixed keys: ran out of bits while separating keys");
        }
        return t;
    }

  private:
    struct Frame {
        std::size_t begin, end, depth;
        std::int32_t parent;
        int side;
    };

    std::size_t depth_cap_;
    std::vector<std::int32_t> order_, ones_;
    std::vector<Frame> stack_;
};

inline Trie build_trie(std::span<const Key> keys, std::size_t depth_cap = default_depth_cap) {
    TrieBuilder b(depth_cap);
    return b.build(KeySpanSource{keys}, keys.size());
}

inline Trie build_trie(const std::vector<Key>& keys, std::size_t depth_cap = default_depth_cap) {
    return build_trie(std::span<const Key>(keys.data(), keys.size()), depth_cap);
}

// Edge count between the leaves of keys i and j.
inline std::size_t distance(const Trie& t, std::size_t i, std::size_t j) {
    if (i >= t.key_count || j >= t.key_count)
        throw std::invalid_argument("distance: key index out of range");
    if (i == j) return 0;
    std::int32_t a = t.leaf_of[i], b = t.leaf_of[j];
    std::size_t steps = 0;
    while (t.nodes[a].depth > t.nodes[b].depth) a = t.nodes[a].parent, ++steps;
    while (t.nodes[b].depth > t.nodes[a].depth) b = t.nodes[b].parent, ++steps;
    while (a != b) {
        a = t.nodes[a].parent;
        b = t.nodes[b].parent;
        steps += 2;
    }
    return steps;
}

inline std::uint64_t wiener_index(const Trie& t) { return t.wiener; }

struct CompleteTrieStats {
    double mean = 0.0;
    double variance = 0.0;
};

// Exact distance moments for a uniformly random unordered leaf pair in the
// perfect trie of height h (2^h leaves, all at depth h). Pairs whose lowest
// common ancestor sits at depth d number 2^(2h-d-2) and are at distance 2(h-d).
inline CompleteTrieStats complete_trie_stats(unsigned h) {
    if (h < 1) throw std::domain_error("complete_trie_stats: height must be >= 1");
    const double pairs = std::ldexp(1.0, static_cast<int>(2 * h - 1)) -
                         std::ldexp(1.0, static_cast<int>(h - 1));
    double m1 = 0.0, m2 = 0.0;
    for (unsigned d = 0; d < h; ++d) {
        const double cnt = std::ldexp(1.0, static_cast<int>(2 * h - d - 2));
        const double dist = 2.0 * (h - d);
        m1 += cnt * dist;
        m2 += cnt * dist * dist;
    }
    m1 /= pairs;
    m2 /= pairs;
    return {m1, m2 - m1 * m1};
}

}  // namespace trielab
