#pragma once

// Keys under the unbiased Bernoulli model: conceptually infinite fair-bit
// strings, materialized on demand. Random keys draw their bits from a
// SplitMix64 counter stream, so bit i of key (seed, index) is a pure function
// of (seed, index, i) — identical on every platform and independent of the
// order in which bits are first touched. Fixed keys hold an explicit finite
// bit string and never extend.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "trielab/errors.hpp"

namespace trielab {

namespace rng {

inline constexpr std::uint64_t golden = 0x9E3779B97F4A7C15ull;

// SplitMix64 finalizer (Steele, Lea, Flood), applied to a weighted counter.
inline std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// Child stream derivation: one mix of parent + (index+1)*golden.
inline std::uint64_t derive(std::uint64_t parent, std::uint64_t index) {
    return mix(parent + (index + 1) * golden);
}

// 64 fresh bits: word w of the stream.
inline std::uint64_t word(std::uint64_t stream, std::uint64_t w) {
    return mix(stream + (w + 1) * golden);
}

// Uniform draw from [0, bound) by rejection on the top of the range.
inline std::uint64_t bounded(std::uint64_t stream, std::uint64_t& counter, std::uint64_t bound) {
    const std::uint64_t limit = ~std::uint64_t{0} - ~std::uint64_t{0} % bound;
    for (;;) {
        std::uint64_t v = word(stream, counter++);
        if (v < limit) return v % bound;
    }
}

// Substream domain tags.
inline constexpr std::uint64_t domain_keys = 1;
inline constexpr std::uint64_t domain_trials = 2;
inline constexpr std::uint64_t domain_pairs = 3;
inline constexpr std::uint64_t domain_picks = 4;

}  // namespace rng

struct SeedSpec {
    std::uint64_t seed = 0;
    std::string generator_name = "splitmix64";
};

class Key {
  public:
    static Key random(std::uint64_t stream_seed) {
        Key k;
        k.stream_ = stream_seed;
        k.random_ = true;
        return k;
    }

    // Per-key substream of a seed, independent of insertion order.
    static Key random(const SeedSpec& seed, std::uint64_t key_index) {
        return random(rng::derive(rng::derive(seed.seed, rng::domain_keys), key_index));
    }

    // Fixed key from a string of '0'/'1' characters, most significant bit first.
    static Key fixed(std::string_view bits) {
        Key k;
        k.random_ = false;
        k.fixed_bits_.reserve(bits.size());
        for (char c : bits) k.fixed_bits_.push_back(c == '1' ? 1 : 0);
        return k;
    }

    bool is_random() const { return random_; }
    std::size_t materialized_length() const {
        return random_ ? words_.size() * 64 : fixed_bits_.size();
    }

    // Bit i of the dyadic expansion; materializes random words as needed.
    int bit(std::size_t i) const {
        if (!random_) {
            if (i >= fixed_bits_.size()) throw insufficient_bits_error(i);
            return fixed_bits_[i];
        }
        return static_cast<int>((word_at(i >> 6) >> (i & 63)) & 1u);
    }

    std::uint64_t word_at(std::size_t w) const {
        while (words_.size() <= w) words_.push_back(rng::word(stream_, words_.size()));
        return words_[w];
    }

  private:
    bool random_ = false;
    std::uint64_t stream_ = 0;
    mutable std::vector<std::uint64_t> words_;  // materialized cache; single-writer
    std::vector<std::uint8_t> fixed_bits_;
};

inline int key_bit(const Key& key, std::size_t i) { return key.bit(i); }

// Longest common prefix length. Throws indistinguishable_keys_error when two
// fixed keys agree through everything either can produce.
inline std::size_t lcp(const Key& a, const Key& b) {
    if (a.is_random() && b.is_random()) {
        constexpr std::size_t word_cap = 1u << 16;  // 4M bits; equal streams are a caller bug
        for (std::size_t w = 0; w < word_cap; ++w) {
            std::uint64_t x = a.word_at(w) ^ b.word_at(w);
            if (x) return w * 64 + static_cast<std::size_t>(std::countr_zero(x));
        }
        throw indistinguishable_keys_error("undistinguishable keys: identical random streams");
    }
    std::size_t limit = std::min(a.is_random() ? ~std::size_t{0} : a.materialized_length(),
                                 b.is_random() ? ~std::size_t{0} : b.materialized_length());
    for (std::size_t i = 0; i < limit; ++i)
        if (a.bit(i) != b.bit(i)) return i;
    if (!a.is_random() && !b.is_random())
        throw indistinguishable_keys_error(
            "undistinguishable fixed keys: equal through all materialized bits");
    // one random key left; querying the fixed key past its end reports the miss
    (a.is_random() ? b : a).bit(limit);
    return limit;  // unreachable
}

inline std::vector<Key> make_random_keys(const SeedSpec& seed, std::size_t n) {
    std::vector<Key> keys;
    keys.reserve(n);
    for (std::size_t i = 0; i < n; ++i) keys.push_back(Key::random(seed, i));
    return keys;
}

}  // namespace trielab
