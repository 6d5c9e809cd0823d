#pragma once

#include <cstdlib>
#include <thread>

namespace trielab::detail {

// Worker cap: TRIE_LAB_THREADS when set, hardware concurrency otherwise.
inline unsigned thread_cap() {
    if (const char* env = std::getenv("TRIE_LAB_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<unsigned>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? hw : 1;
}

}  // namespace trielab::detail
