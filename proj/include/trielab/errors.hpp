#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace trielab {

// Gamma/digamma evaluated at a non-positive integer.
struct gamma_pole_error : std::domain_error {
    long long pole;
    explicit gamma_pole_error(long long at)
        : std::domain_error("gamma pole at " + std::to_string(at)), pole(at) {}
};

// A fixed key was queried past its materialized length.
struct insufficient_bits_error : std::out_of_range {
    explicit insufficient_bits_error(std::size_t index)
        : std::out_of_range("insufficient fixed bits: bit " + std::to_string(index) +
                            " requested beyond materialized length") {}
};

// Two keys agree on every bit that can be produced.
struct indistinguishable_keys_error : std::invalid_argument {
    explicit indistinguishable_keys_error(const std::string& what)
        : std::invalid_argument(what) {}
};

// A table-backed evaluation needs more precomputed entries than supplied.
struct table_range_error : std::length_error {
    std::size_t required_cap;
    table_range_error(const std::string& what, std::size_t cap)
        : std::length_error(what + " (required cap " + std::to_string(cap) + ")"),
          required_cap(cap) {}
};

}  // namespace trielab
