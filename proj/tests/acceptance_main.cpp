// Standalone acceptance runner; one pass/fail line per criterion, exit code 2
// on any failure. `--suite fast` skips the slow optional quadrature check and
// caps the oscillation scan at n = 4096.

#include <cstring>
#include <iostream>

#include "trielab/acceptance.hpp"

int main(int argc, char** argv) {
    auto suite = trielab::acceptance::Suite::full;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--suite") == 0 && i + 1 < argc) {
            if (std::strcmp(argv[i + 1], "fast") == 0) suite = trielab::acceptance::Suite::fast;
            ++i;
        }
    }
    const auto results = trielab::acceptance::run(suite, std::cout);
    return trielab::acceptance::exit_code(results);
}
