#ifndef MAPMATCH_COMMON_HPP
#define MAPMATCH_COMMON_HPP

#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace mapmatch {

// Thrown on malformed or inconsistent user input (maps to CLI exit code 2).
struct input_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Thrown when a self-check detects a broken invariant (CLI exit code 3).
struct invariant_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// splitmix64; used to derive independent streams from one user seed.
inline std::uint64_t split_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Decimal serialization that round-trips IEEE doubles exactly.
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace mapmatch

#endif
