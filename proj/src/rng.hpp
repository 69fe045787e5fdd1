#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <utility>
#include <vector>

namespace rlens {

// Reproducibility contract "mt19937_64/v1": every random quantity the library
// emits is derived from std::mt19937_64 (whose output sequence is fixed by the
// C++ standard) through the mappings below. Standard-library distributions are
// deliberately avoided because their output is implementation-defined.

inline constexpr std::string_view kRngContract = "mt19937_64/v1";

using Rng = std::mt19937_64;

// Uniform double in [0, 1) using the top 53 bits.
inline double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline bool bernoulli(Rng& rng, double p) {
    return uniform01(rng) < p;
}

// Unbiased integer in [0, bound) by rejection.
inline std::uint64_t bounded(Rng& rng, std::uint64_t bound) {
    const std::uint64_t rem = (~std::uint64_t{0} % bound + 1) % bound; // 2^64 mod bound
    std::uint64_t x = rng();
    while (rem != 0 && x >= std::uint64_t{0} - rem) {
        x = rng();
    }
    return x % bound;
}

// In-place Fisher-Yates shuffle driven by bounded().
template <typename T>
void shuffle(Rng& rng, std::vector<T>& values) {
    for (std::size_t i = values.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(bounded(rng, i));
        std::swap(values[i - 1], values[j]);
    }
}

// FNV-1a, used to derive independent per-key seeds (e.g. one bootstrap stream
// per condition) so streams do not shift when unrelated keys appear.
inline std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

} // namespace rlens
