#pragma once

#include <cstdint>
#include <random>

namespace hdamp {

// MT19937-64 (its output sequence is fixed by the C++ standard) with explicit
// conversions, so sampled values are identical on every platform.  The standard
// distributions are avoided because their algorithms are implementation-defined.
class SeededRng {
public:
    explicit SeededRng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    // Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer on [lo, hi].
    std::uint64_t uniform_int(std::uint64_t lo, std::uint64_t hi) {
        const unsigned __int128 span = static_cast<unsigned __int128>(hi - lo) + 1;
        return lo + static_cast<std::uint64_t>((static_cast<unsigned __int128>(engine_()) * span) >> 64);
    }

private:
    std::mt19937_64 engine_;
};

// SplitMix64 finalizer of seed + index: independent streams for parallel tasks.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

}  // namespace hdamp
