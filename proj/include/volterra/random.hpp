#pragma once

#include <complex>
#include <cstdint>

namespace volterra {

/// Counter-based generator: draw k of stream s is a pure function of
/// (seed, s, k), so results do not depend on call order or thread layout.
/// Mixing is the SplitMix64 finalizer.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0) : key_(mix(seed ^ mix(stream + 0x9E3779B97F4A7C15ULL))) {}

    /// Independent child generator.
    CounterRng split(std::uint64_t child) const { return CounterRng(key_, child + 1, 0); }

    std::uint64_t next_u64() { return mix(key_ + 0x9E3779B97F4A7C15ULL * ++counter_); }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    std::uint64_t counter() const { return counter_; }

private:
    CounterRng(std::uint64_t parent_key, std::uint64_t child, int) : key_(mix(parent_key ^ mix(child * 0xD1B54A32D192ED03ULL))) {}

    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

} // namespace volterra
